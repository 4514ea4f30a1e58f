"""Stanza annotation and rule-based stanza type classification.

A catalog is a plain text file with one rule per line::

    name; verse_count; length_pattern; scheme_pattern; rhyme_mode

``verse_count``
    ``4`` (exact), ``6+`` (at least six) or ``4-10`` (inclusive range).
``length_pattern``
    Whitespace separated per-verse constraints, or a single constraint that
    applies to every verse. A constraint is ``8`` (exact), ``7|11`` (set),
    ``5-8``, ``<=8``, ``>=9`` (ranges) or ``*`` (any length).
``scheme_pattern``
    Rhyme letters (case-insensitive), ``-`` for an unrhymed verse and ``?``
    for any label. One ``(...)+`` group may repeat, and alternatives are
    separated by ``|``. Letters name rhyme groups: equal letters must rhyme,
    different letters must not.
``rhyme_mode``
    ``consonance``, ``assonance``, ``mixed``, ``none`` or ``any``.

Blank lines and lines starting with ``#`` are ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DuplicateName,
    EmptyCatalog,
    InputError,
    ParseError,
    TooFewVerses,
    TooManyVerses,
    UnsatisfiableRule,
    VerseError,
)
from .phonology import _data_path
from .rhyme import ARTE_MENOR_MAX, ASSONANCE, CONSONANCE, MIXED, NONE, RhymeScheme, _label, detect_rhyme_scheme
from .scansion import scan_verse

MIN_VERSES = 2
MAX_VERSES = 200
RHYME_MODES = (CONSONANCE, ASSONANCE, MIXED, NONE, "any")
UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------

def render_annotation(lengths: Sequence[int], labels: Sequence[str]) -> str:
    return " ".join(f"{n}{lab}" for n, lab in zip(lengths, labels))


_ANNOTATION_ITEM = re.compile(r"(\d+)([A-Za-z]+|-)")


def parse_annotation(text: str) -> tuple[list[int], list[str]]:
    lengths, labels = [], []
    for item in text.split():
        m = _ANNOTATION_ITEM.fullmatch(item)
        if not m:
            raise InputError(f"bad annotation item {item!r}")
        lengths.append(int(m.group(1)))
        labels.append(m.group(2))
    return lengths, labels


@dataclass(frozen=True)
class StanzaAnalysis:
    verses: tuple[str, ...]
    lengths: tuple[int, ...]
    scheme: RhymeScheme

    def __post_init__(self):
        if len(self.lengths) != len(self.scheme.labels):
            raise ValueError("lengths and scheme labels differ in size")
        if any(n < 1 for n in self.lengths):
            raise ValueError("metrical lengths must be positive")

    @property
    def annotation(self) -> str:
        return render_annotation(self.lengths, self.scheme.labels)

    def to_dict(self) -> dict:
        return {
            "verses": list(self.verses),
            "lengths": list(self.lengths),
            "scheme": str(self.scheme),
            "rhyme_type": self.scheme.rhyme_type,
            "annotation": self.annotation,
        }


def analyze_stanza(verses: Sequence[str], lang: str, strict: bool = True) -> StanzaAnalysis:
    verses = [v for v in verses]
    if len(verses) < MIN_VERSES:
        raise TooFewVerses(f"a stanza needs at least {MIN_VERSES} verses, got {len(verses)}")
    if len(verses) > MAX_VERSES:
        raise TooManyVerses(f"a stanza may have at most {MAX_VERSES} verses, got {len(verses)}")
    lengths = []
    for i, verse in enumerate(verses):
        try:
            lengths.append(scan_verse(verse, lang, strict=strict).metrical_length)
        except InputError as exc:
            raise VerseError(i, exc) from exc
    scheme = detect_rhyme_scheme(verses, lang, lengths, strict=strict)
    return StanzaAnalysis(tuple(verses), tuple(lengths), scheme)


# ---------------------------------------------------------------------------
# rule grammar
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LengthConstraint:
    """Allowed metrical lengths for one verse; ``hi`` None means unbounded."""
    text: str
    lo: int = 1
    hi: int | None = None
    values: frozenset[int] | None = None

    @classmethod
    def parse(cls, text: str) -> "LengthConstraint":
        text = text.strip()
        try:
            if text == "*":
                return cls(text)
            if "|" in text:
                vals = frozenset(int(x) for x in text.split("|"))
                return cls(text, min(vals), max(vals), vals)
            if text.startswith("<="):
                return cls(text, 1, int(text[2:]))
            if text.startswith(">="):
                return cls(text, int(text[2:]), None)
            if "-" in text:
                lo, hi = text.split("-")
                return cls(text, int(lo), int(hi))
            n = int(text)
            return cls(text, n, n, frozenset({n}))
        except ValueError:
            raise ValueError(f"bad length constraint {text!r}") from None

    @property
    def exact(self) -> bool:
        return self.values is not None and len(self.values) == 1

    @property
    def specificity(self) -> float:
        if self.text == "*":
            return 0.0
        return 1.0 if self.exact else 0.5

    def empty(self) -> bool:
        if self.values is not None:
            return any(v < 1 for v in self.values)
        return self.lo < 1 or (self.hi is not None and self.hi < self.lo)

    def __contains__(self, n: int) -> bool:
        if self.values is not None:
            return n in self.values
        return n >= self.lo and (self.hi is None or n <= self.hi)

    def example(self, position: int) -> int:
        if self.text == "*":
            return 9
        if self.values is not None:
            ordered = sorted(self.values)
            return ordered[position % len(ordered)]
        return self.hi if self.hi is not None and self.lo == 1 else self.lo


@dataclass(frozen=True)
class VerseCount:
    lo: int
    hi: int | None

    @classmethod
    def parse(cls, text: str) -> "VerseCount":
        text = text.strip()
        try:
            if text.endswith("+"):
                return cls(int(text[:-1]), None)
            if "-" in text:
                lo, hi = text.split("-")
                return cls(int(lo), int(hi))
            n = int(text)
            return cls(n, n)
        except ValueError:
            raise ValueError(f"bad verse count {text!r}") from None

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def range(self) -> range:
        lo = max(self.lo, MIN_VERSES)
        hi = MAX_VERSES if self.hi is None else min(self.hi, MAX_VERSES)
        return range(lo, hi + 1)

    def __contains__(self, n: int) -> bool:
        return n >= self.lo and (self.hi is None or n <= self.hi)

    def __str__(self):
        if self.hi is None:
            return f"{self.lo}+"
        return str(self.lo) if self.exact else f"{self.lo}-{self.hi}"


_SCHEME_ALT = re.compile(r"([A-Za-z?\-]*)(?:\(([A-Za-z?\-]+)\)\+)?([A-Za-z?\-]*)")


@dataclass(frozen=True)
class SchemeAlternative:
    prefix: str
    group: str
    suffix: str

    def expand(self, n: int) -> str | None:
        fixed = len(self.prefix) + len(self.suffix)
        if not self.group:
            return self.prefix + self.suffix if fixed == n else None
        rest = n - fixed
        if rest < len(self.group) or rest % len(self.group):
            return None
        return self.prefix + self.group * (rest // len(self.group)) + self.suffix


def parse_scheme_pattern(text: str) -> tuple[SchemeAlternative, ...]:
    alts = []
    for part in text.strip().split("|"):
        m = _SCHEME_ALT.fullmatch(part.strip())
        if not m or not part.strip():
            raise ValueError(f"bad scheme pattern {part!r}")
        alts.append(SchemeAlternative(m.group(1).lower(), (m.group(2) or "").lower(), m.group(3).lower()))
    return tuple(alts)


@dataclass(frozen=True)
class StanzaTypeRule:
    name: str
    verse_count: VerseCount
    length_pattern: tuple[LengthConstraint, ...]
    scheme_pattern: str
    rhyme_mode: str
    alternatives: tuple[SchemeAlternative, ...] = field(repr=False, compare=False, default=())

    def lengths_for(self, n: int) -> tuple[LengthConstraint, ...] | None:
        if len(self.length_pattern) == 1:
            return self.length_pattern * n
        return self.length_pattern if len(self.length_pattern) == n else None

    def expansions(self, n: int) -> list[str]:
        """Scheme patterns of length ``n`` whose letters each name a real rhyme."""
        out = []
        for alt in self.alternatives:
            exp = alt.expand(n)
            if exp is None:
                continue
            letters = [c for c in exp if c.isalpha()]
            if all(letters.count(c) >= 2 for c in letters):
                out.append(exp)
        return out

    def to_line(self) -> str:
        lengths = " ".join(c.text for c in self.length_pattern)
        return f"{self.name}; {self.verse_count}; {lengths}; {self.scheme_pattern}; {self.rhyme_mode}"


def _scheme_fits(pattern: str, labels: Sequence[str]) -> bool:
    binding: dict[str, str] = {}
    used: set[str] = set()
    for p, lab in zip(pattern, labels):
        if p == "?":
            continue
        if p == "-":
            if lab != "-":
                return False
            continue
        if lab == "-":
            return False
        lab = lab.lower()
        if p in binding:
            if binding[p] != lab:
                return False
        else:
            if lab in used:
                return False
            binding[p] = lab
            used.add(lab)
    return True


def match_score(rule: StanzaTypeRule, analysis: StanzaAnalysis) -> float | None:
    """Specificity of ``rule`` for ``analysis``, or None if it does not apply."""
    n = len(analysis.lengths)
    if n not in rule.verse_count:
        return None
    if rule.rhyme_mode != "any" and rule.rhyme_mode != analysis.scheme.rhyme_type:
        return None
    constraints = rule.lengths_for(n)
    if constraints is None or any(length not in c for length, c in zip(analysis.lengths, constraints)):
        return None
    best = None
    for exp in rule.expansions(n):
        if _scheme_fits(exp, analysis.scheme.labels):
            fixed = sum(1 for c in exp if c != "?")
            best = fixed if best is None else max(best, fixed)
    if best is None:
        return None
    score = float(best) + sum(c.specificity for c in constraints)
    score += 1.0 if rule.rhyme_mode != "any" else 0.0
    score += 1.0 if rule.verse_count.exact else 0.0
    return score


def classify_stanza(analysis: StanzaAnalysis, catalog: Iterable[StanzaTypeRule]) -> list[tuple[str, float]]:
    """Matching rule names, most specific first; empty means unknown."""
    rules = list(catalog)
    if not rules:
        raise EmptyCatalog("the stanza catalog is empty")
    hits = []
    for rule in rules:
        score = match_score(rule, analysis)
        if score is not None:
            hits.append((rule.name, score))
    hits.sort(key=lambda h: (-h[1], h[0]))
    return hits


# ---------------------------------------------------------------------------
# synthesis and loading
# ---------------------------------------------------------------------------

def _synthesize_for(rule: StanzaTypeRule, n: int, pattern: str) -> StanzaAnalysis | None:
    constraints = rule.lengths_for(n)
    if constraints is None or any(c.empty() for c in constraints):
        return None
    lengths = [c.example(i) for i, c in enumerate(constraints)]
    names: dict[str, str] = {}
    labels = []
    for p, length in zip(pattern, lengths):
        if p in "?-":
            labels.append("-")
            continue
        if p not in names:
            names[p] = _label(len(names))
        lab = names[p]
        labels.append(lab if length <= ARTE_MENOR_MAX else lab.upper())
    mode = rule.rhyme_mode
    if not names:
        rhyme_type = NONE
    elif mode == "any":
        rhyme_type = CONSONANCE
    else:
        rhyme_type = mode
    if rhyme_type == MIXED and len(names) < 2:
        return None
    verses = tuple(f"verse {i + 1}" for i in range(n))
    return StanzaAnalysis(verses, tuple(lengths), RhymeScheme(tuple(labels), rhyme_type))


def synthesize_stanza(rule: StanzaTypeRule) -> StanzaAnalysis:
    """A minimal annotated stanza satisfying ``rule``."""
    for n in rule.verse_count.range():
        for pattern in rule.expansions(n):
            analysis = _synthesize_for(rule, n, pattern)
            if analysis is not None and match_score(rule, analysis) is not None:
                return analysis
    raise UnsatisfiableRule(f"no stanza satisfies rule {rule.name!r}")


def parse_rule(line: str, lineno: int | None = None) -> StanzaTypeRule:
    fields = [f.strip() for f in line.split(";")]
    if len(fields) != 5:
        raise ParseError(f"expected 5 ';'-separated fields, got {len(fields)}", lineno)
    name, count, lengths, scheme, mode = fields
    if not name:
        raise ParseError("empty rule name", lineno, "name")
    try:
        verse_count = VerseCount.parse(count)
    except ValueError as exc:
        raise ParseError(str(exc), lineno, "verse_count") from None
    try:
        tokens = lengths.split()
        if not tokens:
            raise ValueError("empty length pattern")
        length_pattern = tuple(LengthConstraint.parse(t) for t in tokens)
    except ValueError as exc:
        raise ParseError(str(exc), lineno, "length_pattern") from None
    try:
        alternatives = parse_scheme_pattern(scheme)
    except ValueError as exc:
        raise ParseError(str(exc), lineno, "scheme_pattern") from None
    mode = mode.lower()
    if mode == "*":
        mode = "any"
    if mode not in RHYME_MODES:
        raise ParseError(f"unknown rhyme mode {mode!r}", lineno, "rhyme_mode")
    rule = StanzaTypeRule(name, verse_count, length_pattern, scheme, mode, alternatives)
    if len(length_pattern) > 1 and not (verse_count.exact and verse_count.lo == len(length_pattern)):
        raise UnsatisfiableRule(
            f"rule {name!r}: {len(length_pattern)} length constraints for verse count {verse_count}"
        )
    synthesize_stanza(rule)
    return rule


def parse_catalog(lines: Iterable[str]) -> tuple[StanzaTypeRule, ...]:
    rules: list[StanzaTypeRule] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rule = parse_rule(line, lineno)
        if rule.name in seen:
            raise DuplicateName(f"line {lineno}: duplicate rule name {rule.name!r}")
        seen.add(rule.name)
        rules.append(rule)
    return tuple(rules)


def load_catalog(path: str | Path) -> tuple[StanzaTypeRule, ...]:
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh)


@lru_cache(maxsize=None)
def default_catalog() -> tuple[StanzaTypeRule, ...]:
    return load_catalog(_data_path("stanzas_es.txt"))
