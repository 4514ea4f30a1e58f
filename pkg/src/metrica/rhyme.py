"""Verse-final rhyme endings, rhyme matching and stanza rhyme schemes."""
from __future__ import annotations

import re
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import InputError, LengthMismatch, NoStressedSyllable, TooFewVerses
from .phonology import (
    DE_VOWELS,
    EN_VOWELS,
    GENERIC_VOWELS,
    _data_path,
    check_language,
    stressed_vowel_index,
)
from .scansion import _analyze_words

CONSONANCE, ASSONANCE, MIXED, NONE = "consonance", "assonance", "mixed", "none"
ARTE_MENOR_MAX = 8


@dataclass(frozen=True)
class RhymeEnding:
    full: str
    vowels_only: str

    def __post_init__(self):
        if not self.vowels_only:
            raise ValueError("rhyme ending without vowels")


@dataclass(frozen=True)
class RhymeScheme:
    labels: tuple[str, ...]
    rhyme_type: str

    def __str__(self):
        return "".join(self.labels)

    def canonical(self) -> str:
        """Relabel groups as a, b, c... in first-use order, ignoring case."""
        mapping: dict[str, str] = {}
        out = []
        for lab in self.labels:
            if lab == "-":
                out.append("-")
                continue
            key = lab.lower()
            if key not in mapping:
                mapping[key] = _label(len(mapping))
            out.append(mapping[key])
        return " ".join(out) if any(len(x) > 1 for x in out) else "".join(out)


def schemes_equivalent(a: Sequence[str], b: Sequence[str]) -> bool:
    """Equality up to renaming of rhyme groups (case ignored)."""
    return RhymeScheme(tuple(a), NONE).canonical() == RhymeScheme(tuple(b), NONE).canonical()


# ---------------------------------------------------------------------------
# endings
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _fold_rules(lang: str) -> tuple[tuple[re.Pattern, str], ...]:
    path = _data_path(f"rhyme_fold_{lang}.tsv")
    if not path.exists():
        return ()
    rules = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            pattern, _, repl = line.partition("\t")
            rules.append((re.compile(pattern), repl))
    return tuple(rules)


def fold(text: str, lang: str) -> str:
    for pattern, repl in _fold_rules(lang):
        text = pattern.sub(repl, text)
    return text


def _vowel_set(lang: str) -> frozenset[str]:
    if lang == "es":
        return frozenset("aeiou")
    if lang == "en":
        return EN_VOWELS
    if lang == "de":
        return DE_VOWELS
    return frozenset(GENERIC_VOWELS.get(lang, "aeiou"))


def _es_assonance(full: str) -> str:
    vowels = [(i, c) for i, c in enumerate(full) if c in "aeiou"]
    kept = []
    for k, (i, c) in enumerate(vowels):
        if k == 0 or c not in "iu":
            kept.append(c)
            continue
        # post-tonic i/u next to another vowel is a glide (memoria, agua)
        neighbours = [j for j, _ in vowels if abs(j - i) == 1]
        if not neighbours:
            kept.append(c)
    if len(kept) >= 3:
        # proparoxytone endings assonate on the stressed and the last vowel
        kept = [kept[0], kept[-1]]
    return "".join(kept)


def rhyme_ending(verse: str, lang: str, strict: bool = True) -> RhymeEnding:
    """Sounds from the last stressed vowel of ``verse`` to its end."""
    lang = check_language(lang)
    words = _analyze_words(verse, lang, strict)
    phon = words[-1].phon
    if phon.stress_index is None:
        raise NoStressedSyllable(f"no stressed syllable in {verse!r}")
    syl = phon.syllables[phon.stress_index]
    start = stressed_vowel_index(syl, lang)
    tail = syl[start:] + "".join(phon.syllables[phon.stress_index + 1:])
    tail = "".join(c for c in tail if c.isalpha())
    vowels = _vowel_set(lang)
    if lang == "es":
        full = fold(tail, lang)
        vowels_only = _es_assonance(full)
    elif lang in ("zh", "ar"):
        # no vowel letters to isolate; the syllable itself is the rime
        full = vowels_only = tail
    else:
        full = fold(tail, lang)
        vowels_only = "".join(c for c in full if c in vowels)
    if not full or not vowels_only:
        raise NoStressedSyllable(f"no stressed vowel in the last word of {verse!r}")
    return RhymeEnding(full, vowels_only)


def rhyme_match(a: RhymeEnding, b: RhymeEnding, mode: str) -> bool:
    if mode == CONSONANCE:
        return a.full == b.full
    if mode == ASSONANCE:
        return a.vowels_only == b.vowels_only
    raise InputError(f"unknown rhyme mode {mode!r}")


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------

def _label(k: int) -> str:
    """0 -> a, 25 -> z, 26 -> aa (bijective base 26)."""
    letters = ""
    k += 1
    while k:
        k, r = divmod(k - 1, 26)
        letters = string.ascii_lowercase[r] + letters
    return letters


def _groups(endings: Sequence[RhymeEnding], mode: str) -> list[int]:
    """Group id per verse: verses with equal keys share the first index."""
    key = (lambda e: e.full) if mode == CONSONANCE else (lambda e: e.vowels_only)
    first: dict[str, int] = {}
    return [first.setdefault(key(e), i) for i, e in enumerate(endings)]


def scheme_from_endings(endings: Sequence[RhymeEnding], lengths: Sequence[int]) -> RhymeScheme:
    """Consonance first; switch the whole stanza to assonance when that rhymes a leftover verse."""
    if len(endings) < 2:
        raise TooFewVerses(f"a rhyme scheme needs at least 2 verses, got {len(endings)}")
    if len(endings) != len(lengths):
        raise LengthMismatch(f"{len(endings)} verses but {len(lengths)} lengths")
    cons = _groups(endings, CONSONANCE)
    asso = _groups(endings, ASSONANCE)
    cons_size = {g: cons.count(g) for g in set(cons)}
    asso_size = {g: asso.count(g) for g in set(asso)}
    mode = CONSONANCE
    for i in range(len(endings)):
        if cons_size[cons[i]] == 1 and asso_size[asso[i]] > 1:
            mode = ASSONANCE
            break
    groups, sizes = (cons, cons_size) if mode == CONSONANCE else (asso, asso_size)

    names: dict[int, str] = {}
    labels = []
    for g, length in zip(groups, lengths):
        if sizes[g] < 2:
            labels.append("-")
            continue
        if g not in names:
            names[g] = _label(len(names))
        lab = names[g]
        labels.append(lab if length <= ARTE_MENOR_MAX else lab.upper())

    if not names:
        rhyme_type = NONE
    elif mode == CONSONANCE:
        rhyme_type = CONSONANCE
    else:
        fully_consonant = [
            len({endings[i].full for i, g in enumerate(groups) if g == gid}) == 1 for gid in names
        ]
        rhyme_type = MIXED if any(fully_consonant) and not all(fully_consonant) else ASSONANCE
    return RhymeScheme(tuple(labels), rhyme_type)


def detect_rhyme_scheme(verses: Sequence[str], lang: str, lengths: Sequence[int],
                        strict: bool = True) -> RhymeScheme:
    if len(verses) < 2:
        raise TooFewVerses(f"a rhyme scheme needs at least 2 verses, got {len(verses)}")
    if len(verses) != len(lengths):
        raise LengthMismatch(f"{len(verses)} verses but {len(lengths)} lengths")
    return scheme_from_endings([rhyme_ending(v, lang, strict) for v in verses], lengths)
