"""Verse scansion: metrical syllables, rhetorical devices and `+`/`-` patterns.

A verse is first broken into phonological syllables. Candidate scansions are
then built by toggling device sites away from their default reading:

* synalepha (word-final vowel + word-initial vowel) is applied by default,
  a deviation breaks it;
* syneresis (intra-word hiatus) is off by default, a deviation fuses it;
* dieresis (intra-syllable diphthong) is off by default, a deviation splits it.

Candidates are enumerated by increasing number of deviations, left to right,
and capped so long lines cannot explode.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import EmptyVerse, InputError, InvalidPattern, NoVowel, WordError
from .phonology import (
    ES_VOWELS,
    EN_VOWELS,
    DE_VOWELS,
    GENERIC_VOWELS,
    WordPhonology,
    check_language,
    function_words,
    normalize_word,
    stressed_vowel_index,
    syllabify_word,
)

DEFAULT_CAP = 256
OXYTONE, PAROXYTONE, PROPAROXYTONE = "oxytone", "paroxytone", "proparoxytone"
DEVICE_KINDS = ("synalepha", "synalepha_broken", "syneresis", "dieresis")

_TOKEN_SPLIT = re.compile(r"[\s\-‐-―]+")


class MetricalPattern(str):
    """A non-empty string over ``+`` (stressed) and ``-`` (unstressed)."""

    def __new__(cls, symbols: str):
        if not symbols or set(symbols) - {"+", "-"}:
            raise InvalidPattern(f"invalid metrical pattern {symbols!r}")
        return super().__new__(cls, symbols)


class Syllable(NamedTuple):
    text: str
    stressed: bool
    word_boundary: bool
    word_index: int


@dataclass(frozen=True)
class Device:
    kind: str
    position: int


@dataclass(frozen=True)
class ScannedVerse:
    verse: str
    units: tuple[str, ...]
    pattern: MetricalPattern
    metrical_length: int
    devices: tuple[Device, ...] = ()
    final_stress: str = PAROXYTONE
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.pattern) != len(self.units):
            raise ValueError("pattern and units disagree in length")

    def to_dict(self) -> dict:
        return {
            "verse": self.verse,
            "pattern": str(self.pattern),
            "length": self.metrical_length,
            "devices": [{"kind": d.kind, "position": d.position} for d in self.devices],
        }


def final_stress_kind(phon: WordPhonology) -> str:
    back = phon.stress_from_end
    if back is None or back == 1:
        return PAROXYTONE
    return OXYTONE if back == 0 else PROPAROXYTONE


def metrical_length_rule(pattern: str, final_word_stress: str, lang: str) -> int:
    """Metrical length from unit count, adjusted for Spanish verse endings."""
    pattern = MetricalPattern(pattern)
    lang = check_language(lang)
    if final_word_stress not in (OXYTONE, PAROXYTONE, PROPAROXYTONE):
        raise InputError(f"unknown final stress kind {final_word_stress!r}")
    n = len(pattern)
    if lang == "es":
        n += {OXYTONE: 1, PAROXYTONE: 0, PROPAROXYTONE: -1}[final_word_stress]
    return max(n, 1)


# ---------------------------------------------------------------------------
# phonological syllables
# ---------------------------------------------------------------------------

def _vowels(lang: str) -> frozenset[str]:
    if lang == "es":
        return ES_VOWELS
    if lang == "en":
        return EN_VOWELS
    if lang == "de":
        return DE_VOWELS
    return frozenset(GENERIC_VOWELS.get(lang, "aeiou"))


def _tokens(verse: str) -> list[str]:
    out = []
    for raw in _TOKEN_SPLIT.split(verse):
        norm = normalize_word(raw)
        if norm and any(c.isalnum() for c in norm):
            out.append(norm)
    return out


@dataclass
class _Word:
    text: str
    phon: WordPhonology
    stresses: list[bool]
    prefix: str = ""


def _analyze_words(verse: str, lang: str, strict: bool) -> list[_Word]:
    lang = check_language(lang)
    if verse is None or not verse.strip():
        raise EmptyVerse("empty verse")
    tokens = _tokens(verse)
    if not tokens:
        raise EmptyVerse(f"{verse!r} has no words")
    fwords = function_words(lang)
    words: list[_Word] = []
    pending: list[str] = []
    for idx, tok in enumerate(tokens):
        try:
            phon = _word_phonology(tok, lang, strict)
        except NoVowel as exc:
            # elided clitic such as th' leans on the next word
            if "'" in tok:
                pending.append(tok)
                continue
            raise WordError(idx, tok, exc) from exc
        except InputError as exc:
            raise WordError(idx, tok, exc) from exc
        demoted = tok in fwords
        stresses = [i == phon.stress_index and not demoted for i in range(len(phon.syllables))]
        if lang == "es" and _is_mente(tok) and not demoted:
            stem = syllabify_word(tok[:-5], lang, strict)
            for i in range(len(stem.syllables)):
                if i == stem.stress_index:
                    stresses[i] = True
        words.append(_Word(tok, phon, stresses, "".join(pending)))
        pending = []
    if not words:
        raise EmptyVerse(f"{verse!r} has no syllabic words")
    if pending:
        last = words[-1]
        last.phon = WordPhonology(
            last.phon.word + "".join(pending),
            last.phon.syllables[:-1] + (last.phon.syllables[-1] + "".join(pending),),
            last.phon.stress_index,
            last.phon.low_confidence,
        )
    return words


def _is_mente(word: str) -> bool:
    return word.endswith("mente") and len(word) > 6 and any(c in ES_VOWELS for c in word[:-5])


def _word_phonology(tok: str, lang: str, strict: bool) -> WordPhonology:
    if lang == "es" and _is_mente(tok):
        stem = syllabify_word(tok[:-5], lang, strict)
        whole = syllabify_word(tok, lang, strict)
        if "".join(stem.syllables) + "mente" == tok:
            return WordPhonology(tok, stem.syllables + ("men", "te"), whole.stress_index,
                                 stem.low_confidence)
        return whole
    return syllabify_word(tok, lang, strict)


def _flatten(words: list[_Word]) -> list[Syllable]:
    out = []
    for w_idx, word in enumerate(words):
        for s_idx, syl in enumerate(word.phon.syllables):
            text = word.prefix + syl if s_idx == 0 else syl
            out.append(Syllable(text, word.stresses[s_idx], s_idx == 0, w_idx))
    return out


def phonological_syllables(verse: str, lang: str, strict: bool = True) -> list[Syllable]:
    """Per-word syllabifications concatenated, with function words demoted."""
    return _flatten(_analyze_words(verse, lang, strict))


# ---------------------------------------------------------------------------
# candidate enumeration
# ---------------------------------------------------------------------------

FIXED, SYNALEPHA, SYNERESIS, DIERESIS = "fixed", "synalepha", "syneresis", "dieresis"


@dataclass
class _Piece:
    text: str
    stressed: bool


@dataclass
class _Layout:
    pieces: list[_Piece]
    boundaries: list[str]          # kind of the boundary after each piece
    sites: list[int] = field(default_factory=list)   # boundary indices that can deviate


def _es_vowel_positions(syl: str) -> list[int]:
    pos = []
    for i, c in enumerate(syl):
        if c not in ES_VOWELS and c != "y":
            continue
        if c == "u" and i > 0 and syl[i - 1] in "qg" and i + 1 < len(syl) and syl[i + 1] in "eéií":
            continue
        if c == "y" and (i + 1 < len(syl) and syl[i + 1] in ES_VOWELS or i == 0 and len(syl) > 1):
            continue
        pos.append(i)
    return pos


def _starts_with_vowel(text: str, lang: str) -> bool:
    vowels = _vowels(lang)
    if not text:
        return False
    if lang == "es":
        if text[0] == "y":
            return len(text) == 1 or text[1] not in ES_VOWELS
        if text[0] == "h":
            # mute h is transparent, except before a consonantal i/u glide (hielo, huerto)
            rest = text[1:]
            if len(rest) >= 2 and rest[0] in "iu" and rest[1] in ES_VOWELS:
                return False
            return bool(rest) and rest[0] in vowels
    return text[0] in vowels


def _ends_with_vowel(text: str, lang: str) -> bool:
    letters = [c for c in text if c.isalpha()]
    if not letters or text.endswith("'"):
        return False
    last = letters[-1]
    if lang == "es" and last == "y":
        # word-final y is always vocalic: y, muy, hoy, rey
        return True
    if lang == "en" and last == "e" and len(letters) > 1 and letters[-2] not in EN_VOWELS:
        # silent final e is not a sounding vowel
        return False
    return last in _vowels(lang)


def _layout(syllables: list[Syllable], lang: str) -> _Layout:
    pieces: list[_Piece] = []
    boundaries: list[str] = []
    for k, syl in enumerate(syllables):
        if k:
            prev = syllables[k - 1]
            if syl.word_boundary:
                kind = SYNALEPHA if (
                    _ends_with_vowel(prev.text, lang) and _starts_with_vowel(syl.text, lang)
                ) else FIXED
            elif lang == "es" and _ends_with_vowel(prev.text, lang) and _starts_with_vowel(syl.text, lang):
                kind = SYNERESIS
            else:
                kind = FIXED
            boundaries.append(kind)
        split_at = _dieresis_points(syl.text) if lang == "es" else []
        if split_at:
            stressed_at = stressed_vowel_index(syl.text, lang)
            cuts = [0, *split_at, len(syl.text)]
            for a, b in zip(cuts, cuts[1:]):
                pieces.append(_Piece(syl.text[a:b], syl.stressed and a <= stressed_at < b))
                if b != len(syl.text):
                    boundaries.append(DIERESIS)
        else:
            pieces.append(_Piece(syl.text, syl.stressed))
    layout = _Layout(pieces, boundaries)
    layout.sites = [i for i, kind in enumerate(boundaries) if kind != FIXED]
    return layout


def _dieresis_points(syl: str) -> list[int]:
    pos = _es_vowel_positions(syl)
    return [b for a, b in zip(pos, pos[1:]) if b == a + 1]


def _fused(kind: str, deviated: bool) -> bool:
    if kind == FIXED:
        return False
    if kind in (SYNALEPHA, DIERESIS):
        return not deviated
    return deviated  # syneresis


@dataclass(frozen=True)
class _Candidate:
    scanned: ScannedVerse
    deviations: tuple[int, ...]
    intra: int
    broken: int
    broken_unstressed: int


def _build(verse: str, layout: _Layout, deviations: frozenset[int], final: str, lang: str) -> _Candidate:
    units: list[str] = []
    stress: list[bool] = []
    devices: list[Device] = []
    intra = broken = broken_unstressed = 0
    for i, piece in enumerate(layout.pieces):
        if i == 0:
            units.append(piece.text)
            stress.append(piece.stressed)
            continue
        kind = layout.boundaries[i - 1]
        deviated = (i - 1) in deviations
        if _fused(kind, deviated):
            units[-1] += piece.text
            stress[-1] = stress[-1] or piece.stressed
            if kind == SYNALEPHA:
                devices.append(Device("synalepha", len(units) - 1))
            elif kind == SYNERESIS:
                devices.append(Device("syneresis", len(units) - 1))
                intra += 1
        else:
            if kind == SYNALEPHA:
                devices.append(Device("synalepha_broken", len(units)))
                broken += 1
                if not piece.stressed:
                    broken_unstressed += 1
            elif kind == DIERESIS:
                devices.append(Device("dieresis", len(units)))
                intra += 1
            units.append(piece.text)
            stress.append(piece.stressed)
    pattern = MetricalPattern("".join("+" if s else "-" for s in stress))
    scanned = ScannedVerse(
        verse=verse,
        units=tuple(units),
        pattern=pattern,
        metrical_length=metrical_length_rule(pattern, final, lang),
        devices=tuple(devices),
        final_stress=final,
    )
    return _Candidate(scanned, tuple(sorted(deviations)), intra, broken, broken_unstressed)


def _candidates(verse: str, lang: str, cap: int, strict: bool) -> tuple[list[_Candidate], bool]:
    lang = check_language(lang)
    words = _analyze_words(verse, lang, strict)
    final = final_stress_kind(words[-1].phon)
    layout = _layout(_flatten(words), lang)
    out: list[_Candidate] = []
    capped = False
    for d in range(len(layout.sites) + 1):
        for combo in itertools.combinations(layout.sites, d):
            if len(out) >= cap:
                capped = True
                break
            out.append(_build(verse, layout, frozenset(combo), final, lang))
        if capped:
            break
    return out, capped


def enumerate_scansions(verse: str, lang: str, cap: int = DEFAULT_CAP, strict: bool = True) -> list[ScannedVerse]:
    """All candidate scansions in enumeration order (default reading first).

    When more than ``cap`` candidates exist the list is truncated and every
    candidate carries the ``capped`` flag.
    """
    cands, capped = _candidates(verse, lang, cap, strict)
    if capped:
        return [_flag(c.scanned, "capped") for c in cands]
    return [c.scanned for c in cands]


def _flag(scanned: ScannedVerse, flag: str) -> ScannedVerse:
    return ScannedVerse(
        scanned.verse, scanned.units, scanned.pattern, scanned.metrical_length,
        scanned.devices, scanned.final_stress, scanned.flags + (flag,),
    )


def scan_verse(verse: str, lang: str, target_length: int | None = None,
               cap: int = DEFAULT_CAP, strict: bool = True) -> ScannedVerse:
    """Pick one scansion for ``verse``.

    Without a target the default reading wins (every synalepha applied, no
    syneresis or dieresis). With a target, candidates of that metrical length
    are preferred, then: fewest intra-word devices, fewest broken synalephas,
    fewest breaks before an unstressed syllable, leftmost deviations. A
    verse that cannot reach the target gets the closest candidate, flagged
    ``no_candidate_at_target``.
    """
    if target_length is not None and (not isinstance(target_length, int) or target_length < 1):
        raise InputError(f"target length must be a positive integer, got {target_length!r}")
    cands, capped = _candidates(verse, lang, cap, strict)
    if target_length is None:
        best = cands[0]
    else:
        best = min(cands, key=lambda c: (
            abs(c.scanned.metrical_length - target_length),
            c.intra, c.broken, c.broken_unstressed, c.deviations,
        ))
    result = best.scanned
    if capped:
        result = _flag(result, "capped")
    if target_length is not None and result.metrical_length != target_length:
        result = _flag(result, "no_candidate_at_target")
    return result
