"""Syllabification and lexical stress for single words.

Spanish is handled by orthographic rules (onset maximization, diphthong and
hiatus rules). English and German consult a bundled lexicon first and fall
back to a vowel-group splitter. The other supported languages only get a
best-effort split flagged as ``low_confidence``.

Lexicon files are UTF-8, one entry per line::

    word<TAB>syl-la-bles<TAB>stress_index

Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import EmptyWord, InputError, NoVowel, UnknownLanguage, UnsupportedLanguage

LANGUAGES = ("es", "en", "de", "fr", "it", "pt", "cs", "fi", "hu", "ru", "ar", "zh")
SCANSION_LANGUAGES = frozenset({"es", "en", "de"})

LANGUAGE_NAMES = {
    "es": "Spanish", "en": "English", "de": "German", "fr": "French",
    "it": "Italian", "pt": "Portuguese", "cs": "Czech", "fi": "Finnish",
    "hu": "Hungarian", "ru": "Russian", "ar": "Arabic", "zh": "Chinese",
}

APOSTROPHES = {"’": "'", "ʼ": "'", "‘": "'", "`": "'"}


def check_language(code: str) -> str:
    """Return the canonical language code or raise UnknownLanguage."""
    norm = str(code).strip().lower()
    if norm not in LANGUAGES:
        raise UnknownLanguage(f"unknown language code {code!r}; expected one of {', '.join(LANGUAGES)}")
    return norm


@dataclass(frozen=True)
class WordPhonology:
    word: str
    syllables: tuple[str, ...]
    stress_index: int | None
    low_confidence: bool = False

    def __post_init__(self):
        if "".join(self.syllables) != self.word:
            raise ValueError(f"syllables {self.syllables!r} do not spell {self.word!r}")
        if self.stress_index is not None and not 0 <= self.stress_index < len(self.syllables):
            raise ValueError(f"stress index {self.stress_index} out of range for {self.syllables!r}")

    @property
    def stress_from_end(self) -> int | None:
        """0 for oxytone, 1 for paroxytone, 2+ for proparoxytone and beyond."""
        if self.stress_index is None:
            return None
        return len(self.syllables) - 1 - self.stress_index

    def hyphenated(self) -> str:
        return "-".join(self.syllables)


def normalize_word(word: str) -> str:
    """Lowercase, NFC, canonical apostrophe; strips surrounding punctuation."""
    text = unicodedata.normalize("NFC", word)
    for src, dst in APOSTROPHES.items():
        text = text.replace(src, dst)
    text = text.lower()
    start, end = 0, len(text)
    while start < end and not (text[start].isalnum() or text[start] == "'"):
        start += 1
    while end > start and not (text[end - 1].isalnum() or text[end - 1] == "'"):
        end -= 1
    return text[start:end]


def strip_accents(text: str) -> str:
    return "".join(
        c for c in unicodedata.normalize("NFD", text) if unicodedata.category(c) != "Mn"
    )


# ---------------------------------------------------------------------------
# data files
# ---------------------------------------------------------------------------

def _data_path(name: str) -> Path:
    return Path(str(resources.files("metrica") / "data" / name))


def load_lexicon(path: str | Path) -> dict[str, tuple[tuple[str, ...], int]]:
    """Read a ``word<TAB>syl-la-bles<TAB>stress`` file into a dict."""
    lexicon: dict[str, tuple[tuple[str, ...], int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise InputError(f"{path}:{lineno}: expected 3 tab-separated fields")
            word, hyph, stress = (p.strip() for p in parts)
            word = unicodedata.normalize("NFC", word.lower())
            syllables = tuple(unicodedata.normalize("NFC", hyph.lower()).split("-"))
            if "".join(syllables) != word:
                raise InputError(f"{path}:{lineno}: {hyph!r} does not spell {word!r}")
            idx = int(stress)
            if not 0 <= idx < len(syllables):
                raise InputError(f"{path}:{lineno}: stress index {idx} out of range")
            lexicon[word] = (syllables, idx)
    return lexicon


def load_wordlist(path: str | Path) -> frozenset[str]:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                words.update(unicodedata.normalize("NFC", w.lower()) for w in line.split())
    return frozenset(words)


@lru_cache(maxsize=None)
def bundled_lexicon(lang: str) -> dict[str, tuple[tuple[str, ...], int]]:
    path = _data_path(f"lexicon_{lang}.tsv")
    return load_lexicon(path) if path.exists() else {}


@lru_cache(maxsize=None)
def function_words(lang: str) -> frozenset[str]:
    path = _data_path(f"function_words_{lang}.txt")
    return load_wordlist(path) if path.exists() else frozenset()


def is_function_word(word: str, lang: str) -> bool:
    """Closed-class words that lose their stress inside a verse."""
    return normalize_word(word) in function_words(check_language(lang))


# ---------------------------------------------------------------------------
# Spanish
# ---------------------------------------------------------------------------

ES_VOWELS = frozenset("aeiouáéíóúü")
ES_ACCENTED = frozenset("áéíóú")
ES_STRONG = frozenset("aeoáéóíú")
ES_ONSETS = frozenset({
    "pr", "pl", "br", "bl", "fr", "fl", "tr", "dr", "cr", "cl", "gr", "gl", "kr", "kl",
})
ES_NATIVE = frozenset("abcdefghijlmnñopqrstuvxyzáéíóúü'")


def _es_units(word: str) -> list[tuple[str, bool]]:
    """Split into (text, is_vowel) units; digraphs and mute u are consonant units."""
    units: list[tuple[str, bool]] = []
    i, n = 0, len(word)
    while i < n:
        ch = word[i]
        nxt = word[i + 1] if i + 1 < n else ""
        if ch + nxt in ("ch", "ll", "rr"):
            units.append((ch + nxt, False))
            i += 2
        elif ch == "q" and nxt == "u":
            units.append(("qu", False))
            i += 2
        elif ch == "g" and nxt == "u" and i + 2 < n and word[i + 2] in "eéií":
            units.append(("gu", False))
            i += 2
        elif ch == "y":
            units.append((ch, nxt not in ES_VOWELS))
            i += 1
        else:
            units.append((ch, ch in ES_VOWELS))
            i += 1
    return units


def _es_is_strong(unit: str, prev: str) -> bool:
    # poetic diaeresis: ü outside gü marks a forced hiatus
    if unit == "ü" and prev != "g":
        return True
    return unit in ES_STRONG


def _es_nuclei(units: list[tuple[str, bool]]) -> list[tuple[int, int]]:
    """Return [start, end) unit spans of the syllable nuclei."""
    nuclei: list[tuple[int, int]] = []
    i, n = 0, len(units)
    while i < n:
        if not units[i][1]:
            i += 1
            continue
        start = i
        has_strong = _es_is_strong(units[i][0], units[i - 1][0] if i else "")
        j = i + 1
        while j < n and units[j][1]:
            cur_strong = _es_is_strong(units[j][0], units[j - 1][0])
            prev_strong = _es_is_strong(units[j - 1][0], units[j - 2][0] if j >= 2 else "")
            same_weak = units[j][0] == units[j - 1][0]
            if (cur_strong and prev_strong) or (cur_strong and has_strong) or same_weak:
                break
            has_strong = has_strong or cur_strong
            j += 1
        nuclei.append((start, j))
        i = j
    return nuclei


def _split_cluster(cluster: list[str], onsets: frozenset[str]) -> int:
    """Index inside an intervocalic consonant cluster where the next syllable starts."""
    if len(cluster) <= 1:
        return 0
    if len(cluster[-1]) == 1 and len(cluster[-2]) == 1 and cluster[-2] + cluster[-1] in onsets:
        return len(cluster) - 2
    return len(cluster) - 1


def _assemble(units: list[str], nuclei: list[tuple[int, int]], split) -> list[str]:
    """Cut the unit list into syllables given nuclei spans and a cluster splitter."""
    cuts = []
    for (_, end), (start, _) in zip(nuclei, nuclei[1:]):
        cluster = units[end:start]
        cuts.append(end + split(cluster))
    bounds = [0, *cuts, len(units)]
    return ["".join(units[a:b]) for a, b in zip(bounds, bounds[1:])]


def _spanish(word: str) -> WordPhonology:
    units = _es_units(word)
    nuclei = _es_nuclei(units)
    if not nuclei:
        raise NoVowel(f"{word!r} has no syllabic nucleus")
    texts = [u for u, _ in units]
    syllables = _assemble(texts, nuclei, lambda c: _split_cluster(c, ES_ONSETS))
    stress = _es_stress(word, syllables)
    foreign = any(c not in ES_NATIVE for c in word) or "k" in word or "w" in word
    return WordPhonology(word, tuple(syllables), stress, low_confidence=foreign)


def _es_stress(word: str, syllables: list[str]) -> int:
    for i, syl in enumerate(syllables):
        if any(c in ES_ACCENTED for c in syl):
            return i
    if len(syllables) == 1:
        return 0
    letters = [c for c in word if c.isalpha()]
    last = letters[-1] if letters else ""
    if last in "aeiouns":
        return len(syllables) - 2
    return len(syllables) - 1


# ---------------------------------------------------------------------------
# English / German fallback splitters
# ---------------------------------------------------------------------------

EN_VOWELS = frozenset("aeiouy")
EN_DIGRAPHS = ("tch", "th", "sh", "ch", "ph", "wh", "ck", "gh", "qu")
EN_OBSTRUENTS = frozenset(("b", "c", "d", "f", "g", "k", "p", "t", "th", "ph"))
DE_VOWELS = frozenset("aeiouyäöü")
DE_DIGRAPHS = ("sch", "ch", "ck", "ph", "th", "qu")
DE_NUCLEI = ("aa", "ee", "oo", "ei", "ai", "au", "eu", "äu", "ie", "ey", "ay")


def _consonant_units(word: str, vowels, digraphs) -> list[tuple[str, bool]]:
    units: list[tuple[str, bool]] = []
    i = 0
    while i < len(word):
        for dg in digraphs:
            if word.startswith(dg, i):
                units.append((dg, False))
                i += len(dg)
                break
        else:
            units.append((word[i], word[i] in vowels))
            i += 1
    return units


def _en_units(word: str) -> list[tuple[str, bool]]:
    units = _consonant_units(word, EN_VOWELS, EN_DIGRAPHS)
    fixed = []
    for k, (u, v) in enumerate(units):
        if u == "y":
            nxt_vowel = k + 1 < len(units) and units[k + 1][1] and units[k + 1][0] != "y"
            v = not (k == 0 or nxt_vowel)
        fixed.append((u, v))
    return fixed


def _runs(units: list[tuple[str, bool]]) -> list[tuple[int, int]]:
    runs, i = [], 0
    while i < len(units):
        if units[i][1]:
            j = i
            while j < len(units) and units[j][1]:
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1
    return runs


def _english(word: str) -> list[str] | None:
    units = _en_units(word)
    nuclei = _runs(units)
    if not nuclei:
        return None
    texts = [u for u, _ in units]
    if len(nuclei) > 1:
        last_start, last_end = nuclei[-1]
        tail = "".join(texts[last_start:])
        before = texts[last_start - 1] if last_start else ""
        before2 = texts[last_start - 2] if last_start >= 2 else ""
        # consonant + l/r before a final e keeps it syllabic: ta-ble, hun-dred, a-cre
        syllabic_l = before in ("l", "r") and before2 and before2 not in EN_VOWELS and before2 != before
        silent = False
        if last_end - last_start == 1 and texts[last_start] == "e":
            if tail == "e":
                silent = not syllabic_l
            elif tail == "ed":
                silent = before not in ("t", "d") and not syllabic_l
            elif tail == "es":
                silent = before not in ("s", "z", "x", "ch", "sh", "g", "c", "tch") and not syllabic_l
        if silent:
            nuclei = nuclei[:-1]

    def split(cluster: list[str]) -> int:
        if len(cluster) <= 1:
            return 0
        # obstruent + l/r stays together: ta-ble, bat-tled, a-cre, hun-dred
        if cluster[-1] == "l" and cluster[-2] != "l":
            return len(cluster) - 2
        if cluster[-1] == "r" and cluster[-2] in EN_OBSTRUENTS:
            return len(cluster) - 2
        return 1

    return _assemble(texts, nuclei, split)


def _german(word: str) -> list[str] | None:
    units = _consonant_units(word, DE_VOWELS, DE_DIGRAPHS)
    nuclei = []
    for start, end in _runs(units):
        k = start
        while k < end:
            pair = units[k][0] + units[k + 1][0] if k + 1 < end else ""
            step = 2 if pair in DE_NUCLEI else 1
            nuclei.append((k, k + step))
            k += step
    if not nuclei:
        return None
    texts = [u for u, _ in units]
    return _assemble(texts, nuclei, lambda c: max(len(c) - 1, 0))


# ---------------------------------------------------------------------------
# best-effort languages
# ---------------------------------------------------------------------------

GENERIC_VOWELS = {
    "fr": "aeiouyàâæéèêëîïôœùûüÿ",
    "it": "aeiouàèéìíòóùú",
    "pt": "aeiouáâãàéêíóôõúü",
    "cs": "aeiouyáéěíóúůý",
    "fi": "aeiouyäöå",
    "hu": "aeiouáéíóöőúüű",
    "ru": "аеёиоуыэюя",
}
# default stress as an offset: 0 = first syllable, -1 = last, -2 = penultimate
GENERIC_STRESS = {"fr": -1, "it": -2, "pt": -2, "cs": 0, "fi": 0, "hu": 0, "ru": -2, "ar": -2, "zh": 0}
ACCENT_STRESS = {"it": ("àèéìíòóùú",), "pt": ("áâàéêíóôú", "ãõ")}
AR_LONG = frozenset("اويىآأإؤئ")


def _is_han(ch: str) -> bool:
    return "\u3400" <= ch <= "\u9fff" or "\uf900" <= ch <= "\ufaff" or "\U00020000" <= ch <= "\U0002ffff"


def _generic(word: str, lang: str) -> list[str] | None:
    if lang == "zh":
        # every Han character is one syllable; non-Han characters ride along
        syllables: list[str] = []
        for ch in word:
            if _is_han(ch) or not syllables:
                syllables.append(ch)
            else:
                syllables[-1] += ch
        if not any(_is_han(c) or c.isalpha() for c in word):
            return None
        return syllables
    if lang == "ar":
        # abjad: each consonant carries an implicit vowel, long vowels and marks attach left
        syllables = []
        for ch in word:
            attach = ch in AR_LONG or unicodedata.category(ch) == "Mn" or not ch.isalpha()
            if syllables and attach:
                syllables[-1] += ch
            else:
                syllables.append(ch)
        if not any(c.isalpha() for c in word):
            return None
        return syllables
    vowels = frozenset(GENERIC_VOWELS[lang])
    units = [(c, c in vowels) for c in word]
    if lang == "cs":
        # syllabic r/l between consonants (vlk, krk)
        for k, (c, _) in enumerate(units):
            if c in "rl":
                left = units[k - 1][1] if k else False
                right = units[k + 1][1] if k + 1 < len(units) else False
                if not left and not right and 0 < k < len(units) - 1:
                    units[k] = (c, True)
    nuclei = _runs(units)
    if lang == "ru":
        # every Cyrillic vowel letter is its own nucleus
        nuclei = [(k, k + 1) for start, end in nuclei for k in range(start, end)]
    if not nuclei:
        return None
    texts = [u for u, _ in units]
    return _assemble(texts, nuclei, lambda c: max(len(c) - 1, 0))


def _generic_stress(syllables: list[str], lang: str) -> int:
    # a written accent marks stress in Italian and Portuguese; tilde only as a fallback
    for marks in ACCENT_STRESS.get(lang, ()):
        for k, syl in enumerate(syllables):
            if any(c in marks for c in syl):
                return k
    offset = GENERIC_STRESS[lang]
    stress = offset if offset >= 0 else max(len(syllables) + offset, 0)
    return min(stress, len(syllables) - 1)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _prepare(word: str) -> str:
    if word is None or not str(word).strip():
        raise EmptyWord("empty word")
    if any(c.isspace() for c in str(word).strip()):
        raise InputError(f"{word!r} is not a single token")
    norm = normalize_word(word)
    if not norm:
        raise EmptyWord(f"{word!r} has no letters")
    return norm


@lru_cache(maxsize=65536)
def _syllabify(norm: str, lang: str, strict: bool) -> WordPhonology:
    if lang not in SCANSION_LANGUAGES:
        if strict:
            raise UnsupportedLanguage(
                f"no scansion-grade phonology for {lang!r}; pass strict=False for a best-effort split"
            )
        syllables = _generic(norm, lang)
        if syllables is None:
            raise NoVowel(f"{norm!r} has no syllabic nucleus")
        return WordPhonology(norm, tuple(syllables), _generic_stress(syllables, lang), True)

    entry = bundled_lexicon(lang).get(norm)
    if entry is not None:
        return WordPhonology(norm, entry[0], entry[1])
    if lang == "es":
        return _spanish(norm)
    syllables = _english(norm) if lang == "en" else _german(norm)
    if syllables is None:
        raise NoVowel(f"{norm!r} has no syllabic nucleus")
    stress = len(syllables) - 2 if len(syllables) >= 2 else 0
    return WordPhonology(norm, tuple(syllables), stress, low_confidence=True)


def syllabify_word(word: str, lang: str, strict: bool = True) -> WordPhonology:
    """Split ``word`` into syllables and locate its lexical stress.

    Function words still get their lexical stress here; demotion happens at
    verse level (see :func:`is_function_word`).

    Raises EmptyWord, NoVowel, UnknownLanguage, and (with ``strict``)
    UnsupportedLanguage for languages outside es/en/de.
    """
    lang = check_language(lang)
    return _syllabify(_prepare(word), lang, strict)


def stress_position(word: str, lang: str, strict: bool = True) -> int:
    """Zero-based index of the stressed syllable of ``word``."""
    return syllabify_word(word, lang, strict).stress_index


def stressed_vowel_index(syllable: str, lang: str = "es") -> int:
    """Position of the vowel carrying the stress inside a syllable's text."""
    vowels = ES_VOWELS | frozenset("y") if lang == "es" else (
        EN_VOWELS if lang == "en" else DE_VOWELS if lang == "de" else frozenset(GENERIC_VOWELS.get(lang, "aeiou"))
    )
    positions = [i for i, c in enumerate(syllable) if c in vowels]
    if lang == "es":
        # mute u of qu/gu is not a nucleus
        positions = [
            i for i in positions
            if not (syllable[i] == "u" and i > 0 and syllable[i - 1] in "qg"
                    and i + 1 < len(syllable) and syllable[i + 1] in "eéií")
        ]
        # y before a vowel is consonantal
        positions = [
            i for i in positions
            if not (syllable[i] == "y" and i + 1 < len(syllable) and syllable[i + 1] in ES_VOWELS)
        ]
    if not positions:
        return 0
    for i in positions:
        if syllable[i] in ES_ACCENTED:
            return i
    if lang == "es":
        strong = [i for i in positions if syllable[i] in "aeo"]
        return strong[0] if strong else positions[-1]
    return positions[0]
