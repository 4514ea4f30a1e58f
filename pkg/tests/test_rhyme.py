import string

import pytest
from hypothesis import given, settings, strategies as st

from conftest import SIX_VERSES
from metrica.errors import InputError, NoStressedSyllable, TooFewVerses
from metrica.rhyme import (
    ASSONANCE,
    CONSONANCE,
    RhymeEnding,
    RhymeScheme,
    detect_rhyme_scheme,
    rhyme_ending,
    rhyme_match,
    scheme_from_endings,
    schemes_equivalent,
)


def test_endings():
    assert rhyme_ending("Escribí en el arenal", "es") == RhymeEnding("al", "a")
    assert rhyme_ending("vida, muerte, amor.", "es") == RhymeEnding("or", "o")
    assert rhyme_ending("mar", "es") == RhymeEnding("ar", "a")
    assert rhyme_ending("vino y nos borró.", "es") == RhymeEnding("o", "o")


def test_spanish_folding():
    assert rhyme_ending("sabe", "es").full == rhyme_ending("nave", "es").full
    assert rhyme_ending("quiero", "es").full == "ero"
    assert rhyme_ending("aquí", "es").full == "i"
    # -í and -i endings compare equal once accents are folded
    assert rhyme_ending("aquí", "es") == rhyme_ending("allí", "es")


def test_assonance_vowels():
    assert rhyme_ending("memoria", "es").vowels_only == "oa"
    assert rhyme_ending("agua", "es").vowels_only == "aa"
    assert rhyme_ending("pájaro", "es").vowels_only == "ao"
    assert rhyme_ending("lágrima", "es").vowels_only == "aa"


def test_ending_invariants():
    for verse in SIX_VERSES + ["la luz del alba", "the light", "die Nacht"]:
        lang = "en" if verse.startswith("the") else "de" if verse.startswith("die") else "es"
        end = rhyme_ending(verse, lang)
        assert end.vowels_only
        it = iter(end.full)
        assert all(c in it for c in end.vowels_only)


def test_match():
    al, ar = RhymeEnding("al", "a"), RhymeEnding("ar", "a")
    assert rhyme_match(al, ar, ASSONANCE)
    assert not rhyme_match(al, ar, CONSONANCE)
    assert rhyme_match(al, al, CONSONANCE) and rhyme_match(al, al, ASSONANCE)
    with pytest.raises(InputError):
        rhyme_match(al, ar, "slant")


def test_six_verse_scheme():
    scheme = detect_rhyme_scheme(SIX_VERSES, "es", [8, 8, 6, 8, 8, 6])
    assert str(scheme) == "a-baab"
    assert scheme.rhyme_type == ASSONANCE


def test_simple_schemes():
    assert str(detect_rhyme_scheme(["el prado verde", "el prado verde"], "es", [8, 8])) == "aa"
    quatrain = ["el campo amado", "la vida perdida", "el sol dorado", "la flor querida"]
    scheme = detect_rhyme_scheme(quatrain, "es", [11] * 4)
    assert str(scheme) == "ABAB" and scheme.rhyme_type == CONSONANCE
    none = detect_rhyme_scheme(["mar", "sol", "luz"], "es", [8, 8, 8])
    assert str(none) == "---" and none.rhyme_type == "none"


def test_errors():
    with pytest.raises(TooFewVerses):
        detect_rhyme_scheme(["mar"], "es", [1])
    with pytest.raises(InputError):
        detect_rhyme_scheme(["mar", "sol"], "es", [1])
    with pytest.raises(InputError):
        rhyme_ending("", "es")


def test_many_groups_use_double_letters():
    endings = [RhymeEnding(f"{a}{b}{c}", f"{a}{b}{c}") for a in "aei" for b in "aei" for c in "aei"] * 2
    scheme = scheme_from_endings(endings, [8] * len(endings))
    assert scheme.labels[25] == "z" and scheme.labels[26] == "aa"


def test_equivalence_helper():
    assert schemes_equivalent("abab", "baba")
    assert schemes_equivalent("ABAB", "abab")
    assert not schemes_equivalent("abab", "abba")
    assert RhymeScheme(tuple("cdcd"), CONSONANCE).canonical() == "abab"


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _union_find_groups(endings, mode):
    parent = list(range(len(endings)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(endings)):
        for j in range(i + 1, len(endings)):
            if rhyme_match(endings[i], endings[j], mode):
                parent[find(j)] = find(i)
    return [find(i) for i in range(len(endings))]


def _oracle(endings, lengths):
    cons = _union_find_groups(endings, CONSONANCE)
    asso = _union_find_groups(endings, ASSONANCE)
    switch = any(cons.count(cons[i]) == 1 and asso.count(asso[i]) > 1 for i in range(len(endings)))
    roots = asso if switch else cons
    names, labels = {}, []
    for root, n in zip(roots, lengths):
        if roots.count(root) == 1:
            labels.append("-")
            continue
        names.setdefault(root, string.ascii_lowercase[len(names)])
        labels.append(names[root] if n <= 8 else names[root].upper())
    return "".join(labels)


FIXTURE_STANZAS = [
    (SIX_VERSES, [8, 8, 6, 8, 8, 6]),
    (["en el campo amado", "la vida perdida", "un sol dorado", "la flor querida"], [11] * 4),
    (["la luna", "el mar", "la cuna", "cantar"], [8, 8, 8, 8]),
    (["yo canto", "el llanto", "la casa", "que pasa", "el viento"], [8, 8, 11, 11, 8]),
    (["mar", "sol", "luz", "paz", "dios"], [8] * 5),
]


@pytest.mark.parametrize("verses,lengths", FIXTURE_STANZAS)
def test_scheme_matches_oracle(verses, lengths):
    endings = [rhyme_ending(v, "es") for v in verses]
    assert str(detect_rhyme_scheme(verses, "es", lengths)) == _oracle(endings, lengths)


WORDS = ("amor dolor mar cantar vida herida luna cuna sol alma calma cielo suelo noche coche "
         "agua fragua pena cadena fuego ruego verdad ciudad flor temor rosa hermosa llanto canto "
         "aquí allí memoria gloria pájaro cántaro luz cruz").split()


@settings(max_examples=250, deadline=None)
@given(st.lists(st.sampled_from(WORDS), min_size=2, max_size=8),
       st.lists(st.integers(min_value=4, max_value=14), min_size=8, max_size=8))
def test_property_scheme_matches_oracle(words, lengths):
    lengths = lengths[:len(words)]
    endings = [rhyme_ending(w, "es") for w in words]
    scheme = scheme_from_endings(endings, lengths)
    assert str(scheme) == _oracle(endings, lengths)
    # verses that share a label rhyme under the reported mode
    mode = ASSONANCE if scheme.rhyme_type in (ASSONANCE, "mixed") else CONSONANCE
    for i, a in enumerate(scheme.labels):
        for j, b in enumerate(scheme.labels):
            if a != "-" and a.lower() == b.lower():
                assert rhyme_match(endings[i], endings[j], mode)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(WORDS), st.sampled_from(WORDS), st.sampled_from(WORDS))
def test_property_equivalence_laws(a, b, c):
    ea, eb, ec = (rhyme_ending(w, "es") for w in (a, b, c))
    for mode in (CONSONANCE, ASSONANCE):
        assert rhyme_match(ea, ea, mode)
        assert rhyme_match(ea, eb, mode) == rhyme_match(eb, ea, mode)
        if rhyme_match(ea, eb, mode) and rhyme_match(eb, ec, mode):
            assert rhyme_match(ea, ec, mode)
    if rhyme_match(ea, eb, CONSONANCE):
        assert rhyme_match(ea, eb, ASSONANCE)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="aeioubcdlmnrst", min_size=1, max_size=6),
       st.text(alphabet="aeioubcdlmnrst", min_size=1, max_size=6))
def test_property_consonance_implies_assonance_on_free_words(a, b):
    try:
        ea, eb = rhyme_ending("la" + a, "es"), rhyme_ending("la" + b, "es")
    except NoStressedSyllable:
        return
    if rhyme_match(ea, eb, CONSONANCE):
        assert rhyme_match(ea, eb, ASSONANCE)
