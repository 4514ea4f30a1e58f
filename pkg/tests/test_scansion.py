import pytest
from hypothesis import given, settings, strategies as st

from conftest import EXAMPLE_DE, EXAMPLE_EN, EXAMPLE_ES, SIX_VERSES, read_tsv
from metrica.errors import EmptyVerse, InvalidPattern, UnknownLanguage, WordError
from metrica.scansion import (
    OXYTONE,
    PAROXYTONE,
    PROPAROXYTONE,
    MetricalPattern,
    enumerate_scansions,
    metrical_length_rule,
    phonological_syllables,
    scan_verse,
)


def test_example_spanish():
    res = scan_verse(EXAMPLE_ES, "es", target_length=11)
    assert (res.pattern, res.metrical_length) == ("+--+---+-+-", 11)
    assert res.units == ("cu", "bra", "de", "nie", "ve", "la", "her", "mo", "sa", "cum", "bre")
    assert [d.kind for d in res.devices] == ["synalepha_broken"]


def test_example_english():
    res = scan_verse(EXAMPLE_EN, "en", target_length=10)
    assert (res.pattern, res.metrical_length) == ("-+-+---+-+", 10)
    assert "th'em" in res.units


def test_example_german():
    res = scan_verse(EXAMPLE_DE, "de", target_length=7)
    assert (res.pattern, res.metrical_length) == ("+-+-+-+", 7)


def test_examples_without_target():
    assert scan_verse(EXAMPLE_EN, "en").metrical_length == 10
    assert scan_verse(EXAMPLE_DE, "de").metrical_length == 7
    # default reading applies the la-her synalepha
    assert scan_verse(EXAMPLE_ES, "es").metrical_length == 10


def test_six_verse_lengths():
    assert [scan_verse(v, "es").metrical_length for v in SIX_VERSES] == [8, 8, 6, 8, 8, 6]


def test_phonological_syllables():
    syls = phonological_syllables("vida, muerte, amor.", "es")
    assert [(s.text, s.stressed) for s in syls] == [
        ("vi", True), ("da", False), ("muer", True), ("te", False), ("a", False), ("mor", True)]
    assert [s.word_boundary for s in syls] == [True, False, True, False, True, False]
    mar = phonological_syllables("mar", "es")
    assert len(mar) == 1 and mar[0].stressed
    assert len(phonological_syllables(EXAMPLE_ES, "es")) == 11


def test_enumerate():
    cands = enumerate_scansions("la hermosa", "es")
    assert {len(c.units) for c in cands} >= {3, 4}
    assert len(enumerate_scansions("mar", "es")) == 1
    assert any("th'em" in c.units for c in enumerate_scansions("on th' embattled", "en"))


def test_metrical_length_rule():
    assert metrical_length_rule("+-+-+-+", OXYTONE, "de") == 7
    assert metrical_length_rule("--+-+--", OXYTONE, "es") == 8
    assert metrical_length_rule("--+-+--", PAROXYTONE, "es") == 7
    assert metrical_length_rule("--+-+--", PROPAROXYTONE, "es") == 6
    with pytest.raises(InvalidPattern):
        metrical_length_rule("+x", PAROXYTONE, "es")


def test_pattern_validation():
    assert MetricalPattern("+-") == "+-"
    for bad in ("", "+-x", "ab"):
        with pytest.raises(InvalidPattern):
            MetricalPattern(bad)


def test_errors():
    with pytest.raises(EmptyVerse):
        scan_verse("   ", "es")
    with pytest.raises(EmptyVerse):
        scan_verse("¡...!", "es")
    with pytest.raises(UnknownLanguage):
        scan_verse("mar", "xx")
    with pytest.raises(WordError) as info:
        scan_verse("el mar brr", "es")
    assert info.value.word_index == 2


def test_no_candidate_at_target_is_flagged():
    res = scan_verse("la hermosa", "es", target_length=9)
    assert "no_candidate_at_target" in res.flags
    assert res.metrical_length == 4


def test_cap_is_respected():
    verse = "a e i o u a e i o u a e i o u"
    cands = enumerate_scansions(verse, "es", cap=16)
    assert len(cands) <= 16
    assert all("capped" in c.flags for c in cands)


def test_mente_adverb_keeps_two_stresses():
    res = scan_verse("dulcemente", "es")
    assert res.pattern == "+-+-"


def test_to_dict_schema():
    d = scan_verse(EXAMPLE_ES, "es", target_length=11).to_dict()
    assert list(d) == ["verse", "pattern", "length", "devices"]
    assert d["devices"] == [{"kind": "synalepha_broken", "position": 6}]


def test_hendecasyllable_gold():
    rows = read_tsv("hendecasyllables_es.tsv")
    assert len(rows) >= 50
    hits = sum(scan_verse(v, "es", target_length=11).pattern == p for v, p, _ in rows)
    assert hits / len(rows) >= 0.85


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

VOCAB = ("el la de y a en que los las se un una mar cielo alma amor hermosa aire ola oro agua "
         "hondo humo ira eco canción noche río poesía cuidado ruido fue vio sombra día ave "
         "triste azul suave lágrima héroe baúl ciudad huella hielo este oscuro ahora yo tu su").split()
verses = st.lists(st.sampled_from(VOCAB), min_size=1, max_size=8).map(" ".join)


def _count(cand, kind):
    return sum(1 for d in cand.devices if d.kind == kind)


@settings(max_examples=250, deadline=None)
@given(verses)
def test_property_device_monotonicity(verse):
    base = len(phonological_syllables(verse, "es"))
    for cand in enumerate_scansions(verse, "es"):
        assert len(cand.pattern) == len(cand.units)
        fused = _count(cand, "synalepha") + _count(cand, "syneresis")
        assert len(cand.units) == base - fused + _count(cand, "dieresis")
        assert 0 <= min((d.position for d in cand.devices), default=0)
        assert all(d.position <= len(cand.units) for d in cand.devices)


@settings(max_examples=250, deadline=None)
@given(verses, st.integers(min_value=1, max_value=14))
def test_property_target_satisfaction(verse, target):
    lengths = {c.metrical_length for c in enumerate_scansions(verse, "es")}
    res = scan_verse(verse, "es", target_length=target)
    if target in lengths:
        assert res.metrical_length == target
        assert "no_candidate_at_target" not in res.flags
    else:
        assert "no_candidate_at_target" in res.flags


@settings(max_examples=200, deadline=None)
@given(verses)
def test_property_length_rule_consistency(verse):
    for cand in enumerate_scansions(verse, "es"):
        assert cand.metrical_length == metrical_length_rule(cand.pattern, cand.final_stress, "es")
