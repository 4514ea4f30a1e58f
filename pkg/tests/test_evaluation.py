import io
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from metrica.errors import (
    DegenerateClass,
    EmptyInput,
    InputError,
    InvalidPattern,
    LengthMismatch,
    NonPositiveProbability,
    UnknownLabel,
)
from metrica.evaluation import (
    ExactSum,
    LabeledPattern,
    PerplexityAccumulator,
    PredictionRecord,
    classification_report,
    mlm_accuracy,
    pair_patterns,
    pattern_accuracy,
    percent,
    pseudo_perplexity,
    read_patterns,
    read_predictions,
    roc_auc_one_vs_rest,
)

ENGINEERED_GOLD = list("cdaccedaecb")
ENGINEERED_PRED = list("edbacedbecb")


def test_pattern_accuracy():
    score = pattern_accuracy([LabeledPattern("a", "+-+-+", "+-+-+"), LabeledPattern("b", "+-+-+", "--+--")])
    assert score.accuracy == 0.5
    assert score.per_syllable_accuracy == pytest.approx(0.8)
    assert percent(score.accuracy) == "50.00"


def test_pattern_length_mismatch_counts_tail_wrong():
    score = pattern_accuracy([LabeledPattern("a", "+-+", "+-")])
    assert score.accuracy == 0
    assert score.per_syllable_accuracy == pytest.approx(2 / 3)


def test_pattern_errors():
    with pytest.raises(EmptyInput):
        pattern_accuracy([])
    with pytest.raises(InvalidPattern):
        LabeledPattern("a", "+x", "+-")
    with pytest.raises(LengthMismatch):
        pair_patterns([{"pattern": "+-"}], [])
    with pytest.raises(InputError):
        pair_patterns([{"verse": "a", "pattern": "+-"}], [{"verse": "b", "pattern": "+-"}])


def _oracle_report(gold, pred):
    """Macro F1 from precision and recall as exact fractions."""
    classes = set(gold) | set(pred)
    f1s = []
    for c in classes:
        tp = sum(1 for g, p in zip(gold, pred) if g == p == c)
        npred = sum(1 for p in pred if p == c)
        ngold = sum(1 for g in gold if g == c)
        prec = Fraction(tp, npred) if npred else Fraction(0)
        rec = Fraction(tp, ngold) if ngold else Fraction(0)
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec else Fraction(0))
    acc = Fraction(sum(g == p for g, p in zip(gold, pred)), len(gold))
    return sum(f1s) / len(f1s), acc


HAND_CASES = [
    ("aabb", "abbb", Fraction(11, 15), Fraction(3, 4)),
    (ENGINEERED_GOLD, ENGINEERED_PRED, Fraction(89, 150), Fraction(7, 11)),
    ("xyz", "xyz", Fraction(1), Fraction(1)),
    ("ab", "ba", Fraction(0), Fraction(0)),
    ("aaa", "aab", Fraction(2, 5), Fraction(2, 3)),
    ("abcabc", "abccab", Fraction(1, 2), Fraction(1, 2)),
]


@pytest.mark.parametrize("gold,pred,macro,acc", HAND_CASES)
def test_hand_confusions(gold, pred, macro, acc):
    report = classification_report(list(gold), list(pred))
    assert report.macro_f1 == pytest.approx(float(macro), abs=1e-12)
    assert report.accuracy == pytest.approx(float(acc), abs=1e-12)
    assert _oracle_report(list(gold), list(pred)) == (macro, acc)


def test_engineered_report_prints_table_values():
    report = classification_report(ENGINEERED_GOLD, ENGINEERED_PRED)
    assert (percent(report.macro_f1), percent(report.accuracy)) == ("59.33", "63.64")
    f1 = {c: s.f1 for c, s in report.per_class.items()}
    assert f1 == pytest.approx({"a": 0, "b": 0.5, "c": 2 / 3, "d": 1, "e": 0.8})


def test_report_errors():
    with pytest.raises(LengthMismatch):
        classification_report(["a"], [])
    with pytest.raises(EmptyInput):
        classification_report([], [])
    with pytest.raises(UnknownLabel):
        classification_report(["a"], ["z"], label_set=["a", "b"])
    d = classification_report(["a", "b"], ["a", "a"]).to_dict()
    assert set(d) >= {"macro_f1", "accuracy", "per_class"}


def _mann_whitney(scores, positive):
    pos = [s for s, y in zip(scores, positive) if y]
    neg = [s for s, y in zip(scores, positive) if not y]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def test_roc_against_mann_whitney():
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randint(2, 40)
        gold = [rng.choice("xyz") for _ in range(n)]
        gold[0], gold[1] = "x", "y"
        scores = [round(rng.random(), 1) for _ in range(n)]
        curve = roc_auc_one_vs_rest(scores, gold, "x")
        assert abs(curve.auc - _mann_whitney(scores, [g == "x" for g in gold])) <= 1e-9


def test_roc_properties():
    gold = ["p", "n", "p", "n", "p"]
    scores = [0.9, 0.1, 0.4, 0.6, 0.8]
    auc = roc_auc_one_vs_rest(scores, gold, "p").auc
    assert roc_auc_one_vs_rest([-s for s in scores], gold, "p").auc == pytest.approx(1 - auc)
    assert roc_auc_one_vs_rest([0.5] * 5, gold, "p").auc == 0.5
    assert roc_auc_one_vs_rest([{"p": s} for s in scores], gold, "p").auc == auc
    curve = roc_auc_one_vs_rest(scores, gold, "p")
    assert curve.points[0] == (0.0, 0.0) and curve.points[-1] == (1.0, 1.0)


def test_roc_errors():
    with pytest.raises(DegenerateClass):
        roc_auc_one_vs_rest([0.1, 0.2], ["a", "a"], "a")
    with pytest.raises(DegenerateClass):
        roc_auc_one_vs_rest([0.1, 0.2], ["a", "b"], "c")
    with pytest.raises(LengthMismatch):
        roc_auc_one_vs_rest([0.1], ["a", "b"], "a")


def _rec(lang, gold, pred, probs):
    return PredictionRecord(lang, tuple(range(len(gold))), tuple(gold), tuple(probs), tuple(pred))


def test_mlm_accuracy():
    score = mlm_accuracy([_rec("es", "abcd", "abcx", [0.5] * 4)])
    assert score.overall == 0.75
    assert score.accuracies() == {"es": 0.75}
    both = mlm_accuracy([_rec("es", "ab", "ab", [0.5] * 2), _rec("en", "abcd", "xxxx", [0.5] * 4)])
    assert both.accuracies() == {"en": 0.0, "es": 1.0}
    assert both.overall == pytest.approx(2 / 6)


def test_pseudo_perplexity():
    assert pseudo_perplexity([_rec("es", "ab", "ab", [1 / math.e] * 2)])["es"] == pytest.approx(math.e)
    for v in (2, 7, 50000):
        assert pseudo_perplexity([_rec("de", "abc", "abc", [1 / v] * 3)])["de"] == pytest.approx(v)
    assert pseudo_perplexity([_rec("en", "a", "a", [1.0])])["en"] == 1.0


def test_prediction_errors():
    with pytest.raises(NonPositiveProbability):
        _rec("es", "a", "a", [0.0])
    with pytest.raises(InputError):
        _rec("es", "a", "a", [1.5])
    with pytest.raises(LengthMismatch):
        PredictionRecord("es", (0, 1), ("a",), (0.5,), ("a",))
    with pytest.raises(EmptyInput):
        mlm_accuracy([])
    with pytest.raises(EmptyInput):
        pseudo_perplexity([])


def test_readers():
    rec = _rec("es", "ab", "ab", [0.5, 0.25])
    back = list(read_predictions(io.StringIO(json.dumps(rec.to_dict()) + "\n\n")))
    assert back == [rec]
    with pytest.raises(InputError):
        list(read_predictions(io.StringIO("{bad\n")))
    assert read_patterns(io.StringIO('{"verse": "x", "pattern": "+-"}\n'))[0]["pattern"] == "+-"
    with pytest.raises(InvalidPattern):
        read_patterns(io.StringIO('{"verse": "x", "pattern": "+?"}\n'))


def test_merge_is_bit_identical():
    rng = random.Random(3)
    probs = [rng.random() * 0.99 + 0.005 for _ in range(2000)]
    recs = [_rec("es", "a", "a", [p]) for p in probs]
    whole = PerplexityAccumulator()
    left, right = PerplexityAccumulator(), PerplexityAccumulator()
    for i, r in enumerate(recs):
        whole.add(r)
        (left if i % 3 else right).add(r)
    assert left.merge(right).values() == whole.values()
    assert right.merge(left).values() == whole.values()


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

labels = st.lists(st.tuples(st.sampled_from("abcde"), st.sampled_from("abcde")), min_size=1, max_size=40)


@settings(max_examples=250, deadline=None)
@given(labels, st.randoms(use_true_random=False))
def test_property_report_is_permutation_invariant(pairs, rnd):
    gold, pred = [g for g, _ in pairs], [p for _, p in pairs]
    base = classification_report(gold, pred)
    shuffled = pairs[:]
    rnd.shuffle(shuffled)
    other = classification_report([g for g, _ in shuffled], [p for _, p in shuffled])
    assert other.macro_f1 == base.macro_f1
    assert other.accuracy == base.accuracy
    macro, acc = _oracle_report(gold, pred)
    assert base.macro_f1 == pytest.approx(float(macro), abs=1e-12)
    assert base.accuracy == pytest.approx(float(acc), abs=1e-12)


@settings(max_examples=250, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.booleans()), min_size=2, max_size=40))
def test_property_roc_matches_mann_whitney(items):
    scores = [s for s, _ in items]
    gold = ["p" if y else "n" for _, y in items]
    if len(set(gold)) < 2:
        return
    auc = roc_auc_one_vs_rest(scores, gold, "p").auc
    assert abs(auc - _mann_whitney(scores, [y for _, y in items])) <= 1e-9


prob = st.floats(min_value=1e-6, max_value=1.0)


@settings(max_examples=250, deadline=None)
@given(st.lists(prob, min_size=1, max_size=30), st.floats(min_value=0.01, max_value=1.0))
def test_property_perplexity_monotone(probs, factor):
    base = pseudo_perplexity([_rec("es", "a" * len(probs), "a" * len(probs), probs)])["es"]
    lower = [max(p * factor, 1e-300) for p in probs]
    worse = pseudo_perplexity([_rec("es", "a" * len(probs), "a" * len(probs), lower)])["es"]
    assert worse >= base * (1 - 1e-12)
    assert base >= 1.0 - 1e-12


@settings(max_examples=250, deadline=None)
@given(st.lists(st.floats(min_value=-1e300, max_value=1e300), max_size=50), st.integers(0, 50))
def test_property_exact_sum_matches_fsum(values, cut):
    assert ExactSum(values).value == math.fsum(values)
    merged = ExactSum(values[:cut]).merge(ExactSum(values[cut:]))
    assert merged.value == math.fsum(values)
