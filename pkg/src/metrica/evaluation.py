"""Evaluation metrics: metrical patterns, stanza labels, ROC curves and masked-LM logs.

Every aggregate is built from accumulators that merge exactly (integer
counts, or exactly-rounded float sums), so evaluating shards separately and
merging gives bit-identical results to a single sequential pass.
"""
from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping, Sequence, TextIO

from .errors import (
    DegenerateClass,
    EmptyInput,
    InputError,
    LengthMismatch,
    NonPositiveProbability,
    UnknownLabel,
)
from .scansion import MetricalPattern

PPL_FORMULA = "exp(-mean ln p(gold))"


def percent(x: float) -> str:
    """Two-decimal percentage, the precision used for reported scores."""
    return f"{100 * x:.2f}"


# ---------------------------------------------------------------------------
# accumulators
# ---------------------------------------------------------------------------

@dataclass
class Ratio:
    hits: int = 0
    total: int = 0

    def add(self, hits: int, total: int = 1) -> None:
        self.hits += hits
        self.total += total

    def merge(self, other: "Ratio") -> "Ratio":
        return Ratio(self.hits + other.hits, self.total + other.total)

    @property
    def value(self) -> float:
        if not self.total:
            raise EmptyInput("no items to score")
        return self.hits / self.total


class ExactSum:
    """Float sum kept as non-overlapping partials; the result is exactly rounded."""

    def __init__(self, values: Iterable[float] = ()):
        self.partials: list[float] = []
        for v in values:
            self.add(v)

    def add(self, x: float) -> None:
        # Shewchuk's algorithm, as used by math.fsum
        i = 0
        for y in self.partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                self.partials[i] = lo
                i += 1
            x = hi
        self.partials[i:] = [x]

    def merge(self, other: "ExactSum") -> "ExactSum":
        out = ExactSum(self.partials)
        for p in other.partials:
            out.add(p)
        return out

    @property
    def value(self) -> float:
        return math.fsum(self.partials)


# ---------------------------------------------------------------------------
# metrical patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LabeledPattern:
    verse: str
    gold: str
    predicted: str

    def __post_init__(self):
        MetricalPattern(self.gold)
        MetricalPattern(self.predicted)


@dataclass
class PatternScore:
    exact: Ratio = field(default_factory=Ratio)
    syllables: Ratio = field(default_factory=Ratio)

    def add(self, gold: str, predicted: str) -> None:
        self.exact.add(int(gold == predicted))
        aligned = sum(1 for g, p in zip(gold, predicted) if g == p)
        self.syllables.add(aligned, max(len(gold), len(predicted)))

    def merge(self, other: "PatternScore") -> "PatternScore":
        return PatternScore(self.exact.merge(other.exact), self.syllables.merge(other.syllables))

    @property
    def accuracy(self) -> float:
        return self.exact.value

    @property
    def per_syllable_accuracy(self) -> float:
        return self.syllables.value

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "per_syllable_accuracy": self.per_syllable_accuracy,
                "count": self.exact.total}


def pattern_accuracy(pairs: Iterable[LabeledPattern]) -> PatternScore:
    """Exact-match accuracy; the unaligned tail of a length mismatch counts as wrong per syllable."""
    score = PatternScore()
    for pair in pairs:
        score.add(pair.gold, pair.predicted)
    if not score.exact.total:
        raise EmptyInput("no patterns to score")
    return score


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class ClassificationReport:
    macro_f1: float
    accuracy: float
    per_class: dict[Hashable, ClassScores]
    confusion: Counter

    def to_dict(self) -> dict:
        return {
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "per_class": {str(k): vars(v) for k, v in self.per_class.items()},
        }


def classification_report(gold: Sequence[Hashable], predicted: Sequence[Hashable],
                          label_set: Iterable[Hashable] | None = None) -> ClassificationReport:
    """Macro F1 over classes seen in gold or predictions, plus accuracy."""
    gold, predicted = list(gold), list(predicted)
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold labels but {len(predicted)} predictions")
    if not gold:
        raise EmptyInput("no labels to score")
    if label_set is not None:
        allowed = set(label_set)
        for lab in gold + predicted:
            if lab not in allowed:
                raise UnknownLabel(f"label {lab!r} is not in the label set")
    confusion = Counter(zip(gold, predicted))
    gold_count, pred_count = Counter(gold), Counter(predicted)
    # classes with neither gold nor predicted items would be 0/0 and are left out
    classes = sorted(set(gold_count) | set(pred_count), key=str)
    per_class = {}
    for c in classes:
        tp = confusion[(c, c)]
        p = tp / pred_count[c] if pred_count[c] else 0.0
        r = tp / gold_count[c] if gold_count[c] else 0.0
        f1 = 2 * tp / (gold_count[c] + pred_count[c])
        per_class[c] = ClassScores(p, r, f1, gold_count[c])
    macro = math.fsum(s.f1 for s in per_class.values()) / len(per_class)
    accuracy = sum(confusion[(c, c)] for c in classes) / len(gold)
    return ClassificationReport(macro, accuracy, per_class, confusion)


# ---------------------------------------------------------------------------
# ROC
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]
    thresholds: tuple[float, ...]
    auc: float

    def to_dict(self) -> dict:
        return {"auc": self.auc, "fpr": [p[0] for p in self.points],
                "tpr": [p[1] for p in self.points], "thresholds": list(self.thresholds)}


def _class_score(item: Any, cls: Hashable) -> float:
    if isinstance(item, Mapping):
        if cls not in item:
            raise InputError(f"no score for class {cls!r}")
        return float(item[cls])
    return float(item)


def roc_auc_one_vs_rest(scores: Sequence[Any], gold: Sequence[Hashable], cls: Hashable) -> RocCurve:
    """ROC of ``cls`` against the rest; ``scores`` holds per-item class mappings or plain scores."""
    if len(scores) != len(gold):
        raise LengthMismatch(f"{len(scores)} score rows but {len(gold)} labels")
    values = [_class_score(s, cls) for s in scores]
    if any(math.isnan(v) for v in values):
        raise InputError("NaN score")
    pos = sum(1 for g in gold if g == cls)
    neg = len(gold) - pos
    if not pos or not neg:
        raise DegenerateClass(f"class {cls!r} has {pos} positive and {neg} negative items")

    by_score: dict[float, list[int]] = defaultdict(lambda: [0, 0])
    for v, g in zip(values, gold):
        by_score[v][0 if g == cls else 1] += 1
    tp = fp = 0
    points = [(0.0, 0.0)]
    thresholds = [math.inf]
    area = Fraction(0)
    for threshold in sorted(by_score, reverse=True):
        dtp, dfp = by_score[threshold]
        area += Fraction(dfp * (2 * tp + dtp), 2)
        tp, fp = tp + dtp, fp + dfp
        points.append((fp / neg, tp / pos))
        thresholds.append(threshold)
    return RocCurve(tuple(points), tuple(thresholds), float(area / (pos * neg)))


# ---------------------------------------------------------------------------
# masked language model logs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PredictionRecord:
    language: str
    masked_positions: tuple[int, ...]
    gold_tokens: tuple[str, ...]
    gold_token_probabilities: tuple[float, ...]
    predicted_tokens: tuple[str, ...]

    def __post_init__(self):
        n = len(self.masked_positions)
        if not (len(self.gold_tokens) == len(self.gold_token_probabilities) == len(self.predicted_tokens) == n):
            raise LengthMismatch("prediction record arrays differ in length")
        for p in self.gold_token_probabilities:
            if not p > 0:
                raise NonPositiveProbability(f"probability {p} is not positive")
            if p > 1:
                raise InputError(f"probability {p} exceeds 1")

    @classmethod
    def from_dict(cls, data: Mapping) -> "PredictionRecord":
        try:
            probs = data.get("gold_token_probabilities", data.get("predicted_token_probabilities"))
            return cls(
                str(data["language"]),
                tuple(int(i) for i in data["masked_positions"]),
                tuple(data["gold_tokens"]),
                tuple(float(p) for p in probs),
                tuple(data["predicted_tokens"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed prediction record: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "masked_positions": list(self.masked_positions),
            "gold_tokens": list(self.gold_tokens),
            "gold_token_probabilities": list(self.gold_token_probabilities),
            "predicted_tokens": list(self.predicted_tokens),
        }


@dataclass
class MlmScore:
    per_language: dict[str, Ratio] = field(default_factory=dict)

    def add(self, record: PredictionRecord) -> None:
        hits = sum(1 for g, p in zip(record.gold_tokens, record.predicted_tokens) if g == p)
        self.per_language.setdefault(record.language, Ratio()).add(hits, len(record.gold_tokens))

    def merge(self, other: "MlmScore") -> "MlmScore":
        out = MlmScore({k: Ratio(v.hits, v.total) for k, v in self.per_language.items()})
        for k, v in other.per_language.items():
            out.per_language[k] = out.per_language.get(k, Ratio()).merge(v)
        return out

    @property
    def overall(self) -> float:
        total = Ratio()
        for r in self.per_language.values():
            total = total.merge(r)
        return total.value

    def accuracies(self) -> dict[str, float]:
        return {k: v.value for k, v in sorted(self.per_language.items()) if v.total}


def mlm_accuracy(records: Iterable[PredictionRecord]) -> MlmScore:
    """Top-1 accuracy at masked positions, micro-averaged within each language."""
    score = MlmScore()
    for record in records:
        score.add(record)
    if not any(r.total for r in score.per_language.values()):
        raise EmptyInput("no masked positions to score")
    return score


@dataclass
class PerplexityAccumulator:
    neg_log: dict[str, ExactSum] = field(default_factory=dict)
    counts: Counter = field(default_factory=Counter)

    def add(self, record: PredictionRecord) -> None:
        acc = self.neg_log.setdefault(record.language, ExactSum())
        for p in record.gold_token_probabilities:
            acc.add(-math.log(p))
        self.counts[record.language] += len(record.gold_token_probabilities)

    def merge(self, other: "PerplexityAccumulator") -> "PerplexityAccumulator":
        out = PerplexityAccumulator({k: ExactSum(v.partials) for k, v in self.neg_log.items()}, Counter(self.counts))
        for k, v in other.neg_log.items():
            out.neg_log[k] = out.neg_log.get(k, ExactSum()).merge(v)
        out.counts.update(other.counts)
        return out

    def values(self) -> dict[str, float]:
        return {k: math.exp(self.neg_log[k].value / self.counts[k])
                for k in sorted(self.neg_log) if self.counts[k]}


def pseudo_perplexity(records: Iterable[PredictionRecord]) -> dict[str, float]:
    """Per-language exp of the mean negative log-probability of the gold tokens."""
    acc = PerplexityAccumulator()
    for record in records:
        acc.add(record)
    out = acc.values()
    if not out:
        raise EmptyInput("no masked positions to score")
    return out


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def _jsonl(fh: TextIO) -> Iterable[tuple[int, dict]]:
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise InputError(f"line {lineno}: expected a JSON object")
        yield lineno, obj


def read_patterns(fh: TextIO) -> list[dict]:
    """Metrical pattern lines: {verse, language, pattern}."""
    out = []
    for lineno, obj in _jsonl(fh):
        if "pattern" not in obj:
            raise InputError(f"line {lineno}: missing 'pattern'")
        MetricalPattern(obj["pattern"])
        out.append(obj)
    return out


def pair_patterns(gold: Sequence[dict], predicted: Sequence[dict]) -> list[LabeledPattern]:
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold patterns but {len(predicted)} predictions")
    pairs = []
    for i, (g, p) in enumerate(zip(gold, predicted)):
        if "verse" in g and "verse" in p and g["verse"] != p["verse"]:
            raise InputError(f"item {i}: verse {p['verse']!r} does not match gold {g['verse']!r}")
        pairs.append(LabeledPattern(g.get("verse", ""), g["pattern"], p["pattern"]))
    return pairs


def read_predictions(fh: TextIO) -> Iterable[PredictionRecord]:
    for lineno, obj in _jsonl(fh):
        try:
            yield PredictionRecord.from_dict(obj)
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from None


def read_stanza_labels(fh: TextIO) -> list[dict]:
    """Stanza label lines: {stanza_id, gold, predicted, scores?}."""
    out = []
    for lineno, obj in _jsonl(fh):
        if "gold" not in obj or "predicted" not in obj:
            raise InputError(f"line {lineno}: needs 'gold' and 'predicted'")
        out.append(obj)
    return out
