"""Command-line interface.

Exit codes: 0 on success, 1 on bad input data, 2 on usage errors.
Results go to stdout and diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from functools import partial
from pathlib import Path
from typing import Callable, Iterable, Iterator, TextIO

from . import corpus, evaluation
from .errors import InputError
from .phonology import LANGUAGES
from .scansion import DEFAULT_CAP, scan_verse
from .stanza import analyze_stanza, classify_stanza, default_catalog, load_catalog, UNKNOWN


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _open_in(path: str | None):
    if path is None or path == "-":
        return nullcontext(sys.stdin)
    return open(path, encoding="utf-8")


def _open_out(path: str | None):
    if path is None or path == "-":
        return nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False)


def _stanzas(fh: TextIO) -> Iterator[list[str]]:
    """Blank-line separated blocks of non-empty lines."""
    block: list[str] = []
    for line in fh:
        line = line.rstrip("\n")
        if line.strip():
            block.append(line.strip())
        elif block:
            yield block
            block = []
    if block:
        yield block


def _pmap(func: Callable, items: Iterable, jobs: int) -> Iterator:
    """Order-preserving map, in worker processes when jobs > 1."""
    if jobs <= 1:
        for item in items:
            yield func(item)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(func, items, chunksize=64)


def _guard(func: Callable, item):
    """Run ``func`` and hand back (result, error message) so workers never raise."""
    try:
        return func(item), None
    except InputError as exc:
        return None, str(exc)


def _lang(args) -> str:
    if args.lang is None:
        raise InputError("--lang is required for this command")
    return args.lang


# ---------------------------------------------------------------------------
# scan / rhyme / stanza
# ---------------------------------------------------------------------------

def _scan_one(verse: str, lang: str, target: int | None, cap: int, strict: bool) -> dict:
    return scan_verse(verse, lang, target_length=target, cap=cap, strict=strict).to_dict()


def cmd_scan(args) -> int:
    lang = _lang(args)
    func = partial(_guard, partial(_scan_one, lang=lang, target=args.target_length,
                                   cap=args.cap, strict=args.strict_languages))
    status = 0
    with _open_in(args.input) as fh:
        lines = [(i, line.strip()) for i, line in enumerate(fh, 1)]
    lines = [(i, v) for i, v in lines if v]
    for (lineno, verse), (result, error) in zip(lines, _pmap(func, [v for _, v in lines], args.jobs)):
        if error is not None:
            print(f"error: line {lineno}: {error}", file=sys.stderr)
            status = 1
            continue
        if args.json:
            print(_dump(result))
        else:
            print(f"{result['pattern']} {result['length']}")
    return status


def _analyze_one(verses: list[str], lang: str, strict: bool, catalog=None) -> dict:
    analysis = analyze_stanza(verses, lang, strict=strict)
    out = analysis.to_dict()
    if catalog is not None:
        out["candidates"] = [{"name": n, "score": s} for n, s in classify_stanza(analysis, catalog)]
    return out


def _run_stanzas(args, catalog=None) -> int:
    lang = _lang(args)
    func = partial(_guard, partial(_analyze_one, lang=lang, strict=args.strict_languages, catalog=catalog))
    status = 0
    with _open_in(args.input) as fh:
        blocks = list(_stanzas(fh))
    first = True
    for idx, (result, error) in enumerate(_pmap(func, blocks, args.jobs)):
        if error is not None:
            print(f"error: stanza {idx}: {error}", file=sys.stderr)
            status = 1
            continue
        if args.json:
            print(_dump({"stanza": idx, **result}))
            continue
        if catalog is not None:
            names = [c["name"] for c in result["candidates"]]
            print(f"{result['annotation']}\t{names[0] if names else UNKNOWN}")
            continue
        if not first:
            print()
        first = False
        for verse, item in zip(result["verses"], result["annotation"].split()):
            print(f"{verse}\t{item}")
    return status


def cmd_rhyme(args) -> int:
    return _run_stanzas(args)


def cmd_stanza_classify(args) -> int:
    catalog = load_catalog(args.catalog) if args.catalog else default_catalog()
    return _run_stanzas(args, catalog)


def cmd_stanza_catalog(args) -> int:
    catalog = load_catalog(args.catalog) if args.catalog else default_catalog()
    for rule in catalog:
        print(rule.to_line())
    return 0


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def _read_records(path: str | None) -> Iterator:
    with _open_in(path) as fh:
        yield from corpus.read_jsonl(fh)


def _report_stats(stats: corpus.CorpusStats, as_json: bool, stream: TextIO) -> None:
    print(_dump(stats.to_dict()) if as_json else stats.format_table(), file=stream)


def cmd_corpus_build(args) -> int:
    records = corpus.read_corpus(args.in_path, args.format, args.lang, args.source)
    survivors, stats = corpus.dedup_corpus(records)
    with _open_out(args.out) as out:
        corpus.write_jsonl(survivors, out)
    _report_stats(stats, args.json, sys.stderr)
    return 0


def cmd_corpus_dedup(args) -> int:
    survivors, stats = corpus.dedup_corpus(_read_records(args.input))
    with _open_out(args.out) as out:
        corpus.write_jsonl(survivors, out)
    _report_stats(stats, args.json, sys.stderr)
    return 0


def cmd_corpus_stats(args) -> int:
    stats = corpus.corpus_stats(_read_records(args.input))
    _report_stats(stats, args.json, sys.stdout)
    return 0


def _fractions(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fractions {text!r}") from None


def cmd_corpus_split(args) -> int:
    records = [r for r in _read_records(args.input) if r is not None]
    parts = corpus.split_dataset(records, args.fractions, seed=args.seed,
                                 group_by=args.group_by, preset=args.preset)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sizes = {}
    for name, part in zip(corpus.SPLIT_NAMES, parts):
        with open(out_dir / f"{name}.jsonl", "w", encoding="utf-8") as fh:
            sizes[name] = corpus.write_jsonl(part, fh)
    if args.json:
        print(_dump(sizes))
    else:
        for name, n in sizes.items():
            print(f"{name} {n}")
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def cmd_eval_meter(args) -> int:
    with _open_in(args.gold) as fh:
        gold = evaluation.read_patterns(fh)
    with _open_in(args.pred) as fh:
        pred = evaluation.read_patterns(fh)
    score = evaluation.pattern_accuracy(evaluation.pair_patterns(gold, pred))
    if args.json:
        print(_dump(score.to_dict()))
    else:
        print(f"accuracy {evaluation.percent(score.accuracy)}")
        print(f"per_syllable_accuracy {evaluation.percent(score.per_syllable_accuracy)}")
    return 0


def cmd_eval_stanza(args) -> int:
    with _open_in(args.input) as fh:
        rows = evaluation.read_stanza_labels(fh)
    labels = None
    if args.labels:
        with open(args.labels, encoding="utf-8") as fh:
            labels = [line.strip() for line in fh if line.strip()]
    report = evaluation.classification_report([r["gold"] for r in rows], [r["predicted"] for r in rows], labels)
    if args.json:
        print(_dump(report.to_dict()))
    else:
        print(f"macro_f1 {evaluation.percent(report.macro_f1)}")
        print(f"accuracy {evaluation.percent(report.accuracy)}")
    return 0


def cmd_eval_roc(args) -> int:
    with _open_in(args.input) as fh:
        rows = evaluation.read_stanza_labels(fh)
    if any("scores" not in r for r in rows):
        raise InputError("ROC needs per-class 'scores' on every line; hard labels are not enough")
    curve = evaluation.roc_auc_one_vs_rest([r["scores"] for r in rows], [r["gold"] for r in rows], args.class_name)
    if args.json:
        print(_dump({"class": args.class_name, **curve.to_dict()}))
    else:
        print(f"auc {curve.auc:.2f}")
    return 0


def cmd_eval_mlm(args) -> int:
    with _open_in(args.input) as fh:
        score = evaluation.mlm_accuracy(evaluation.read_predictions(fh))
    if args.json:
        print(_dump({"per_language": score.accuracies(), "overall": score.overall}))
    else:
        for lang, value in score.accuracies().items():
            print(f"{lang} {evaluation.percent(value)}")
        print(f"overall {evaluation.percent(score.overall)}")
    return 0


def cmd_eval_ppl(args) -> int:
    with _open_in(args.input) as fh:
        values = evaluation.pseudo_perplexity(evaluation.read_predictions(fh))
    if args.json:
        print(_dump({"formula": evaluation.PPL_FORMULA, "per_language": values}))
    else:
        for lang, value in values.items():
            print(f"{lang} {value:.2f}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {n}")
    return n


def _common(suppress: bool) -> argparse.ArgumentParser:
    """Global flags, accepted both before and after the subcommand."""
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--lang", choices=LANGUAGES, default=default(None), help="language code")
    p.add_argument("--json", action="store_true", default=default(False), help="JSON lines output")
    p.add_argument("--jobs", type=_positive, default=default(1), help="worker processes")
    p.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    p.add_argument("--strict-languages", action="store_true", default=default(False),
                   help="reject languages without full scansion support")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(prog="metrica", description=__doc__.splitlines()[0],
                                     parents=[_common(suppress=False)])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", parents=[common], help="metrical pattern per verse")
    p.add_argument("input", nargs="?", help="one verse per line (default stdin)")
    p.add_argument("--target-length", type=_positive, help="expected metrical length")
    p.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="candidate limit")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("rhyme", parents=[common], help="length and rhyme annotation per stanza")
    p.add_argument("input", nargs="?", help="blank-line separated stanzas (default stdin)")
    p.set_defaults(func=cmd_rhyme)

    stanza = sub.add_parser("stanza", help="stanza type classification").add_subparsers(dest="action", required=True)
    p = stanza.add_parser("classify", parents=[common], help="rank catalog stanza types")
    p.add_argument("input", nargs="?", help="blank-line separated stanzas (default stdin)")
    p.add_argument("--catalog", help="catalog file (default: bundled Spanish catalog)")
    p.set_defaults(func=cmd_stanza_classify)
    p = stanza.add_parser("catalog", parents=[common], help="validate and print a catalog")
    p.add_argument("--catalog", help="catalog file (default: bundled Spanish catalog)")
    p.set_defaults(func=cmd_stanza_catalog)

    corp = sub.add_parser("corpus", help="corpus construction").add_subparsers(dest="action", required=True)
    p = corp.add_parser("build", parents=[common], help="ingest, normalize and deduplicate")
    p.add_argument("--in", dest="in_path", required=True, help="input file or directory")
    p.add_argument("--format", choices=("txt", "tei", "jsonl"), required=True)
    p.add_argument("--source", default="", help="corpus name stored on each record")
    p.add_argument("--out", help="output JSON lines (default stdout)")
    p.set_defaults(func=cmd_corpus_build)
    p = corp.add_parser("dedup", parents=[common], help="deduplicate a JSON lines corpus")
    p.add_argument("input", nargs="?")
    p.add_argument("--out", help="output JSON lines (default stdout)")
    p.set_defaults(func=cmd_corpus_dedup)
    p = corp.add_parser("stats", parents=[common], help="verse and word counts per language")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_corpus_stats)
    p = corp.add_parser("split", parents=[common], help="train/validation/test split")
    p.add_argument("input", nargs="?")
    p.add_argument("--fractions", type=_fractions, default=(0.8, 0.1, 0.1), help="e.g. 0.8,0.1,0.1")
    p.add_argument("--group-by", help="record field whose groups stay together, e.g. poem_id")
    p.add_argument("--preset", help="record field holding an existing split name")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_corpus_split)

    ev = sub.add_parser("eval", help="evaluation metrics").add_subparsers(dest="action", required=True)
    p = ev.add_parser("meter", parents=[common], help="metrical pattern accuracy")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=cmd_eval_meter)
    p = ev.add_parser("stanza", parents=[common], help="macro F1 and accuracy of stanza labels")
    p.add_argument("input", nargs="?")
    p.add_argument("--labels", help="file with the allowed labels, one per line")
    p.set_defaults(func=cmd_eval_stanza)
    p = ev.add_parser("roc", parents=[common], help="one-vs-rest ROC curve")
    p.add_argument("input", nargs="?")
    p.add_argument("--class", dest="class_name", required=True)
    p.set_defaults(func=cmd_eval_roc)
    p = ev.add_parser("mlm", parents=[common], help="masked token accuracy")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_eval_mlm)
    p = ev.add_parser("ppl", parents=[common], help="pseudo-perplexity")
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_eval_ppl)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
