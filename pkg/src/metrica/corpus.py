"""Verse corpus ingestion, normalization, deduplication, statistics and splits."""
from __future__ import annotations

import hashlib
import json
import math
import random
import re
import unicodedata
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Sequence, TextIO

from .errors import EmptyInput, InputError, InvalidFractions
from .phonology import LANGUAGES

ZERO_WIDTH = dict.fromkeys(map(ord, "\u200b\u200c\u200d\u2060\ufeff\u00ad"))
_SPACE = re.compile(r"\s+")
SPLIT_NAMES = ("train", "validation", "test")
_SPLIT_ALIASES = {"train": 0, "training": 0, "validation": 1, "valid": 1, "val": 1, "dev": 1, "test": 2}


def normalize_verse(text: str) -> str:
    """NFC, no zero-width characters, single spaces, trimmed. Case and punctuation are kept."""
    text = unicodedata.normalize("NFC", text).translate(ZERO_WIDTH)
    return _SPACE.sub(" ", text).strip()


@dataclass
class CorpusRecord:
    verse: str
    language: str
    source: str = ""
    poem_id: str | None = None
    stanza_index: int | None = None
    verse_index: int | None = None

    def __post_init__(self):
        if not isinstance(self.verse, str) or not self.verse.strip():
            raise InputError("empty verse")
        if self.language not in LANGUAGES:
            raise InputError(f"unknown language {self.language!r}")

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusRecord":
        try:
            return cls(
                verse=data["verse"],
                language=data["language"],
                source=data.get("source", "") or "",
                poem_id=None if data.get("poem_id") is None else str(data["poem_id"]),
                stanza_index=data.get("stanza_index"),
                verse_index=data.get("verse_index"),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise InputError(f"malformed record: {exc}") from None


def _coerce(item: Any) -> CorpusRecord | None:
    try:
        record = item if isinstance(item, CorpusRecord) else CorpusRecord.from_dict(item)
    except InputError:
        return None
    verse = normalize_verse(record.verse)
    if not verse:
        return None
    if verse != record.verse:
        record = CorpusRecord(verse, record.language, record.source, record.poem_id,
                              record.stanza_index, record.verse_index)
    return record


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def word_count(verse: str, language: str) -> int:
    """Whitespace tokens; Chinese counts each non-punctuation character."""
    if language == "zh":
        return sum(1 for c in verse if not c.isspace() and unicodedata.category(c)[0] not in "PSZ")
    return len(verse.split())


@dataclass
class CorpusStats:
    verses: Counter = field(default_factory=Counter)
    words: Counter = field(default_factory=Counter)
    duplicates: int = 0
    malformed: int = 0

    def add(self, record: CorpusRecord) -> None:
        self.verses[record.language] += 1
        self.words[record.language] += word_count(record.verse, record.language)

    @property
    def total_verses(self) -> int:
        return sum(self.verses.values())

    @property
    def total_words(self) -> int:
        return sum(self.words.values())

    def languages(self) -> list[str]:
        return [lang for lang in LANGUAGES if self.verses[lang] or self.words[lang]]

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(self.verses + other.verses, self.words + other.words,
                           self.duplicates + other.duplicates, self.malformed + other.malformed)

    def __eq__(self, other):
        if not isinstance(other, CorpusStats):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self) -> dict:
        return {
            "languages": {lang: {"verses": self.verses[lang], "words": self.words[lang]}
                          for lang in self.languages()},
            "total": {"verses": self.total_verses, "words": self.total_words},
            "duplicates": self.duplicates,
            "malformed": self.malformed,
        }

    def format_table(self) -> str:
        rows = [("language", "verses", "words")]
        rows += [(lang, f"{self.verses[lang]:,}", f"{self.words[lang]:,}") for lang in self.languages()]
        rows.append(("total", f"{self.total_verses:,}", f"{self.total_words:,}"))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = [f"{r[0]:<{widths[0]}}  {r[1]:>{widths[1]}}  {r[2]:>{widths[2]}}" for r in rows]
        if self.duplicates or self.malformed:
            lines.append(f"duplicates {self.duplicates}  malformed {self.malformed}")
        return "\n".join(lines)


def corpus_stats(records: Iterable[Any]) -> CorpusStats:
    stats = CorpusStats()
    for item in records:
        record = _coerce(item)
        if record is None:
            stats.malformed += 1
        else:
            stats.add(record)
    return stats


# ---------------------------------------------------------------------------
# deduplication
# ---------------------------------------------------------------------------

def dedup_key(record: CorpusRecord) -> bytes:
    data = f"{record.language}\x00{record.verse}".encode("utf-8")
    return hashlib.blake2b(data, digest_size=16).digest()


def _dedup(records: Iterable[Any], stats: CorpusStats) -> Iterator[CorpusRecord]:
    seen: set[bytes] = set()
    for item in records:
        record = _coerce(item)
        if record is None:
            stats.malformed += 1
            continue
        key = dedup_key(record)
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        stats.add(record)
        yield record


def dedup_corpus(records: Iterable[Any]) -> tuple[Iterator[CorpusRecord], CorpusStats]:
    """Keep the first occurrence of each (language, verse) pair.

    Returns a lazy iterator and a stats object that is filled in as the
    iterator is consumed; read the stats only after exhausting it.
    """
    stats = CorpusStats()
    return _dedup(records, stats), stats


# ---------------------------------------------------------------------------
# splits
# ---------------------------------------------------------------------------

def _check_fractions(fractions: Sequence[float]) -> tuple[float, float, float]:
    if len(fractions) != 3:
        raise InvalidFractions(f"expected 3 fractions, got {len(fractions)}")
    if any(not math.isfinite(f) or f < 0 for f in fractions):
        raise InvalidFractions(f"fractions must be non-negative: {tuple(fractions)}")
    if abs(math.fsum(fractions) - 1.0) > 1e-9:
        raise InvalidFractions(f"fractions must sum to 1, got {math.fsum(fractions)}")
    return tuple(fractions)


def _get(item: Any, key: str) -> Any:
    return item.get(key) if isinstance(item, dict) else getattr(item, key, None)


def split_dataset(records: Sequence[Any], fractions: Sequence[float] = (0.8, 0.1, 0.1), seed: int = 0,
                  group_by: str | Callable[[Any], Any] | None = None,
                  preset: str | None = None) -> tuple[list, list, list]:
    """Partition ``records`` into train, validation and test lists.

    With ``group_by`` every group lands in one split. With ``preset`` the
    split is read from that field of each record and fractions are ignored.
    Items keep their input order inside each split.
    """
    records = list(records)
    if not records:
        raise EmptyInput("nothing to split")
    out: tuple[list, list, list] = ([], [], [])
    if preset is not None:
        for item in records:
            name = str(_get(item, preset) or "").lower()
            if name not in _SPLIT_ALIASES:
                raise InputError(f"record without a known {preset!r} value: {name!r}")
            out[_SPLIT_ALIASES[name]].append(item)
        return out

    fractions = _check_fractions(fractions)
    if group_by is None:
        groups = [[i] for i in range(len(records))]
    else:
        key = group_by if callable(group_by) else (lambda item: _get(item, group_by))
        index: dict[Any, list[int]] = {}
        for i, item in enumerate(records):
            index.setdefault(key(item), []).append(i)
        groups = list(index.values())
    random.Random(seed).shuffle(groups)

    n = len(records)
    bounds = (round(n * fractions[0]), round(n * (fractions[0] + fractions[1])))
    assigned = [0] * n
    running = 0
    for group in groups:
        # a group goes where its first item would fall
        split = 0 if running < bounds[0] else 1 if running < bounds[1] else 2
        for i in group:
            assigned[i] = split
        running += len(group)
    for i, item in enumerate(records):
        out[assigned[i]].append(item)
    return out


# ---------------------------------------------------------------------------
# readers and writers
# ---------------------------------------------------------------------------

def read_txt(path: str | Path, language: str, source: str = "") -> Iterator[CorpusRecord]:
    """One verse per line; blank lines separate stanzas; the file is one poem."""
    path = Path(path)
    stanza, verse_idx = 0, 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            verse = normalize_verse(line)
            if not verse:
                if verse_idx:
                    stanza, verse_idx = stanza + 1, 0
                continue
            yield CorpusRecord(verse, language, source or path.parent.name, path.stem, stanza, verse_idx)
            verse_idx += 1


def _local(tag: Any) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def read_tei(path: str | Path, language: str, source: str = "") -> Iterator[CorpusRecord]:
    """Verses are ``<l>`` elements; ``<lg>`` elements delimit stanzas."""
    path = Path(path)
    root = ET.parse(path).getroot()
    stanza = -1
    counters = {"verse": 0}

    def walk(elem, in_lg):
        nonlocal stanza
        for child in elem:
            name = _local(child.tag)
            if name == "lg" and not in_lg:
                stanza += 1
                counters["verse"] = 0
                yield from walk(child, True)
            elif name == "l":
                if not in_lg and counters["verse"] == 0:
                    stanza += 1
                verse = normalize_verse("".join(child.itertext()))
                if verse:
                    yield CorpusRecord(verse, language, source or path.parent.name, path.stem,
                                       max(stanza, 0), counters["verse"])
                    counters["verse"] += 1
            else:
                yield from walk(child, in_lg)

    yield from walk(root, False)


def read_jsonl(source: str | Path | TextIO) -> Iterator[dict | None]:
    """Parsed JSON objects, or None for lines that are not JSON objects."""
    fh = open(source, encoding="utf-8") if isinstance(source, (str, Path)) else source
    try:
        for line in fh:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                yield None
                continue
            yield obj if isinstance(obj, dict) else None
    finally:
        if fh is not source:
            fh.close()


def write_jsonl(records: Iterable[CorpusRecord | dict], fh: TextIO) -> int:
    n = 0
    for record in records:
        data = record.to_dict() if isinstance(record, CorpusRecord) else record
        fh.write(json.dumps(data, ensure_ascii=False) + "\n")
        n += 1
    return n


READERS = {"txt": read_txt, "tei": read_tei}
_SUFFIXES = {"txt": (".txt",), "tei": (".xml", ".tei"), "jsonl": (".jsonl", ".json")}


def corpus_files(root: str | Path, fmt: str) -> list[Path]:
    root = Path(root)
    if root.is_file():
        return [root]
    if not root.is_dir():
        raise InputError(f"no such file or directory: {root}")
    return sorted(p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in _SUFFIXES[fmt])


def read_corpus(root: str | Path, fmt: str, language: str | None = None,
                source: str = "") -> Iterator[Any]:
    """Records (or raw JSON objects) from every matching file under ``root``."""
    if fmt not in _SUFFIXES:
        raise InputError(f"unknown corpus format {fmt!r}")
    for path in corpus_files(root, fmt):
        if fmt == "jsonl":
            for obj in read_jsonl(path):
                if isinstance(obj, dict) and language and "language" not in obj:
                    obj = {**obj, "language": language}
                yield obj
        else:
            if language is None:
                raise InputError(f"--lang is required for {fmt} input")
            yield from READERS[fmt](path, language, source)
