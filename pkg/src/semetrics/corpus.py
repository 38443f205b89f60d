"""Reference/hypothesis corpora: loading, saving, grouping and splitting.

Two on-disk formats:

* TSV - strict: UTF-8, first line is the header, tab-separated, no quoting
  or escaping. Columns: id, reference, hypothesis and optionally dialect,
  dataset. Text containing tabs or newlines is invalid here.
* JSONL - one object per line with the same fields; the escape hatch for
  arbitrary text.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "EvalPair",
    "CorpusFormatError",
    "load_corpus",
    "save_corpus",
    "group_by",
    "split_corpus",
    "UNKNOWN_GROUP",
]

_REQUIRED_COLUMNS = ("id", "reference", "hypothesis")
_OPTIONAL_COLUMNS = ("dialect", "dataset")

#: Bucket name for pairs missing the grouping key.
UNKNOWN_GROUP = "unknown"


class CorpusFormatError(ValueError):
    """A corpus file violates its declared format; messages carry line numbers."""


@dataclass(frozen=True)
class EvalPair:
    """One reference/hypothesis pair with optional grouping metadata.

    The reference must be non-empty; the hypothesis may be empty (a model
    can emit nothing). Dialects are free-form strings, typically two-letter
    canton codes (AG, BE, BS, GR, LU, SG, VS, ZH).
    """

    id: str
    reference: str
    hypothesis: str
    dialect: str | None = None
    dataset: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("pair id must be non-empty")
        if not self.reference:
            raise ValueError(f"pair {self.id!r}: reference must be non-empty")


def load_corpus(path: str | Path, format: str | None = None) -> list[EvalPair]:
    """Load a corpus file, preserving file order.

    Args:
        path: Input file.
        format: "tsv" or "jsonl"; inferred from the suffix when omitted.

    Raises:
        CorpusFormatError: On malformed records (with line numbers),
            duplicate ids (naming both occurrences) or an empty file.
        FileNotFoundError: If path does not exist.
    """
    path = Path(path)
    format = format or _infer_format(path)
    text = path.read_text(encoding="utf-8")
    if format == "tsv":
        pairs = _parse_tsv(text, path)
    elif format == "jsonl":
        pairs = _parse_jsonl(text, path)
    else:
        raise CorpusFormatError(f"unknown corpus format {format!r} (expected tsv or jsonl)")
    if not pairs:
        raise CorpusFormatError(f"{path}: corpus file contains no pairs")
    _check_unique_ids(pairs, path)
    return pairs


def _infer_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix in (".tsv", ".tab"):
        return "tsv"
    if suffix in (".jsonl", ".ndjson", ".json"):
        return "jsonl"
    raise CorpusFormatError(
        f"{path}: cannot infer format from suffix {suffix!r}; pass format='tsv' or 'jsonl'"
    )


def _parse_tsv(text: str, path: Path) -> list[EvalPair]:
    lines = text.splitlines()
    if not lines:
        raise CorpusFormatError(f"{path}: empty file")
    header = lines[0].split("\t")
    for column in _REQUIRED_COLUMNS:
        if column not in header:
            raise CorpusFormatError(f"{path}:1: header is missing column {column!r}")
    for column in header:
        if column not in _REQUIRED_COLUMNS + _OPTIONAL_COLUMNS:
            raise CorpusFormatError(f"{path}:1: unknown column {column!r}")
    if len(set(header)) != len(header):
        raise CorpusFormatError(f"{path}:1: duplicate header column")

    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != len(header):
            raise CorpusFormatError(
                f"{path}:{lineno}: expected {len(header)} tab-separated fields, got "
                f"{len(fields)} (TSV is strict: no quoting, tabs in text are invalid)"
            )
        record = dict(zip(header, fields))
        pairs.append(_build_pair(record, f"{path}:{lineno}"))
    return pairs


def _parse_jsonl(text: str, path: Path) -> list[EvalPair]:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise CorpusFormatError(f"{path}:{lineno}: invalid JSON: {err.msg}") from err
        if not isinstance(record, dict):
            raise CorpusFormatError(f"{path}:{lineno}: record must be a JSON object")
        pairs.append(_build_pair(record, f"{path}:{lineno}"))
    return pairs


def _build_pair(record: dict, where: str) -> EvalPair:
    for column in _REQUIRED_COLUMNS:
        if column not in record:
            raise CorpusFormatError(f"{where}: missing field {column!r}")
    kwargs = {}
    for column in _REQUIRED_COLUMNS + _OPTIONAL_COLUMNS:
        if column in record and record[column] is not None:
            value = record[column]
            if not isinstance(value, str):
                raise CorpusFormatError(f"{where}: field {column!r} must be a string")
            if column in _OPTIONAL_COLUMNS and value == "":
                continue  # empty optional TSV field means absent
            kwargs[column] = value
    try:
        return EvalPair(**kwargs)
    except ValueError as err:
        raise CorpusFormatError(f"{where}: {err}") from err


def _check_unique_ids(pairs: Sequence[EvalPair], path: Path) -> None:
    seen: dict[str, int] = {}
    for index, pair in enumerate(pairs):
        if pair.id in seen:
            raise CorpusFormatError(
                f"{path}: duplicate id {pair.id!r} (records {seen[pair.id] + 1} and {index + 1})"
            )
        seen[pair.id] = index


def save_corpus(pairs: Sequence[EvalPair], path: str | Path, format: str | None = None) -> None:
    """Write pairs so that :func:`load_corpus` round-trips them exactly.

    Raises:
        CorpusFormatError: When writing TSV and a field contains a tab or
            newline (use JSONL for such text).
    """
    path = Path(path)
    format = format or _infer_format(path)
    if format == "tsv":
        columns = list(_REQUIRED_COLUMNS)
        columns += [c for c in _OPTIONAL_COLUMNS
                    if any(getattr(p, c) is not None for p in pairs)]
        lines = ["\t".join(columns)]
        for pair in pairs:
            fields = []
            for column in columns:
                value = getattr(pair, column) or ""
                if "\t" in value or "\n" in value or "\r" in value:
                    raise CorpusFormatError(
                        f"pair {pair.id!r}: field {column!r} contains a tab or newline; "
                        "strict TSV cannot represent it, use jsonl"
                    )
                fields.append(value)
            lines.append("\t".join(fields))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for pair in pairs:
                record = {k: v for k, v in asdict(pair).items() if v is not None}
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    else:
        raise CorpusFormatError(f"unknown corpus format {format!r}")


def group_by(pairs: Iterable[EvalPair], key: str) -> dict[str, list[EvalPair]]:
    """Partition pairs by dialect or dataset.

    Pairs missing the key collect under :data:`UNKNOWN_GROUP`. Groups keep
    first-appearance order, and their union is exactly the input.
    """
    if key not in ("dialect", "dataset"):
        raise ValueError(f"group key must be 'dialect' or 'dataset', got {key!r}")
    groups: dict[str, list[EvalPair]] = {}
    for pair in pairs:
        value = getattr(pair, key) or UNKNOWN_GROUP
        groups.setdefault(value, []).append(pair)
    return groups


def split_corpus(
    pairs: Sequence[EvalPair], test_fraction: float = 0.2, *, seed: int
) -> tuple[list[EvalPair], list[EvalPair]]:
    """Random train/test split with a mandatory seed, for reproducibility.

    Selects ``round(test_fraction * len(pairs))`` test pairs uniformly at
    random; both halves keep the original corpus order.
    """
    if not 0.0 <= test_fraction <= 1.0:
        raise ValueError(f"test_fraction must be in [0, 1], got {test_fraction}")
    n_test = round(test_fraction * len(pairs))
    test_indices = set(random.Random(seed).sample(range(len(pairs)), n_test))
    train = [p for i, p in enumerate(pairs) if i not in test_indices]
    test = [p for i, p in enumerate(pairs) if i in test_indices]
    return train, test
