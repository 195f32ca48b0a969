"""Flat-file formats.

Dataset CSV: header ``lot_id,is_prime,<feature>...``, one row per choice.
Scorer text: ``coef <feature> <value>`` per line.
Logistic model text: ``bias <value>`` then ``weight <feature> <value>`` per line.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Union

import numpy as np

from .baselines import LogisticModel
from .core import Dataset, Lot
from .errors import DataError, SchemaError
from .optimize import LinearScorer

PathLike = Union[str, Path]

LOT_COLUMN = "lot_id"
PRIME_COLUMN = "is_prime"


def _num(v: float) -> str:
    # repr is the shortest string that round-trips (at most 17 significant digits)
    return repr(float(v))


def _g17(v: float) -> str:
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# datasets

def dumps_dataset(dataset: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([LOT_COLUMN, PRIME_COLUMN, *dataset.feature_names])
    for i, lot in enumerate(dataset.lots):
        lot_id = lot.lot_id if lot.lot_id is not None else f"lot{i + 1:04d}"
        for j, row in enumerate(lot.features):
            w.writerow([lot_id, int(lot.prime == j), *(_num(v) for v in row)])
    return buf.getvalue()


def save_dataset(dataset: Dataset, path: PathLike) -> None:
    Path(path).write_text(dumps_dataset(dataset))


def loads_dataset(text: str) -> Dataset:
    """Parse a dataset CSV; any malformed row aborts the whole load."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty file: missing header", line=1) from None
    if len(header) < 3 or header[0] != LOT_COLUMN or header[1] != PRIME_COLUMN:
        raise DataError(f"header must start with {LOT_COLUMN},{PRIME_COLUMN} and name at least one feature", line=1)
    names = header[2:]
    if len(set(names)) != len(names) or any(not n for n in names):
        raise DataError(f"feature names must be unique and non-empty: {names}", line=1)
    width = len(header)

    groups: dict[str, list[tuple[int, int, list[float]]]] = {}
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise DataError(f"expected {width} columns, got {len(row)}", line=line)
        lot_id, flag = row[0], row[1].strip()
        if flag not in ("0", "1"):
            raise DataError(f"{PRIME_COLUMN} must be 0 or 1, got {row[1]!r}", line=line)
        try:
            values = [float(c) for c in row[2:]]
        except ValueError as e:
            raise DataError(f"unparsable feature value ({e})", line=line) from None
        if not all(math.isfinite(v) for v in values):
            raise DataError("feature values must be finite", line=line)
        groups.setdefault(lot_id, []).append((line, int(flag), values))

    lots = []
    for lot_id, rows in groups.items():
        if len(rows) < 2:
            raise DataError(f"lot {lot_id!r} has a single choice; lots need at least 2", line=rows[0][0])
        primes = [k for k, (_, flag, _) in enumerate(rows) if flag]
        if len(primes) > 1:
            raise DataError(f"lot {lot_id!r} has more than one prime", line=rows[primes[1]][0])
        feats = np.array([v for _, _, v in rows], dtype=np.float64)
        lots.append(Lot(feats, primes[0] if primes else None, lot_id))
    if not lots:
        raise DataError("file contains no lots", line=1)
    return Dataset(tuple(names), tuple(lots))


def load_dataset(path: PathLike) -> Dataset:
    return loads_dataset(Path(path).read_text())


# ---------------------------------------------------------------------------
# scorers and models

def _check_names(names: Sequence[str]) -> None:
    for n in names:
        if not n or any(c.isspace() for c in n):
            raise SchemaError(f"feature name {n!r} cannot be written to a whitespace-separated file")


def dumps_scorer(scorer: LinearScorer, feature_names: Sequence[str] | None = None) -> str:
    names = tuple(feature_names or scorer.feature_names or ())
    if len(names) != scorer.dimension:
        raise SchemaError("scorer needs one feature name per coefficient to be saved")
    _check_names(names)
    return "".join(f"coef {n} {_g17(v)}\n" for n, v in zip(names, scorer.coefficients))


def dumps_logistic(model: LogisticModel, feature_names: Sequence[str]) -> str:
    if len(feature_names) != model.weights.shape[0]:
        raise SchemaError("model needs one feature name per weight to be saved")
    _check_names(feature_names)
    lines = [f"bias {_g17(model.bias)}\n"]
    lines += [f"weight {n} {_g17(v)}\n" for n, v in zip(feature_names, model.weights)]
    return "".join(lines)


def _parse_float(token: str, lineno: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise DataError(f"bad number {token!r}", line=lineno) from None
    if not math.isfinite(v):
        raise DataError(f"non-finite number {token!r}", line=lineno)
    return v


def loads_model(text: str) -> LinearScorer | tuple[LogisticModel, tuple[str, ...]]:
    """Parse either file kind.

    Returns a named :class:`LinearScorer` for ``coef`` files and
    ``(LogisticModel, feature_names)`` for ``bias``/``weight`` files.
    """
    coefs: list[tuple[str, float]] = []
    weights: list[tuple[str, float]] = []
    bias: float | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] in ("coef", "weight") and len(parts) == 3:
            (coefs if parts[0] == "coef" else weights).append((parts[1], _parse_float(parts[2], lineno)))
        elif parts[0] == "bias" and len(parts) == 2 and bias is None:
            bias = _parse_float(parts[1], lineno)
        else:
            raise DataError(f"unrecognised model line {raw!r}", line=lineno)
    if coefs and (weights or bias is not None):
        raise DataError("file mixes coef lines with bias/weight lines")
    if coefs:
        names = [n for n, _ in coefs]
        if len(set(names)) != len(names):
            raise DataError("duplicate coefficient names")
        return LinearScorer([v for _, v in coefs], tuple(names))
    if bias is None or not weights:
        raise DataError("model file has neither coef lines nor a bias with weight lines")
    names = tuple(n for n, _ in weights)
    if len(set(names)) != len(names):
        raise DataError("duplicate weight names")
    return LogisticModel(np.array([v for _, v in weights]), bias), names


def save_scorer(scorer: LinearScorer, path: PathLike, feature_names: Sequence[str] | None = None) -> None:
    Path(path).write_text(dumps_scorer(scorer, feature_names))


def save_logistic(model: LogisticModel, feature_names: Sequence[str], path: PathLike) -> None:
    Path(path).write_text(dumps_logistic(model, feature_names))


def load_model(path: PathLike):
    return loads_model(Path(path).read_text())


def align_to(names: Sequence[str], values: np.ndarray, dataset: Dataset) -> np.ndarray:
    """Reorder per-feature ``values`` to the dataset's column order.

    Raises SchemaError naming any dataset feature the model does not cover, or
    any model feature the dataset lacks.
    """
    lookup = dict(zip(names, values))
    missing = [n for n in dataset.feature_names if n not in lookup]
    extra = [n for n in names if n not in dataset.feature_names]
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"model lacks features {missing}")
        if extra:
            parts.append(f"dataset lacks features {extra}")
        raise SchemaError("; ".join(parts))
    return np.array([lookup[n] for n in dataset.feature_names], dtype=np.float64)
