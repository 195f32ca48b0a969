"""Lots, primes, and the argmax semantics of scoring functions.

A *choice* is a feature vector, a *lot* is a finite set of at least two choices
of which at most one is the *prime*, and a *dataset* is a sequence of lots over
a shared feature schema. A scoring function labels a lot by its strict unique
maximum; a tied maximum selects nothing. The success rate of a scorer is the
fraction of lots on which that selection coincides with the prime (or with
"nothing" on lots that have no prime).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Protocol, Union, runtime_checkable

import numpy as np
import numpy.typing as npt

from .errors import EvaluationError, InvalidArgumentError, SchemaError

FloatArray = npt.NDArray[np.float64]

# (scores of N rows) x (K candidates) float64 cells evaluated per chunk
_CHUNK_CELLS = 1 << 22


def _frozen(a: npt.ArrayLike, ndim: int, what: str) -> FloatArray:
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise InvalidArgumentError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{what} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Lot:
    """A finite set of choices, one row of ``features`` per choice.

    ``prime`` is the index of the prime choice, or None when the lot has none.
    """

    features: FloatArray
    prime: int | None = None
    lot_id: str | None = None

    def __post_init__(self) -> None:
        feats = _frozen(self.features, 2, "lot features")
        if feats.shape[0] < 2:
            raise InvalidArgumentError(f"a lot needs at least 2 choices, got {feats.shape[0]}")
        object.__setattr__(self, "features", feats)
        if self.prime is not None:
            if isinstance(self.prime, bool) or int(self.prime) != self.prime:
                raise InvalidArgumentError(f"prime index must be an integer, got {self.prime!r}")
            p = int(self.prime)
            if not 0 <= p < feats.shape[0]:
                raise InvalidArgumentError(f"prime index {p} out of range for lot of size {feats.shape[0]}")
            object.__setattr__(self, "prime", p)

    def __len__(self) -> int:
        return self.features.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lot):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.lot_id == other.lot_id
            and self.features.shape == other.features.shape
            and bool(np.array_equal(self.features, other.features))
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    @property
    def has_prime(self) -> bool:
        return self.prime is not None

    def choice(self, index: int) -> FloatArray:
        _check_index(self, index)
        return self.features[index]


@dataclass(frozen=True)
class _Layout:
    """All choices of a dataset stacked row-wise, with lot boundaries."""

    X: FloatArray
    starts: npt.NDArray[np.intp]
    sizes: npt.NDArray[np.intp]
    row_lot: npt.NDArray[np.intp]
    prime_rows: npt.NDArray[np.intp]  # -1 where the lot has no prime


@dataclass(frozen=True, eq=False)
class Dataset:
    feature_names: tuple[str, ...]
    lots: tuple[Lot, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        names = tuple(str(n) for n in self.feature_names)
        if not names:
            raise SchemaError("a dataset needs at least one feature")
        if len(set(names)) != len(names):
            raise SchemaError(f"feature names are not unique: {list(names)}")
        lots = tuple(self.lots)
        for i, lot in enumerate(lots):
            if not isinstance(lot, Lot):
                raise InvalidArgumentError(f"lot {i} is not a Lot")
            if lot.dimension != len(names):
                raise SchemaError(f"lot {i} has {lot.dimension} features, schema declares {len(names)}")
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "lots", lots)

    def __len__(self) -> int:
        return len(self.lots)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.feature_names == other.feature_names and self.lots == other.lots

    __hash__ = None  # type: ignore[assignment]

    @property
    def dimension(self) -> int:
        return len(self.feature_names)

    @property
    def n_choices(self) -> int:
        return sum(len(lot) for lot in self.lots)

    def subset(self, indices: Sequence[int]) -> Dataset:
        return Dataset(self.feature_names, tuple(self.lots[i] for i in indices))

    def without(self, index: int) -> Dataset:
        return Dataset(self.feature_names, self.lots[:index] + self.lots[index + 1 :])

    @cached_property
    def layout(self) -> _Layout:
        if not self.lots:
            raise InvalidArgumentError("dataset is empty")
        sizes = np.array([len(lot) for lot in self.lots], dtype=np.intp)
        starts = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.intp)
        X = np.concatenate([lot.features for lot in self.lots], axis=0)
        X.flags.writeable = False
        prime_rows = np.array(
            [s + lot.prime if lot.prime is not None else -1 for s, lot in zip(starts, self.lots)],
            dtype=np.intp,
        )
        row_lot = np.repeat(np.arange(len(self.lots), dtype=np.intp), sizes)
        return _Layout(X, starts, sizes, row_lot, prime_rows)


def validate_unit_range(dataset: Dataset) -> None:
    """Strict check that every feature value lies in [0, 1]."""
    for i, lot in enumerate(dataset.lots):
        bad = (lot.features < 0.0) | (lot.features > 1.0)
        if bad.any():
            r, c = map(int, np.argwhere(bad)[0])
            raise InvalidArgumentError(
                f"lot {i}, choice {r}: feature {dataset.feature_names[c]!r}={lot.features[r, c]!r} outside [0, 1]"
            )


@dataclass(frozen=True)
class Prediction:
    lot_index: int
    predicted_index: int | None


# ---------------------------------------------------------------------------
# scoring functions

@runtime_checkable
class LotScorer(Protocol):
    """A scorer that scores a whole lot at once, returning one value per choice."""

    def score_lot(self, lot: Lot) -> FloatArray: ...


Scorer = Union[LotScorer, Callable[[FloatArray, Lot], float]]


def lot_scores(scorer: Scorer, lot: Lot) -> FloatArray:
    """Score every choice of ``lot``. Plain callables are invoked as ``g(x, lot)``."""
    if isinstance(scorer, LotScorer):
        return np.asarray(scorer.score_lot(lot), dtype=np.float64)
    return np.array([scorer(x, lot) for x in lot.features], dtype=np.float64)


class PrimeIndicator:
    """Scores the prime 1 and everything else 0: the identity function used as a scorer."""

    def score_lot(self, lot: Lot) -> FloatArray:
        s = np.zeros(len(lot))
        if lot.prime is not None:
            s[lot.prime] = 1.0
        return s


class ConstantScorer:
    def __init__(self, value: float = 0.0):
        self.value = float(value)

    def score_lot(self, lot: Lot) -> FloatArray:
        return np.full(len(lot), self.value)


def linear_scores(X: FloatArray, coefficients: FloatArray) -> FloatArray:
    """Scores of rows ``X`` (N, d) under coefficient rows (K, d), shape (N, K).

    Terms are accumulated feature by feature, left to right, so every cell is
    bit-identical to ``sum(a * x for a, x in zip(coefs, row))`` in plain Python.
    """
    C = np.asarray(coefficients, dtype=np.float64)
    S = X[:, 0:1] * C[None, :, 0]
    for j in range(1, X.shape[1]):
        S += X[:, j : j + 1] * C[None, :, j]
    return S


# ---------------------------------------------------------------------------
# labeling semantics

def _check_index(lot: Lot, index: int) -> None:
    if not 0 <= index < len(lot):
        raise InvalidArgumentError(f"choice index {index} out of range for lot of size {len(lot)}")


def indicator(lot: Lot, index: int) -> int:
    """I(x, X): 1 iff choice ``index`` is the lot's prime."""
    _check_index(lot, index)
    return int(lot.prime is not None and index == lot.prime)


def predict(scores: npt.ArrayLike) -> int | None:
    """Index of the strict unique maximum of ``scores``; None when the maximum is tied.

    Ties are exact float equality, with no tolerance band.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] < 2:
        raise InvalidArgumentError(f"need a score vector of length >= 2, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise InvalidArgumentError("scores must be finite")
    top = s.max()
    hits = np.flatnonzero(s == top)
    return int(hits[0]) if hits.shape[0] == 1 else None


def lot_success(lot: Lot, predicted: int | None) -> int:
    if predicted is not None:
        _check_index(lot, predicted)
    return int(predicted == lot.prime)


def predict_dataset(scorer: Scorer, dataset: Dataset) -> list[Prediction]:
    out = []
    for i, lot in enumerate(dataset.lots):
        s = lot_scores(scorer, lot)
        if s.shape != (len(lot),):
            raise EvaluationError(f"scorer returned shape {s.shape} for lot {_lot_name(i, lot)} of size {len(lot)}")
        if not np.all(np.isfinite(s)):
            raise EvaluationError(f"non-finite score in lot {_lot_name(i, lot)}")
        out.append(Prediction(i, predict(s)))
    return out


def success_rate(scorer: Scorer, dataset: Dataset) -> float:
    if len(dataset) == 0:
        raise InvalidArgumentError("success rate of an empty dataset is undefined")
    preds = predict_dataset(scorer, dataset)
    wins = sum(lot_success(lot, p.predicted_index) for lot, p in zip(dataset.lots, preds))
    return wins / len(dataset)


def _lot_name(i: int, lot: Lot) -> str:
    return f"{i} ({lot.lot_id})" if lot.lot_id is not None else str(i)


def linear_lot_successes(dataset: Dataset, coefficients: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    """Per-lot success of many linear scorers at once, shape (L, K).

    Same semantics as :func:`predict` + :func:`lot_success`, vectorised over the
    coefficient rows; used by the optimizers.
    """
    C = np.atleast_2d(np.asarray(coefficients, dtype=np.float64))
    if C.shape[1] != dataset.dimension:
        raise SchemaError(f"coefficients have {C.shape[1]} entries, dataset has {dataset.dimension} features")
    if not np.all(np.isfinite(C)):
        raise InvalidArgumentError("coefficients must be finite")
    lay = dataset.layout
    primed = lay.prime_rows >= 0
    out = np.empty((len(dataset), C.shape[0]), dtype=bool)
    step = max(1, _CHUNK_CELLS // lay.X.shape[0])
    for k0 in range(0, C.shape[0], step):
        S = linear_scores(lay.X, C[k0 : k0 + step])
        top = np.maximum.reduceat(S, lay.starts, axis=0)
        n_top = np.add.reduceat(S == top[lay.row_lot], lay.starts, axis=0)
        prime_is_top = np.zeros_like(n_top, dtype=bool)
        prime_is_top[primed] = S[lay.prime_rows[primed]] == top[primed]
        out[:, k0 : k0 + step] = np.where(primed[:, None], prime_is_top & (n_top == 1), n_top >= 2)
    return out


def linear_success_counts(dataset: Dataset, coefficients: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Number of successful lots for each coefficient row."""
    return linear_lot_successes(dataset, coefficients).sum(axis=0, dtype=np.int64)


# ---------------------------------------------------------------------------
# point-wise diagnostics

def pointwise_accuracy(predictions: Sequence[Prediction], dataset: Dataset) -> float:
    """Fraction of (choice, lot) pairs whose implied 0/1 label equals I(x, X).

    This is what a classifier would be graded on; it can be high while the
    success rate is zero.
    """
    if len(predictions) != len(dataset):
        raise InvalidArgumentError(f"{len(predictions)} predictions for {len(dataset)} lots")
    correct = total = 0
    for p, lot in zip(predictions, dataset.lots):
        if p.predicted_index is not None:
            _check_index(lot, p.predicted_index)
        for i in range(len(lot)):
            correct += int(p.predicted_index == i) == indicator(lot, i)
        total += len(lot)
    if total == 0:
        raise InvalidArgumentError("dataset is empty")
    return correct / total


def lotwise_auc(scorer: Scorer, dataset: Dataset) -> float:
    """Mean over lots of the share of non-primes scored below the prime (ties count 1/2)."""
    if len(dataset) == 0:
        raise InvalidArgumentError("dataset is empty")
    total = 0.0
    for i, lot in enumerate(dataset.lots):
        if lot.prime is None:
            raise InvalidArgumentError(f"lot {_lot_name(i, lot)} has no prime; AUC is undefined")
        s = lot_scores(scorer, lot)
        if not np.all(np.isfinite(s)):
            raise EvaluationError(f"non-finite score in lot {_lot_name(i, lot)}")
        others = np.delete(s, lot.prime)
        p = s[lot.prime]
        total += (np.sum(others < p) + 0.5 * np.sum(others == p)) / others.shape[0]
    return float(total / len(dataset))


def describe(dataset: Dataset) -> dict[str, Any]:
    sizes = [len(lot) for lot in dataset.lots]
    return {
        "lots": len(dataset),
        "choices": sum(sizes),
        "dimension": dataset.dimension,
        "mean_lot_size": (sum(sizes) / len(sizes)) if sizes else math.nan,
        "lots_without_prime": sum(lot.prime is None for lot in dataset.lots),
    }
