"""Lot-aggregate feature augmentation.

Each entry appends one column holding an aggregate (min, max or mean) of an
existing feature over the choice's own lot, so every choice of a lot carries
the same appended value. The aggregate includes the prime.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .core import Dataset, Lot
from .errors import InvalidArgumentError, SchemaError

AGGREGATES = {
    "min": np.min,
    "max": np.max,
    "mean": np.mean,  # not in the original method, offered as a cheap extra
}


@dataclass(frozen=True)
class AugmentationEntry:
    feature: str
    aggregate: str
    new_name: str

    def __post_init__(self) -> None:
        if self.aggregate not in AGGREGATES:
            raise InvalidArgumentError(f"unknown aggregate {self.aggregate!r}; expected one of {sorted(AGGREGATES)}")


@dataclass(frozen=True)
class AugmentationSpec:
    entries: tuple[AugmentationEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        names = [e.new_name for e in self.entries]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate new feature names: {names}")

    @classmethod
    def of(cls, aggregate: str, features: Iterable[str]) -> AugmentationSpec:
        """E.g. ``AugmentationSpec.of("min", ["f1", "f2"])`` adds ``min.f1`` and ``min.f2``."""
        return cls(tuple(AugmentationEntry(f, aggregate, f"{aggregate}.{f}") for f in features))

    @classmethod
    def from_records(cls, records: Sequence[dict]) -> AugmentationSpec:
        entries = []
        for r in records:
            try:
                feat, agg = str(r["feature"]), str(r["aggregate"])
            except (KeyError, TypeError) as e:
                raise InvalidArgumentError(f"augmentation entry needs 'feature' and 'aggregate': {r!r}") from e
            entries.append(AugmentationEntry(feat, agg, str(r.get("name", f"{agg}.{feat}"))))
        return cls(tuple(entries))

    def check(self, feature_names: Sequence[str]) -> None:
        known = set(feature_names)
        for e in self.entries:
            if e.feature not in known:
                raise SchemaError(f"unknown feature {e.feature!r} in augmentation")
            if e.new_name in known:
                raise SchemaError(f"augmented feature name {e.new_name!r} collides with an existing feature")


def augment(dataset: Dataset, spec: AugmentationSpec) -> Dataset:
    spec.check(dataset.feature_names)
    cols = [dataset.feature_names.index(e.feature) for e in spec.entries]
    funcs = [AGGREGATES[e.aggregate] for e in spec.entries]
    lots = []
    for lot in dataset.lots:
        extra = np.array([f(lot.features[:, c]) for f, c in zip(funcs, cols)], dtype=np.float64)
        wide = np.hstack([lot.features, np.broadcast_to(extra, (len(lot), extra.shape[0]))])
        lots.append(Lot(wide, lot.prime, lot.lot_id))
    names = dataset.feature_names + tuple(e.new_name for e in spec.entries)
    return Dataset(names, tuple(lots))


def project(dataset: Dataset, names: Sequence[str]) -> Dataset:
    """Keep only the named feature columns, in the given order."""
    try:
        cols = [dataset.feature_names.index(n) for n in names]
    except ValueError as e:
        raise SchemaError(str(e)) from e
    return Dataset(tuple(names), tuple(Lot(lot.features[:, cols], lot.prime, lot.lot_id) for lot in dataset.lots))


def negate(dataset: Dataset) -> Dataset:
    """Flip the sign of every feature, turning smaller-is-better criteria into larger-is-better."""
    return Dataset(dataset.feature_names, tuple(Lot(-lot.features, lot.prime, lot.lot_id) for lot in dataset.lots))
