from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optchoice.core import Dataset, Lot
from optchoice.datagen import engine_preset, generate
from optchoice.errors import InvalidArgumentError, SchemaError
from optchoice.features import AugmentationEntry, AugmentationSpec, augment, negate, project


def one_lot():
    return Dataset(("f1", "f2"), (Lot([[0.4, 1.0], [0.1, 0.0], [0.7, 0.5]], 2, "x"),))


def test_min_and_max_examples():
    out = augment(one_lot(), AugmentationSpec.of("min", ["f1"]))
    assert out.feature_names == ("f1", "f2", "min.f1")
    assert out.lots[0].features[:, 2].tolist() == [0.1, 0.1, 0.1]
    out = augment(one_lot(), AugmentationSpec((AugmentationEntry("f1", "max", "max.f1"),)))
    assert out.lots[0].features[:, 2].tolist() == [0.7, 0.7, 0.7]


def test_mean_aggregate():
    out = augment(one_lot(), AugmentationSpec.of("mean", ["f2"]))
    assert out.lots[0].features[:, 2] == pytest.approx([0.5, 0.5, 0.5])


def test_engine_shape_gains_two_columns():
    ds = generate(engine_preset())
    out = augment(ds, AugmentationSpec.of("min", ["f1", "f2"]))
    assert ds.dimension == 4 and out.dimension == 6
    assert [lot.prime for lot in out.lots] == [lot.prime for lot in ds.lots]


def test_input_untouched():
    ds = one_lot()
    before = ds.lots[0].features.copy()
    augment(ds, AugmentationSpec.of("max", ["f1", "f2"]))
    assert np.array_equal(ds.lots[0].features, before)
    assert ds.dimension == 2


def test_schema_errors():
    with pytest.raises(SchemaError, match="'nope'"):
        augment(one_lot(), AugmentationSpec.of("min", ["nope"]))
    with pytest.raises(SchemaError, match="collides"):
        augment(one_lot(), AugmentationSpec((AugmentationEntry("f1", "min", "f2"),)))
    with pytest.raises(SchemaError):
        AugmentationSpec((AugmentationEntry("f1", "min", "z"), AugmentationEntry("f2", "max", "z")))
    with pytest.raises(InvalidArgumentError):
        AugmentationEntry("f1", "median", "m")


def test_negate():
    ds = negate(one_lot())
    assert ds.lots[0].features[0].tolist() == [-0.4, -1.0]
    assert ds.lots[0].prime == 2


def random_dataset(seed):
    rng = np.random.default_rng(seed)
    lots = tuple(
        Lot(rng.uniform(size=(int(rng.integers(2, 7)), 3)), int(rng.integers(2)), f"l{i}")
        for i in range(int(rng.integers(1, 6)))
    )
    return Dataset(("a", "b", "c"), lots)


SPEC = AugmentationSpec(
    (
        AugmentationEntry("a", "min", "min.a"),
        AugmentationEntry("b", "max", "max.b"),
        AugmentationEntry("c", "mean", "mean.c"),
    )
)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_appended_columns_constant_within_lot_and_attained(seed):
    out = augment(random_dataset(seed), SPEC)
    for src, lot in zip(random_dataset(seed).lots, out.lots):
        extra = lot.features[:, 3:]
        assert np.all(extra == extra[0])
        assert extra[0, 0] in src.features[:, 0]
        assert extra[0, 1] in src.features[:, 1]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_projection_restores_input(seed):
    ds = random_dataset(seed)
    assert project(augment(ds, SPEC), ds.feature_names) == ds


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_commutes_with_permutations(seed, rnd):
    ds = random_dataset(seed)
    lot_order = list(range(len(ds)))
    rnd.shuffle(lot_order)
    shuffled = []
    for i in lot_order:
        lot = ds.lots[i]
        perm = list(range(len(lot)))
        rnd.shuffle(perm)
        shuffled.append((i, perm, Lot(lot.features[perm], perm.index(lot.prime), lot.lot_id)))
    a = augment(ds, SPEC)
    b = augment(Dataset(ds.feature_names, tuple(s[2] for s in shuffled)), SPEC)
    for (i, perm, _), lot_b in zip(shuffled, b.lots):
        # mean sums in a different order, so compare to rounding
        np.testing.assert_allclose(lot_b.features, a.lots[i].features[perm], rtol=0, atol=1e-15)
        assert np.array_equal(lot_b.features[:, :5], a.lots[i].features[perm][:, :5])
