from __future__ import annotations

import numpy as np
import pytest

from optchoice.baselines import TrainConfig
from optchoice.core import ConstantScorer, Dataset, PrimeIndicator, success_rate
from optchoice.datagen import GenConfig, engine_preset, generate
from optchoice.errors import HarnessError, InvalidArgumentError
from optchoice.evaluation import (
    BruteForceTrainer,
    ConstantTrainer,
    FunctionTrainer,
    LogisticTrainer,
    build_report,
    leave_one_lot_out,
    loo_successes,
)
from optchoice.features import AugmentationSpec, augment
from optchoice.optimize import BruteForceConfig, LinearScorer


@pytest.fixture
def noisy():
    return generate(GenConfig(lots=25, dimension=3, planted_weights=(1.0, 1.0, 0.5), noise_sigma=0.3, seed=8))


class Spy:
    name = "spy"

    def __init__(self):
        self.seen: list[tuple[str, ...]] = []

    def train(self, dataset: Dataset):
        self.seen.append(tuple(lot.lot_id for lot in dataset.lots))
        return LinearScorer(np.ones(dataset.dimension))


def test_constant_trainer_loo_equals_full(noisy):
    for scorer in (LinearScorer([1.0, 0.0, 2.0]), ConstantScorer(), LinearScorer([-1.0, 0.5, 0.5])):
        assert leave_one_lot_out(ConstantTrainer(scorer), noisy) == success_rate(scorer, noisy)


def test_indicator_trainer_is_perfect(noisy):
    assert leave_one_lot_out(ConstantTrainer(PrimeIndicator()), noisy.subset([0, 1, 2])) == 1.0


def test_folds_partition_lots_and_hide_the_test_lot(noisy):
    spy = Spy()
    loo_successes(spy, noisy)
    ids = [lot.lot_id for lot in noisy.lots]
    assert len(spy.seen) == len(ids)
    for i, seen in enumerate(spy.seen):
        assert len(seen) == len(ids) - 1
        assert ids[i] not in seen
        assert set(seen) | {ids[i]} == set(ids)


def test_needs_two_lots(noisy):
    with pytest.raises(InvalidArgumentError):
        leave_one_lot_out(ConstantTrainer(), noisy.subset([0]))


def test_fold_failure_names_the_fold(noisy):
    def boom(ds):
        if len(ds) and ds.lots[0].lot_id != noisy.lots[0].lot_id:
            raise RuntimeError("bad fold")
        return ConstantScorer()

    with pytest.raises(HarnessError, match="fold 0"):
        leave_one_lot_out(FunctionTrainer("boom", boom), noisy)


def test_planted_brute_force_loo_small():
    ds = generate(GenConfig(lots=30, dimension=2, planted_weights=(2.0, 1.0), seed=3))
    assert leave_one_lot_out(BruteForceTrainer(BruteForceConfig(n=5)), ds) == 1.0


def test_augmentation_inside_folds_matches_pre_augmented(noisy):
    spec = AugmentationSpec.of("min", ["f1", "f2"])
    trainer = LogisticTrainer(TrainConfig(epochs=50))
    assert loo_successes(trainer, noisy, spec) == loo_successes(trainer, augment(noisy, spec))


def test_parallel_folds_match_serial(noisy):
    trainer = BruteForceTrainer(BruteForceConfig(n=3))
    assert loo_successes(trainer, noisy, workers=1) == loo_successes(trainer, noisy, workers=4)


def test_report_rows(noisy):
    one = build_report(noisy, [ConstantTrainer(LinearScorer([1.0, 1.0, 0.5]))])
    assert len(one.rows) == 1
    row = one.rows[0]
    assert row.full_data_rate == row.loo_rate
    assert (row.lots, row.choices) == (len(noisy), noisy.n_choices)

    spec = AugmentationSpec.of("min", ["f1", "f2"])
    trainers = [LogisticTrainer(TrainConfig(epochs=30)), BruteForceTrainer(BruteForceConfig(n=2))]
    four = build_report(noisy, trainers, spec)
    assert [(r.method, r.variant) for r in four.rows] == [
        ("logistic", "original"), ("logistic", "extended"), ("bruteforce", "original"), ("bruteforce", "extended"),
    ]
    for r in four.rows:
        assert 0 <= r.full_data_rate <= 1 and 0 <= r.loo_rate <= 1
    again = build_report(noisy, trainers, spec)
    assert again.to_tsv() == four.to_tsv() and again.to_text() == four.to_text()


def test_report_formats(noisy):
    rep = build_report(noisy, [ConstantTrainer(ConstantScorer(), name="flat")], mode="full")
    tsv = rep.to_tsv().splitlines()
    assert tsv[0] == "method\tvariant\tfull_rate\tloo_rate\tlots\tchoices"
    assert tsv[1] == f"flat\toriginal\t0.0000\t-\t25\t{noisy.n_choices}"
    text = rep.to_text().splitlines()
    assert text[0].split() == ["method", "variant", "full_rate", "loo_rate", "lots", "choices"]
    assert set(text[1]) <= {"-", " "}


def test_report_validation(noisy):
    with pytest.raises(InvalidArgumentError):
        build_report(noisy, [])
    with pytest.raises(InvalidArgumentError):
        build_report(noisy, [ConstantTrainer()], mode="kfold")


def test_engine_report_lists_114_lots():
    ds = generate(engine_preset())
    rep = build_report(ds, [ConstantTrainer(LinearScorer([4.0, 3.0, 2.0, 1.0]))])
    assert rep.rows[0].lots == 114
    assert rep.rows[0].choices == ds.n_choices
    # the preset carries noise, so the planted direction is good but not perfect
    assert 0.5 < rep.rows[0].full_data_rate < 1.0
