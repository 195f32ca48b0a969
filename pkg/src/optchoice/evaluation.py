"""Leave-one-lot-out evaluation and success-rate reports.

The lot is the sampling unit: a fold holds out one whole lot, the trainer sees
the remaining lots, and the held-out lot counts as one success or failure.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Protocol

from ._parallel import ordered_map, worker_count
from .baselines import TrainConfig, fit_logistic
from .core import ConstantScorer, Dataset, Scorer, lot_scores, lot_success, predict, success_rate
from .errors import HarnessError, InvalidArgumentError
from .features import AugmentationSpec, augment
from .optimize import BruteForceConfig, NelderMeadConfig, brute_force_search, default_nm_config, maximize_success_rate


class Trainer(Protocol):
    name: str

    def train(self, dataset: Dataset) -> Scorer: ...


@dataclass
class ConstantTrainer:
    """Ignores its training data and always returns the same scorer."""

    scorer: Scorer = field(default_factory=ConstantScorer)
    name: str = "constant"

    def train(self, dataset: Dataset) -> Scorer:
        return self.scorer


@dataclass
class FunctionTrainer:
    name: str
    fn: Callable[[Dataset], Scorer]

    def train(self, dataset: Dataset) -> Scorer:
        return self.fn(dataset)


@dataclass
class LogisticTrainer:
    config: TrainConfig = field(default_factory=TrainConfig)
    name: str = "logistic"

    def train(self, dataset: Dataset) -> Scorer:
        return fit_logistic(dataset, self.config)


@dataclass
class BruteForceTrainer:
    config: BruteForceConfig = field(default_factory=BruteForceConfig)
    name: str = "bruteforce"

    def train(self, dataset: Dataset) -> Scorer:
        return brute_force_search(dataset, self.config).scorer


@dataclass
class NelderMeadTrainer:
    """Multi-start Nelder-Mead; starts are rebuilt for the dataset's dimension
    unless ``config`` fixes them."""

    seed: int = 0
    max_iterations: int | None = None
    simplex_scale: float = 0.5
    config: NelderMeadConfig | None = None
    name: str = "neldermead"

    def train(self, dataset: Dataset) -> Scorer:
        cfg = self.config
        if cfg is None:
            kw = {"simplex_scale": self.simplex_scale}
            if self.max_iterations is not None:
                kw["max_iterations"] = self.max_iterations
            cfg = default_nm_config(dataset.dimension, self.seed, **kw)
        return maximize_success_rate(dataset, cfg).scorer


def _prepare(dataset: Dataset, spec: AugmentationSpec | None) -> Dataset:
    return augment(dataset, spec) if spec is not None else dataset


def loo_successes(
    trainer: Trainer,
    dataset: Dataset,
    augmentation: AugmentationSpec | None = None,
    workers: int | None = None,
) -> list[int]:
    """Per-lot 0/1 outcome of each leave-one-lot-out fold, in lot order."""
    if len(dataset) < 2:
        raise InvalidArgumentError(f"leave-one-lot-out needs at least 2 lots, got {len(dataset)}")

    def fold(i: int) -> int:
        # lot aggregates never cross lots, but recompute per fold anyway
        train = _prepare(dataset.without(i), augmentation)
        test = _prepare(dataset.subset([i]), augmentation)
        try:
            scorer = trainer.train(train)
            return lot_success(test.lots[0], predict(lot_scores(scorer, test.lots[0])))
        except Exception as e:
            raise HarnessError(i, e) from e

    return ordered_map(fold, range(len(dataset)), worker_count(workers))


def leave_one_lot_out(
    trainer: Trainer,
    dataset: Dataset,
    augmentation: AugmentationSpec | None = None,
    workers: int | None = None,
) -> float:
    outcomes = loo_successes(trainer, dataset, augmentation, workers)
    return sum(outcomes) / len(outcomes)


def full_data_rate(trainer: Trainer, dataset: Dataset, augmentation: AugmentationSpec | None = None) -> float:
    data = _prepare(dataset, augmentation)
    return success_rate(trainer.train(data), data)


@dataclass(frozen=True)
class ReportRow:
    method: str
    variant: str
    full_data_rate: float | None
    loo_rate: float | None
    lots: int
    choices: int


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ReportRow, ...]

    HEADER = ("method", "variant", "full_rate", "loo_rate", "lots", "choices")

    def to_tsv(self) -> str:
        lines = ["\t".join(self.HEADER)]
        for r in self.rows:
            lines.append("\t".join([r.method, r.variant, _rate(r.full_data_rate), _rate(r.loo_rate), str(r.lots), str(r.choices)]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        cells = [list(self.HEADER)] + [
            [r.method, r.variant, _rate(r.full_data_rate), _rate(r.loo_rate), str(r.lots), str(r.choices)]
            for r in self.rows
        ]
        widths = [max(len(row[c]) for row in cells) for c in range(len(self.HEADER))]
        out = []
        for n, row in enumerate(cells):
            # text columns left-aligned, numbers right-aligned
            out.append("  ".join(v.ljust(w) if c < 2 else v.rjust(w) for c, (v, w) in enumerate(zip(row, widths))).rstrip())
            if n == 0:
                out.append("  ".join("-" * w for w in widths))
        return "\n".join(out) + "\n"


def _rate(v: float | None) -> str:
    return "-" if v is None else f"{v:.4f}"


MODES = ("full", "loo", "both")


def build_report(
    dataset: Dataset,
    trainers: Sequence[Trainer],
    spec: AugmentationSpec | None = None,
    mode: str = "both",
    workers: int | None = None,
) -> EvalReport:
    if not trainers:
        raise InvalidArgumentError("build_report needs at least one trainer")
    if mode not in MODES:
        raise InvalidArgumentError(f"mode must be one of {MODES}, got {mode!r}")
    if spec is not None:
        spec.check(dataset.feature_names)
    variants: list[tuple[str, AugmentationSpec | None]] = [("original", None)]
    if spec is not None:
        variants.append(("extended", spec))
    rows = []
    for trainer in trainers:
        for variant, aug in variants:
            full = full_data_rate(trainer, dataset, aug) if mode in ("full", "both") else None
            loo = leave_one_lot_out(trainer, dataset, aug, workers) if mode in ("loo", "both") else None
            rows.append(ReportRow(trainer.name, variant, full, loo, len(dataset), dataset.n_choices))
    return EvalReport(tuple(rows))
