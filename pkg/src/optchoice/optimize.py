"""Direct maximisation of the success rate over linear scorers.

Two searches are provided. :func:`brute_force_search` enumerates every integer
coefficient vector in ``{0..n}^d`` and keeps the cheapest one (smallest
coefficient sum) whose success rate is within ``tolerance`` of the best.
:func:`maximize_success_rate` runs multi-start Nelder-Mead on the real-valued
coefficients. The success rate is piecewise constant in the coefficients, so
Nelder-Mead often stalls on a plateau; several starts are the mitigation.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from ._parallel import ordered_map, worker_count
from .core import Dataset, FloatArray, Lot, linear_scores, linear_success_counts
from .errors import InvalidArgumentError, OptimizationError, ResourceError, SchemaError

DEFAULT_CANDIDATE_CAP = 10**8
# absorbs rounding in ``best - tolerance`` so that exact-boundary rates qualify
_RATE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class LinearScorer:
    """g(x) = sum_i a_i x_i. No intercept: a constant shift never changes a lot's argmax."""

    coefficients: FloatArray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        c = np.array(self.coefficients, dtype=np.float64)
        if c.ndim != 1 or c.shape[0] < 1:
            raise InvalidArgumentError(f"coefficients must be a non-empty vector, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidArgumentError("coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            if len(names) != c.shape[0]:
                raise SchemaError(f"{len(names)} feature names for {c.shape[0]} coefficients")
            object.__setattr__(self, "feature_names", names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearScorer):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"LinearScorer({self.coefficients.tolist()})"

    @property
    def dimension(self) -> int:
        return self.coefficients.shape[0]

    def score_lot(self, lot: Lot) -> FloatArray:
        if lot.dimension != self.dimension:
            raise SchemaError(f"lot has {lot.dimension} features, scorer has {self.dimension} coefficients")
        return linear_scores(lot.features, self.coefficients[None, :])[:, 0]

    def __call__(self, choice: npt.ArrayLike, lot: Lot | None = None) -> float:
        x = np.asarray(choice, dtype=np.float64)
        return float(linear_scores(x[None, :], self.coefficients[None, :])[0, 0])


class SearchResult(NamedTuple):
    scorer: LinearScorer
    rate: float


# ---------------------------------------------------------------------------
# exhaustive integer search

@dataclass(frozen=True)
class BruteForceConfig:
    n: int = 5
    tolerance: float = 0.01
    candidate_cap: int = DEFAULT_CANDIDATE_CAP
    workers: int | None = None

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"coefficient bound n must be an integer >= 1, got {self.n!r}")
        if not 0 <= self.tolerance < 1:
            raise InvalidArgumentError(f"tolerance must lie in [0, 1), got {self.tolerance}")


def integer_grid(n: int, d: int) -> npt.NDArray[np.int64]:
    """All of {0..n}^d in odometer order (last coordinate fastest)."""
    return np.array(list(itertools.product(range(n + 1), repeat=d)), dtype=np.int64).reshape(-1, d)


def select_candidate(
    grid: npt.NDArray[np.int64], counts: npt.NDArray[np.int64], n_lots: int, tolerance: float
) -> int:
    """Row index of the chosen candidate.

    Eligible rows score within ``tolerance`` of the best rate. Among them the
    smallest coefficient sum wins, then the higher rate, then the earliest row
    in odometer (lexicographic) order.
    """
    rates = counts / n_lots
    eligible = np.flatnonzero(rates >= rates.max() - tolerance - _RATE_SLACK)
    sums = grid[eligible].sum(axis=1)
    order = np.lexsort((eligible, -counts[eligible], sums))
    return int(eligible[order[0]])


def brute_force_search(dataset: Dataset, config: BruteForceConfig = BruteForceConfig()) -> SearchResult:
    if len(dataset) == 0:
        raise InvalidArgumentError("cannot search on an empty dataset")
    d = dataset.dimension
    n_candidates = (config.n + 1) ** d
    if n_candidates * len(dataset) > config.candidate_cap:
        raise ResourceError(
            f"grid of (n+1)^d = {config.n + 1}^{d} = {n_candidates} candidates over {len(dataset)} lots "
            f"exceeds the cap of {config.candidate_cap} candidate-lot evaluations"
        )
    grid = integer_grid(config.n, d)
    workers = worker_count(config.workers)
    chunks = np.array_split(np.arange(n_candidates), max(1, min(workers, n_candidates)))
    parts = ordered_map(lambda idx: linear_success_counts(dataset, grid[idx]), chunks, workers)
    counts = np.concatenate(parts)
    best = select_candidate(grid, counts, len(dataset), config.tolerance)
    scorer = LinearScorer(grid[best].astype(np.float64), dataset.feature_names)
    return SearchResult(scorer, float(counts[best] / len(dataset)))


# ---------------------------------------------------------------------------
# Nelder-Mead

@dataclass(frozen=True)
class NelderMeadConfig:
    starts: tuple[tuple[float, ...], ...]
    max_iterations: int = 1000
    simplex_scale: float = 0.5
    convergence_diameter: float = 1e-8
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    workers: int | None = None

    def __post_init__(self) -> None:
        starts = tuple(tuple(float(v) for v in s) for s in self.starts)
        if not starts:
            raise InvalidArgumentError("Nelder-Mead needs at least one start")
        if len({len(s) for s in starts}) != 1 or not starts[0]:
            raise InvalidArgumentError("all starts must be non-empty and share one dimension")
        object.__setattr__(self, "starts", starts)
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise InvalidArgumentError(f"max_iterations must be a positive integer, got {self.max_iterations}")
        if not self.simplex_scale > 0 or not self.convergence_diameter > 0:
            raise InvalidArgumentError("simplex_scale and convergence_diameter must be positive")
        if not (self.reflection > 0 and self.expansion > 1 and 0 < self.contraction < 1 and 0 < self.shrink < 1):
            raise InvalidArgumentError(
                "need reflection > 0, expansion > 1, 0 < contraction < 1, 0 < shrink < 1"
            )

    @property
    def dimension(self) -> int:
        return len(self.starts[0])


def default_starts(d: int, seed: int = 0, n_random: int = 8, n_axis: int = 8) -> tuple[tuple[float, ...], ...]:
    """Seeded uniform starts in [-1, 1]^d followed by +e_1, -e_1, +e_2, ... (truncated)."""
    rng = np.random.default_rng(seed)
    random = [tuple(row) for row in rng.uniform(-1.0, 1.0, size=(n_random, d)).tolist()]
    axis = []
    for i in range(d):
        for sign in (1.0, -1.0):
            e = [0.0] * d
            e[i] = sign
            axis.append(tuple(e))
    return tuple(random + axis[:n_axis])


def default_nm_config(d: int, seed: int = 0, **overrides) -> NelderMeadConfig:
    overrides.setdefault("max_iterations", 500 * d)
    return NelderMeadConfig(starts=default_starts(d, seed), **overrides)


class _Tracker:
    """Evaluates the (minimised) objective and remembers the best point seen."""

    def __init__(self, f: Callable[[FloatArray], float]):
        self.f = f
        self.best_x: FloatArray | None = None
        self.best_f = np.inf
        self.evaluations = 0

    def __call__(self, x: FloatArray) -> float:
        v = self.f(x)
        self.evaluations += 1
        if not np.isfinite(v):
            raise OptimizationError(f"objective is non-finite ({v!r}) at {x.tolist()}")
        if v < self.best_f:
            self.best_f, self.best_x = v, x.copy()
        return v


def _diameter(simplex: FloatArray) -> float:
    diffs = simplex[:, None, :] - simplex[None, :, :]
    return float(np.sqrt((diffs**2).sum(axis=2)).max())


def _nelder_mead_run(f: _Tracker, x0: FloatArray, cfg: NelderMeadConfig) -> int:
    """One minimisation run; returns the number of iterations used."""
    d = x0.shape[0]
    simplex = np.vstack([x0, x0 + cfg.simplex_scale * np.eye(d)])
    fvals = np.array([f(v) for v in simplex])
    it = 0
    while it < cfg.max_iterations:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if _diameter(simplex) < cfg.convergence_diameter:
            break
        it += 1
        worst, f_worst = simplex[-1], fvals[-1]
        centroid = simplex[:-1].mean(axis=0)
        xr = centroid + cfg.reflection * (centroid - worst)
        fr = f(xr)
        if fvals[0] <= fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[0]:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < f_worst:
            xc = centroid + cfg.contraction * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + cfg.contraction * (worst - centroid)
            fc = f(xc)
            if fc < f_worst:
                simplex[-1], fvals[-1] = xc, fc
                continue
        best = simplex[0]
        simplex[1:] = best + cfg.shrink * (simplex[1:] - best)
        fvals[1:] = [f(v) for v in simplex[1:]]
    return it


class NelderMeadResult(NamedTuple):
    point: FloatArray
    value: float


def nelder_mead_maximize(objective: Callable[[FloatArray], float], config: NelderMeadConfig) -> NelderMeadResult:
    """Maximise ``objective`` from every configured start.

    Returns the best vertex evaluated across all runs. On exact ties the
    earliest evaluated point wins, so the result is deterministic.
    """

    def run(start: Sequence[float]) -> _Tracker:
        tracker = _Tracker(lambda x: -float(objective(x)))
        _nelder_mead_run(tracker, np.array(start, dtype=np.float64), config)
        return tracker

    trackers = ordered_map(run, config.starts, worker_count(config.workers))
    best = min(trackers, key=lambda t: t.best_f)  # min() keeps the first of equal keys
    assert best.best_x is not None
    return NelderMeadResult(best.best_x, -best.best_f)


def maximize_success_rate(dataset: Dataset, config: NelderMeadConfig | None = None) -> SearchResult:
    if len(dataset) == 0:
        raise InvalidArgumentError("cannot optimise on an empty dataset")
    if config is None:
        config = default_nm_config(dataset.dimension)
    if config.dimension != dataset.dimension:
        raise SchemaError(f"starts have dimension {config.dimension}, dataset has {dataset.dimension}")
    n_lots = len(dataset)

    def objective(c: FloatArray) -> float:
        return float(linear_success_counts(dataset, c[None, :])[0]) / n_lots

    point, value = nelder_mead_maximize(objective, config)
    return SearchResult(LinearScorer(point, dataset.feature_names), value)
