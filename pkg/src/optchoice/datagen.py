"""Seeded synthetic optimal-choice datasets.

Lots are drawn independently. Each choice gets uniform [0, 1] features (one
column may be Bernoulli(1/2) instead), and a latent utility
``planted_weights . x + N(0, noise_sigma)``. With probability
``prime_probability`` the lot's prime is the utility argmax, otherwise the lot
has no prime. With zero noise the planted linear scorer is perfect by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, Lot, linear_scores
from .errors import InvalidArgumentError

_MAX_REDRAWS = 1000


@dataclass(frozen=True)
class GenConfig:
    lots: int = 100
    choices_min: int = 2
    choices_max: int = 40
    dimension: int = 4
    binary_feature_index: int | None = None
    planted_weights: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0)
    noise_sigma: float = 0.0
    prime_probability: float = 1.0
    seed: int = 0
    invert: bool = False
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "planted_weights", tuple(float(w) for w in self.planted_weights))
        if self.lots < 1:
            raise InvalidArgumentError(f"lots must be >= 1, got {self.lots}")
        if not 2 <= self.choices_min <= self.choices_max:
            raise InvalidArgumentError(
                f"need 2 <= choices_min <= choices_max, got {self.choices_min}, {self.choices_max}"
            )
        if self.dimension < 1:
            raise InvalidArgumentError(f"dimension must be >= 1, got {self.dimension}")
        if len(self.planted_weights) != self.dimension:
            raise InvalidArgumentError(
                f"{len(self.planted_weights)} planted weights for dimension {self.dimension}"
            )
        if not np.all(np.isfinite(self.planted_weights)):
            raise InvalidArgumentError("planted weights must be finite")
        if self.binary_feature_index is not None and not 0 <= self.binary_feature_index < self.dimension:
            raise InvalidArgumentError(f"binary_feature_index {self.binary_feature_index} out of range")
        if not self.noise_sigma >= 0:
            raise InvalidArgumentError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0 <= self.prime_probability <= 1:
            raise InvalidArgumentError(f"prime_probability must lie in [0, 1], got {self.prime_probability}")
        if self.feature_names is not None and len(self.feature_names) != self.dimension:
            raise InvalidArgumentError("feature_names length must equal dimension")

    @property
    def names(self) -> tuple[str, ...]:
        if self.feature_names is not None:
            return tuple(self.feature_names)
        return tuple(f"f{i + 1}" for i in range(self.dimension))


def engine_preset() -> GenConfig:
    """Shape of the engine-cycle data: 114 lots of 2..40 choices, three continuous
    criteria and one binary, oriented so that larger is better."""
    return GenConfig(
        lots=114,
        choices_min=2,
        choices_max=40,
        dimension=4,
        binary_feature_index=3,
        planted_weights=(4.0, 3.0, 2.0, 1.0),
        noise_sigma=0.15,
        prime_probability=1.0,
        seed=2453,
    )


def _draw_features(rng: np.random.Generator, k: int, cfg: GenConfig) -> np.ndarray:
    x = rng.uniform(0.0, 1.0, size=(k, cfg.dimension))
    if cfg.binary_feature_index is not None:
        x[:, cfg.binary_feature_index] = rng.integers(0, 2, size=k)
    return x


def _unique_argmax(u: np.ndarray) -> int | None:
    top = np.flatnonzero(u == u.max())
    return int(top[0]) if top.shape[0] == 1 else None


def generate(config: GenConfig) -> Dataset:
    rng = np.random.default_rng(config.seed)
    w = np.array(config.planted_weights)[None, :]
    lots = []
    for i in range(config.lots):
        k = int(rng.integers(config.choices_min, config.choices_max + 1))
        x = _draw_features(rng, k, config)
        base = linear_scores(x, w)[:, 0]
        for _ in range(_MAX_REDRAWS):
            u = base + rng.normal(0.0, config.noise_sigma, size=k) if config.noise_sigma > 0 else base
            winner = _unique_argmax(u)
            if winner is not None:
                break
            if config.noise_sigma == 0:
                x = _draw_features(rng, k, config)
                base = linear_scores(x, w)[:, 0]
        else:
            raise InvalidArgumentError(
                f"lot {i}: utility stayed tied after {_MAX_REDRAWS} redraws; are the planted weights degenerate?"
            )
        prime = winner if rng.random() < config.prime_probability else None
        if config.invert:
            x = 1.0 - x
        lots.append(Lot(x, prime, f"lot{i + 1:04d}"))
    return Dataset(config.names, tuple(lots))


def planted_scorer_weights(config: GenConfig) -> np.ndarray:
    """Coefficients of the planted scorer in the emitted feature orientation."""
    w = np.array(config.planted_weights)
    return -w if config.invert else w


@dataclass(frozen=True)
class LotShiftConfig:
    """Lots whose feature levels shift with lot size.

    Every lot has a level ``s`` that is high for small lots. Feature ``x1`` is
    ``s + u`` and the prime is the argmax of ``x1 - min(x1 over the lot)``.
    The distractor ``x2 = s + v`` carries the same level but no within-lot
    signal, so a pooled point-wise learner credits it for the higher prime
    rate of small lots. The lot minima absorb ``s``.
    """

    lots: int = 114
    choices_min: int = 2
    choices_max: int = 40
    within_spread: float = 0.3
    distractor_spread: float = 0.6
    seed: int = 11
    feature_names: tuple[str, ...] = field(default=("x1", "x2"))


def generate_lot_shift(config: LotShiftConfig = LotShiftConfig()) -> Dataset:
    rng = np.random.default_rng(config.seed)
    span = config.choices_max - config.choices_min
    lots = []
    for i in range(config.lots):
        k = int(rng.integers(config.choices_min, config.choices_max + 1))
        level = 1.0 - (k - config.choices_min) / span if span else 0.5
        u = rng.uniform(0.0, config.within_spread, size=k)
        v = rng.uniform(0.0, config.distractor_spread, size=k)
        x1 = level + u
        prime = _unique_argmax(x1 - x1.min())
        if prime is None:
            raise InvalidArgumentError(f"lot {i}: tied prime")
        lots.append(Lot(np.column_stack([x1, level + v]), prime, f"lot{i + 1:04d}"))
    return Dataset(tuple(config.feature_names), tuple(lots))

