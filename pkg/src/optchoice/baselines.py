"""Point-wise logistic regression used as a lot scorer.

The learner ignores lot structure during training: every (choice, I-label)
pair is pooled into one binary sample. Its logit then serves as the scoring
function, and lots are labeled by argmax like any other scorer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .core import Dataset, FloatArray, Lot
from .errors import InvalidArgumentError, TrainingDivergenceError


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 500
    l2_penalty: float = 0.0
    seed: int = 0
    positive_weight: float = 1.0
    init_scale: float = 0.01

    def __post_init__(self) -> None:
        if not self.learning_rate >= 0:
            raise InvalidArgumentError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise InvalidArgumentError(f"epochs must be a positive integer, got {self.epochs}")
        if not self.l2_penalty >= 0:
            raise InvalidArgumentError(f"l2_penalty must be non-negative, got {self.l2_penalty}")
        if not self.positive_weight > 0:
            raise InvalidArgumentError(f"positive_weight must be positive, got {self.positive_weight}")
        if not self.init_scale >= 0:
            raise InvalidArgumentError(f"init_scale must be non-negative, got {self.init_scale}")


@dataclass(frozen=True, eq=False)
class LogisticModel:
    weights: FloatArray
    bias: float

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or not np.all(np.isfinite(w)) or not np.isfinite(self.bias):
            raise InvalidArgumentError("logistic parameters must be a finite vector and a finite bias")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogisticModel):
            return NotImplemented
        return self.bias == other.bias and np.array_equal(self.weights, other.weights)

    __hash__ = None  # type: ignore[assignment]

    @property
    def params(self) -> FloatArray:
        return np.append(self.weights, self.bias)

    def score(self, choice: npt.ArrayLike) -> float:
        return score_logistic(self, choice)

    def score_lot(self, lot: Lot) -> FloatArray:
        if lot.dimension != self.weights.shape[0]:
            raise InvalidArgumentError(f"lot has {lot.dimension} features, model expects {self.weights.shape[0]}")
        return lot.features @ self.weights + self.bias

    def probability(self, lot: Lot) -> FloatArray:
        return sigmoid(self.score_lot(lot))


def sigmoid(z: npt.ArrayLike) -> FloatArray:
    # tanh form never overflows
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=np.float64)))


def score_logistic(model: LogisticModel, choice: npt.ArrayLike) -> float:
    """The logit w.x + b; monotone in the predicted probability."""
    x = np.asarray(choice, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise InvalidArgumentError(f"choice has shape {x.shape}, model expects {model.weights.shape}")
    return float(x @ model.weights + model.bias)


def pool(dataset: Dataset) -> tuple[FloatArray, FloatArray]:
    """All choices as rows plus their 0/1 prime labels."""
    lay = dataset.layout
    y = np.zeros(lay.X.shape[0])
    y[lay.prime_rows[lay.prime_rows >= 0]] = 1.0
    return lay.X, y


def loss_and_grad(
    params: FloatArray,
    X: FloatArray,
    y: FloatArray,
    l2_penalty: float = 0.0,
    positive_weight: float = 1.0,
) -> tuple[float, FloatArray]:
    """Weighted mean negative log-likelihood plus ``l2/2 * |w|^2`` (bias unpenalised).

    ``params`` is the weight vector with the bias appended.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    sw = np.where(y > 0, positive_weight, 1.0)
    norm = sw.sum()
    # log(1 + exp(z)) - y z, evaluated stably
    nll = np.logaddexp(0.0, z) - y * z
    loss = float(np.dot(sw, nll) / norm + 0.5 * l2_penalty * np.dot(w, w))
    r = sw * (sigmoid(z) - y) / norm
    grad = np.append(X.T @ r + l2_penalty * w, r.sum())
    return loss, grad


def initial_params(dimension: int, config: TrainConfig) -> FloatArray:
    rng = np.random.default_rng(config.seed)
    return rng.normal(0.0, config.init_scale, size=dimension + 1)


def fit_logistic(dataset: Dataset, config: TrainConfig = TrainConfig(), history: list[float] | None = None) -> LogisticModel:
    """Full-batch gradient descent on the pooled (choice, label) sample.

    If ``history`` is given, the loss before each update is appended to it.
    """
    if len(dataset) == 0:
        raise InvalidArgumentError("cannot fit on an empty dataset")
    X, y = pool(dataset)
    theta = initial_params(dataset.dimension, config)
    for epoch in range(int(config.epochs)):
        with np.errstate(over="ignore", invalid="ignore"):
            loss, grad = loss_and_grad(theta, X, y, config.l2_penalty, config.positive_weight)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise TrainingDivergenceError(epoch, loss)
        if history is not None:
            history.append(loss)
        theta = theta - config.learning_rate * grad
    if not np.all(np.isfinite(theta)):
        raise TrainingDivergenceError(int(config.epochs), float("nan"))
    return LogisticModel(theta[:-1], float(theta[-1]))

