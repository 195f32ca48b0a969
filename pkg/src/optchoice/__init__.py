"""Optimal-choice learning: pick the single prime element of each lot."""

from .baselines import LogisticModel, TrainConfig, fit_logistic, score_logistic
from .core import (
    ConstantScorer,
    Dataset,
    Lot,
    Prediction,
    PrimeIndicator,
    indicator,
    lot_success,
    lotwise_auc,
    pointwise_accuracy,
    predict,
    predict_dataset,
    success_rate,
)
from .datagen import GenConfig, engine_preset, generate
from .evaluation import EvalReport, build_report, leave_one_lot_out
from .features import AugmentationEntry, AugmentationSpec, augment
from .optimize import (
    BruteForceConfig,
    LinearScorer,
    NelderMeadConfig,
    brute_force_search,
    maximize_success_rate,
    nelder_mead_maximize,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentationEntry",
    "AugmentationSpec",
    "BruteForceConfig",
    "ConstantScorer",
    "Dataset",
    "EvalReport",
    "GenConfig",
    "LinearScorer",
    "LogisticModel",
    "Lot",
    "NelderMeadConfig",
    "Prediction",
    "PrimeIndicator",
    "TrainConfig",
    "augment",
    "brute_force_search",
    "build_report",
    "engine_preset",
    "fit_logistic",
    "generate",
    "indicator",
    "leave_one_lot_out",
    "lot_success",
    "lotwise_auc",
    "maximize_success_rate",
    "nelder_mead_maximize",
    "pointwise_accuracy",
    "predict",
    "predict_dataset",
    "score_logistic",
    "success_rate",
]
