"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class OptChoiceError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(OptChoiceError, ValueError):
    pass


class SchemaError(OptChoiceError, ValueError):
    """Feature names or dimensions disagree between two objects."""


class DataError(OptChoiceError, ValueError):
    """A dataset file is malformed. Carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EvaluationError(OptChoiceError, ArithmeticError):
    pass


class TrainingDivergenceError(OptChoiceError, ArithmeticError):
    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"non-finite loss {loss!r} at epoch {epoch}")


class OptimizationError(OptChoiceError, ArithmeticError):
    pass


class ResourceError(OptChoiceError, RuntimeError):
    pass


class HarnessError(OptChoiceError, RuntimeError):
    def __init__(self, fold: int, cause: BaseException):
        self.fold = fold
        super().__init__(f"trainer failed on fold {fold}: {cause}")
