from __future__ import annotations


class BayesFuzzyOcrError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(BayesFuzzyOcrError, ValueError):
    pass


class ConfigError(BayesFuzzyOcrError, ValueError):
    pass


class NotPositiveDefiniteError(BayesFuzzyOcrError, ValueError):
    pass


class DivergenceError(BayesFuzzyOcrError, RuntimeError):
    """Training produced a non-finite MSE."""

    def __init__(self, epoch: int, mse: float):
        super().__init__(f"training diverged at epoch {epoch} (mse={mse})")
        self.epoch = epoch
        self.mse = mse


class NoValidColumnsError(BayesFuzzyOcrError, ValueError):
    pass


class IdxFormatError(BayesFuzzyOcrError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class NetpbmFormatError(BayesFuzzyOcrError, ValueError):
    pass


class CorpusError(BayesFuzzyOcrError, ValueError):
    pass


class ModelFormatError(BayesFuzzyOcrError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
