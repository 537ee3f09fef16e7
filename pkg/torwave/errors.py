"""Exception hierarchy shared by every torwave module."""

from typing import Any, Tuple


class TorwaveError(Exception):
    """Base class for all torwave errors."""


class ValidationError(TorwaveError, ValueError):
    """A documented precondition was violated by the caller."""


class NumericError(TorwaveError, RuntimeError):
    """A numerical procedure failed to converge or produced unusable output."""


class TrialError(NumericError):
    """A single Monte Carlo trial failed; carries the trial index."""

    def __init__(self, trial_index: int, cause: BaseException):
        self.trial_index = trial_index
        self.cause = cause
        super().__init__(f"trial {trial_index} failed: {cause}")

    def __reduce__(self) -> Tuple[Any, Tuple[int, BaseException]]:
        return (TrialError, (self.trial_index, self.cause))


class PresetFailure(TorwaveError):
    """An acceptance preset finished with at least one failed assertion."""
