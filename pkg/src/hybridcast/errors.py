"""Exception types raised across the package."""


class HybridcastError(Exception):
    """Base class for all package errors."""


class ConfigurationError(HybridcastError, ValueError):
    """Invalid configuration, empty search grid or unknown option."""


class DomainError(HybridcastError, ValueError):
    """A value lies outside the domain of an operation (e.g. log of a nonpositive)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class BoundsError(HybridcastError, IndexError):
    """An index, length or order argument is out of range."""


class ShapeError(HybridcastError, ValueError):
    """Array shapes or lengths do not match."""


class AlignmentError(ShapeError):
    """Sources passed together are not aligned to a common time index."""


class NumericalError(HybridcastError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class DegenerateInputError(NumericalError, ValueError):
    """Input is degenerate for the requested statistic (zero variance, constant series)."""


class InsufficientDataError(DegenerateInputError):
    """Series too short or constant for the requested test."""


class RankError(NumericalError):
    """Least-squares design matrix is rank deficient."""


class ConvergenceError(NumericalError):
    """Iterative optimisation did not converge; ``best`` holds the best iterate found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class TrainingError(NumericalError):
    """Network training diverged (non-finite loss) at ``epoch``."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class SearchExhaustedError(NumericalError):
    """No candidate in a search range met the acceptance condition."""

    def __init__(self, message, best_value=None, best_candidate=None):
        super().__init__(message)
        self.best_value = best_value
        self.best_candidate = best_candidate


class RunFailures(NumericalError):
    """One or more seeded runs failed; ``failures`` maps seed to exception."""

    def __init__(self, failures):
        seeds = sorted(failures)
        super().__init__(f"{len(seeds)} run(s) failed, seeds: {seeds}")
        self.failures = dict(failures)


class StageError(NumericalError):
    """Wraps a failure inside a pipeline stage, keeping the stage label."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
