"""Hybrid ARIMA / neural-network one-step forecasting with moving-average and
EMD decompositions, plus a benchmark harness."""
from .errors import (AlignmentError, BoundsError, ConfigurationError, ConvergenceError,
                     DegenerateInputError, DomainError, HybridcastError,
                     InsufficientDataError, NumericalError, RankError, RunFailures,
                     SearchExhaustedError, ShapeError, StageError, TrainingError)
from .metrics import MetricReport, evaluate, summarize
from .series import (SplitSpec, TimeSeries, apply_transform, inverse_transform, read_csv,
                     split, write_csv)

__version__ = "0.1.0"
