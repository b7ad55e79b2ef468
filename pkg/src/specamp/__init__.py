"""Amplitude estimation for counting spectra against a known reference signal."""

__version__ = "0.1.0"

from .errors import (
    EstimationError,
    FileFormatError,
    SpecampError,
    ValidationError,
)
from .model import (
    NoiseSequence,
    SignalModel,
    SinusoidParams,
    Spectrum,
    gaussian_sequence,
    make_sinusoid_signal,
    synthesize_spectrum,
)
from .estimators import (
    MEASURED,
    MODEL,
    UNIT,
    Estimate,
    ResidualReport,
    WeightMode,
    alpha_uncertainty,
    loglik_modified,
    ls_estimate,
    residual_diagnostics,
    score_general,
    score_reduced,
    solve_alpha,
)
from .study import (
    DEFAULT_SIGNAL,
    ComparisonReport,
    ErrorQuantiles,
    ReplicateReport,
    StudyConfig,
    TrialResult,
    aggregate,
    compare_estimators,
    matched_recovery_check,
    run_study,
)

__all__ = [
    "__version__",
    "SpecampError",
    "ValidationError",
    "FileFormatError",
    "EstimationError",
    "SignalModel",
    "Spectrum",
    "NoiseSequence",
    "SinusoidParams",
    "make_sinusoid_signal",
    "gaussian_sequence",
    "synthesize_spectrum",
    "WeightMode",
    "MEASURED",
    "MODEL",
    "UNIT",
    "Estimate",
    "ResidualReport",
    "ls_estimate",
    "loglik_modified",
    "score_general",
    "score_reduced",
    "solve_alpha",
    "alpha_uncertainty",
    "residual_diagnostics",
    "DEFAULT_SIGNAL",
    "StudyConfig",
    "ReplicateReport",
    "TrialResult",
    "ErrorQuantiles",
    "ComparisonReport",
    "aggregate",
    "run_study",
    "matched_recovery_check",
    "compare_estimators",
]
