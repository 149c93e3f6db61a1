"""Low-rank matrix completion under MCAR/MAR/NMAR missingness."""

__version__ = "0.1.0"

from .errors import DimensionError, LowRankError, NumericalError, ParameterError
from .linalg import (
    LowRankFactors,
    project_missing,
    project_observed,
    random_orthonormal,
    soft_threshold_spectrum,
    thin_svd,
)
from .metrics import (
    CellSummary,
    ErrorScope,
    paired_t_test,
    relative_error,
    summarize_cell,
    welch_t_test,
)
from .missingness import (
    MaskStats,
    Mechanism,
    MechanismKind,
    MechanismSpec,
    classify_mechanism,
    gen_mar_rowperm,
    gen_mcar,
    gen_nmar_logistic,
    mar_from_donor,
    mask_stats,
)
from .models import GroundTruth, sample_bayes_model, sample_gaussian_model
from .solvers import (
    InitStrategy,
    LambdaPath,
    SolveResult,
    SolverConfig,
    hard_impute,
    objective_value,
    select_lambda,
    soft_impute,
    stationarity_residual,
)

__all__ = [
    "CellSummary",
    "DimensionError",
    "ErrorScope",
    "GroundTruth",
    "InitStrategy",
    "LambdaPath",
    "LowRankError",
    "LowRankFactors",
    "MaskStats",
    "Mechanism",
    "MechanismKind",
    "MechanismSpec",
    "NumericalError",
    "ParameterError",
    "SolveResult",
    "SolverConfig",
    "classify_mechanism",
    "gen_mar_rowperm",
    "gen_mcar",
    "gen_nmar_logistic",
    "hard_impute",
    "mar_from_donor",
    "mask_stats",
    "objective_value",
    "paired_t_test",
    "project_missing",
    "project_observed",
    "random_orthonormal",
    "relative_error",
    "sample_bayes_model",
    "sample_gaussian_model",
    "select_lambda",
    "soft_impute",
    "soft_threshold_spectrum",
    "stationarity_residual",
    "summarize_cell",
    "thin_svd",
    "welch_t_test",
]
