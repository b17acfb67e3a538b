"""Gini index estimation under fat tails, with alpha-stable limit laws."""

from ._backend import BACKEND
from ._version import __version__
from .asymptotics import (
    GaussianLimit,
    StableLimit,
    c_alpha,
    error_ratio_r,
    gini_finite_sample_law,
    gmd_limit_scaling,
    n_tilde,
    pareto_ml_limit,
    pareto_np_limit,
    remainder_rn,
    vc_bound,
)
from .errors import (
    DataError,
    DomainError,
    InputFileError,
    ModelViolation,
    NumericalError,
    StableGiniError,
)
from .gini import (
    GiniEstimate,
    ParetoParams,
    Sample,
    gini_corrected,
    gini_corrected_pareto,
    gini_mle,
    gini_nonparametric,
    gini_true_pareto,
    gmd_half,
    pareto_mle_alpha,
)
from .stable import StableParams
