"""dyncorr: dynamic correlation estimation for multivariate time series.

A latent Wishart-process volatility model drives the observation correlation
matrix; a Metropolis-within-Gibbs sampler yields posterior distributions on
the whole correlation trajectory and on the two scalar dynamics parameters.
"""

__version__ = "0.1.0"

from .data import Dataset, load_csv, standardize
from .distributions import RngStream
from .estimator import DynamicCorrelationMCMC
from .exceptions import (
    ConfigError,
    ConstantChannelError,
    DomainError,
    DyncorrError,
    EmptyResultError,
    InvalidDataError,
    NonFiniteValueError,
    NotPositiveDefinite,
    ParseError,
    RaggedRowsError,
    SchemaMismatchError,
)
from .model import ModelParams, Trajectory, simulate, step_latent
from .posterior import (
    PosteriorSummary,
    acceptance_report,
    correlation_percentiles,
    empirical_hist,
    summarize_record,
    thin_and_burn,
)
from .sampler import (
    ChainRecord,
    ChainState,
    SamplerConfig,
    gibbs_sweep,
    mh_accept,
    run_chain,
)

__all__ = [
    "__version__",
    "Dataset",
    "load_csv",
    "standardize",
    "RngStream",
    "DynamicCorrelationMCMC",
    "ConfigError",
    "ConstantChannelError",
    "DomainError",
    "DyncorrError",
    "EmptyResultError",
    "InvalidDataError",
    "NonFiniteValueError",
    "NotPositiveDefinite",
    "ParseError",
    "RaggedRowsError",
    "SchemaMismatchError",
    "ModelParams",
    "Trajectory",
    "simulate",
    "step_latent",
    "PosteriorSummary",
    "acceptance_report",
    "correlation_percentiles",
    "empirical_hist",
    "summarize_record",
    "thin_and_burn",
    "ChainRecord",
    "ChainState",
    "SamplerConfig",
    "gibbs_sweep",
    "mh_accept",
    "run_chain",
]
