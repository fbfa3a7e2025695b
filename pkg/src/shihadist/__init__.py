"""The Shiha lifetime distribution with fitting and goodness-of-fit tools."""

from .competitors import Family, ModelSpec, model_cdf, model_log_pdf, model_pdf, model_quantile, param_bounds
from .data import Dataset, builtin_dataset, load_csv
from .errors import BracketError, ConvergenceError, DataError, DomainError
from .estimation import FitConfig, FitResult, fit_mle, log_likelihood
from .gof import GofReport, SummaryStats, ad_test, gof_report, ks_test, summary_stats, ttt_points
from .numerics import Tolerance
from .shiha import (
    ShihaParams,
    cdf,
    descriptors,
    entropy,
    hazard,
    hazard_peak,
    mgf,
    mixture_weights,
    pdf,
    quantile,
    raw_moment,
    sample_inverse,
    sample_mixture,
    stress_strength,
    survival,
)
from .simulation import Sampler, SimReport, StudyConfig, run_study

__version__ = "0.1.0"
