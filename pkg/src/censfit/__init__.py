"""Maximum likelihood distributional regression for right-censored data."""

__version__ = "0.1.0"

from censfit.families import NormalLinear, WeibullAFT, get_family
from censfit.inference import (
    InferenceReport,
    infer,
    influence_values,
    sigma_observed,
    sigma_outer,
    sigma_population,
    wald_intervals,
)
from censfit.kl import expected_loglik, kl_extended
from censfit.laws import CensoringLaw, CovariateLaw, QuadConfig
from censfit.likelihood import Dataset, Observation, log_lik, observed_information, score
from censfit.optimize import FitConfig, FitResult, default_init, fit
from censfit.simulation import Scenario, generate, run_study

__all__ = [
    "CensoringLaw",
    "CovariateLaw",
    "Dataset",
    "FitConfig",
    "FitResult",
    "InferenceReport",
    "NormalLinear",
    "Observation",
    "QuadConfig",
    "Scenario",
    "WeibullAFT",
    "default_init",
    "expected_loglik",
    "fit",
    "generate",
    "get_family",
    "infer",
    "influence_values",
    "kl_extended",
    "log_lik",
    "observed_information",
    "run_study",
    "score",
    "sigma_observed",
    "sigma_outer",
    "sigma_population",
    "wald_intervals",
]
