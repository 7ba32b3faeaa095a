"""Bayes factor functions for z, t, chi-squared and F test statistics."""

from .curve import BFFCurve, EvidenceBand, build_bff, categorize, omega_min, posterior_null_probability
from .dep import Marginal, dep, dep_compare
from .distributions import StatFamily
from .engine import (
    Sidedness,
    TestStatistic,
    log_bf10,
    log_bf10_gprior,
    log_bf10_ideal,
    log_bf10_jzs,
    prior_for_effect,
)
from .errors import BFFError, DomainError, NumericalError, ParseError
from .meta import CombinedBFF, StudyRecord, combined_bff, fisher_z, ingest_studies, load_fixture, omega_of_rho
from .priors import (
    CauchyJZS,
    InverseGamma,
    InverseMoment,
    NormalG,
    Support,
    TestRow,
    select_nu,
    smallest_nu,
    tau_for_effect,
)
from .sim import SimConfig, SimReport, run_sim

__version__ = "0.1.0"

__all__ = [
    "BFFCurve",
    "BFFError",
    "CauchyJZS",
    "CombinedBFF",
    "DomainError",
    "EvidenceBand",
    "InverseGamma",
    "InverseMoment",
    "Marginal",
    "NormalG",
    "NumericalError",
    "ParseError",
    "Sidedness",
    "SimConfig",
    "SimReport",
    "StatFamily",
    "StudyRecord",
    "Support",
    "TestRow",
    "TestStatistic",
    "build_bff",
    "categorize",
    "combined_bff",
    "dep",
    "dep_compare",
    "fisher_z",
    "ingest_studies",
    "load_fixture",
    "log_bf10",
    "log_bf10_gprior",
    "log_bf10_ideal",
    "log_bf10_jzs",
    "omega_min",
    "omega_of_rho",
    "posterior_null_probability",
    "prior_for_effect",
    "run_sim",
    "select_nu",
    "smallest_nu",
    "tau_for_effect",
]
