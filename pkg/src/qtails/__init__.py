"""Exact truncated q-series, sums of tails, and q-series identity checks."""

from .builders import (
    INF,
    Poch,
    PochTerm,
    SignedMonomial,
    StabilizationError,
    TPoint,
    eta_quotient,
    gaussian_binomial,
    lambert_sum,
    pochhammer,
    pochhammer_inverse,
    stable_sum,
)
from .catalog import CATALOG_IDS, UnknownIdentityError, diagnose, diagnose_full, verify
from .dsl import ParseError, parse, run_script, run_text
from .pell import error_series, j_n, mock_theta_f, named_series, omega_n, theta_n, v_m
from .quadfield import (
    NumericInstabilityError,
    ideal_counts,
    lvalue_extract,
    verify_theorem2,
)
from .report import IdentityReport
from .series import QSeries, SeriesError, TSeries
from .tails import SeriesFamily, epsilon_limit, tails_sum

__version__ = "0.1.0"

__all__ = [
    "CATALOG_IDS",
    "INF",
    "IdentityReport",
    "NumericInstabilityError",
    "ParseError",
    "Poch",
    "PochTerm",
    "QSeries",
    "SeriesError",
    "SeriesFamily",
    "SignedMonomial",
    "StabilizationError",
    "TPoint",
    "TSeries",
    "UnknownIdentityError",
    "diagnose",
    "diagnose_full",
    "epsilon_limit",
    "error_series",
    "eta_quotient",
    "gaussian_binomial",
    "ideal_counts",
    "j_n",
    "lambert_sum",
    "lvalue_extract",
    "mock_theta_f",
    "named_series",
    "omega_n",
    "parse",
    "pochhammer",
    "pochhammer_inverse",
    "run_script",
    "run_text",
    "stable_sum",
    "tails_sum",
    "theta_n",
    "v_m",
    "verify",
    "verify_theorem2",
]
