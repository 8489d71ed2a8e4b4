"""Lower-order terms in the 1-level density of two families of elliptic curves."""

from .bias import bias_builder
from .charsums import Q_exact, ap_table, local_factor_sum
from .config_loader import load_runtime_config, merge_yaml_configs
from .config_schema import RuntimeConfig, TruncationParams
from .constants import constants_report, predicted_density
from .density import compare_report, explicit_formula_value, family_density, gamma_term_series_check
from .errors import (
    AdmissibilityError,
    DomainError,
    EllipticDensityError,
    NumericError,
    ResourceCapError,
    UnsupportedError,
)
from .families import F1, F2, family_by_name, make_weight, scale_family, validate_and_residues
from .numtheory import jacobi, sieve, theta_and_r_integral
from .testfunctions import make_test_function

__all__ = [
    "AdmissibilityError",
    "DomainError",
    "EllipticDensityError",
    "F1",
    "F2",
    "NumericError",
    "Q_exact",
    "ResourceCapError",
    "RuntimeConfig",
    "TruncationParams",
    "UnsupportedError",
    "ap_table",
    "bias_builder",
    "compare_report",
    "constants_report",
    "explicit_formula_value",
    "family_by_name",
    "family_density",
    "gamma_term_series_check",
    "jacobi",
    "load_runtime_config",
    "local_factor_sum",
    "make_test_function",
    "make_weight",
    "merge_yaml_configs",
    "predicted_density",
    "scale_family",
    "sieve",
    "theta_and_r_integral",
    "validate_and_residues",
]
