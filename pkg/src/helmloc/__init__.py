"""Numerical checks for generalized Helmholtz equations Phi(-Laplacian) u = Phi(1) u."""

__version__ = "0.1.0"

from .symbols import (  # noqa: E402
    ConditionReport,
    DerivativeAccuracyWarning,
    DomainError,
    Symbol,
    builtin_symbol,
    check_growth,
    check_singularity,
    check_univalence,
    detect_j0,
    eval_derivative,
    eval_symbol,
    full_condition_report,
)

__all__ = [
    "ConditionReport",
    "DerivativeAccuracyWarning",
    "DomainError",
    "Symbol",
    "builtin_symbol",
    "check_growth",
    "check_singularity",
    "check_univalence",
    "detect_j0",
    "eval_derivative",
    "eval_symbol",
    "full_condition_report",
]
