"""Exact verification of a rational matrix whose nonnegative ranks over the
reals and over the rationals differ (5 versus 6)."""

from .exactnum import QuadExt, Rational, SQRT2, format_entry, parse_entry, sign
from .linalg import ExactMatrix, is_stochastic, matmul, normalize_columns, rank

__version__ = "0.1.0"

__all__ = [
    "QuadExt",
    "Rational",
    "SQRT2",
    "format_entry",
    "parse_entry",
    "sign",
    "ExactMatrix",
    "is_stochastic",
    "matmul",
    "normalize_columns",
    "rank",
]
