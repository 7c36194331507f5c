"""Structured Toeplitz lifting of weighted k-space data."""
from .toeplitz import (
    FilterSupport,
    LiftedMatrix,
    build_lifted,
    gram_matrix,
    annihilation_residual,
)

__all__ = [
    "FilterSupport",
    "LiftedMatrix",
    "build_lifted",
    "gram_matrix",
    "annihilation_residual",
]
