"""Noise injection and reconstruction quality metrics."""

from typing import Optional

import numpy as np

from ..errors import DimensionError, ParameterError
from ..grid import ComplexImage


def add_noise(values: np.ndarray, sigma: float, seed: Optional[int] = None) -> np.ndarray:
    """
    Add circular complex Gaussian noise with std sigma per real/imaginary part.

    Args:
        values: Measurements (any shape)
        sigma: Per-component standard deviation, >= 0
        seed: Generator seed

    Returns:
        Noisy copy of values
    """
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    values = np.asarray(values, dtype=np.complex128)
    if sigma == 0:
        return values.copy()
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape)
    return values + sigma * noise


def snr_db(reference: ComplexImage, estimate: ComplexImage) -> float:
    """
    20 log10(||reference|| / ||reference - estimate||).

    Returns +inf when the estimate matches exactly.
    """
    if reference.grid != estimate.grid:
        raise DimensionError(
            f"reference grid {reference.grid.shape} does not match estimate grid {estimate.grid.shape}"
        )
    ref_norm = reference.norm()
    if ref_norm == 0:
        raise ParameterError("SNR is undefined for a zero reference")
    err_norm = float(np.linalg.norm(reference.values - estimate.values))
    if err_norm == 0:
        return float("inf")
    return float(20.0 * np.log10(ref_norm / err_norm))


def component_leakage(estimate: ComplexImage, own: ComplexImage, other: ComplexImage) -> float:
    """
    Share of a recovered component's energy explained by the wrong component.

    The estimate is fitted as a * own + b * other by least squares; the
    result is ||b other||^2 / (||a own||^2 + ||b other||^2), or 0 for a
    zero fit.
    """
    for image in (own, other):
        if image.grid != estimate.grid:
            raise DimensionError("leakage needs images on one grid")
    basis = np.stack([own.values.ravel(), other.values.ravel()], axis=1)
    coef, *_ = np.linalg.lstsq(basis, estimate.values.ravel(), rcond=None)
    own_energy = float(np.linalg.norm(coef[0] * basis[:, 0]) ** 2)
    other_energy = float(np.linalg.norm(coef[1] * basis[:, 1]) ** 2)
    total = own_energy + other_energy
    return other_energy / total if total > 0 else 0.0


def error_image(reference: ComplexImage, estimate: ComplexImage) -> ComplexImage:
    """|reference - estimate| as a spatial image."""
    if reference.grid != estimate.grid:
        raise DimensionError(
            f"reference grid {reference.grid.shape} does not match estimate grid {estimate.grid.shape}"
        )
    return reference.replace(np.abs(reference.values - estimate.values))
