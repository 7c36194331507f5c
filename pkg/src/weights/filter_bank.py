"""
IRLS weights from the eigen-decomposition of a lifted Gram matrix.

With (V, lam) the eigenpairs of G = T^H T, the weight matrix is

    H = (G + eps I)^(p/2 - 1) = V diag((lam + eps)^(p/2 - 1)) V^H

and the rows of H^(1/2) = diag((lam + eps)^(p/4 - 1/2)) V^H are scaled
annihilating filters. The sum-of-squares mask replaces the lifted penalty
by a spatial diagonal S(r) = sum_l (lam_l + eps)^(p/2 - 1) |mu_l(r)|^2.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import structlog

from config.settings import settings
from ..errors import DimensionError, NumericalError, ParameterError
from ..grid import KGrid, ifft2c
from ..lifting import FilterSupport

logger = structlog.get_logger()

# Filters transformed per batch in sos_mask.
_SOS_BATCH = 32


@dataclass
class FilterBank:
    """Eigenbasis of a Gram matrix together with its IRLS weights."""
    supp: Optional[FilterSupport]  # None for Gram matrices of non-rectangular size
    eigenvalues: np.ndarray  # ascending, clamped at 0
    eigenvectors: np.ndarray  # columns v_l, shape (|supp|, |supp|)
    epsilon: float
    p: float

    @property
    def weights(self) -> np.ndarray:
        """(lam_l + eps)^(p/2 - 1) per filter."""
        return (self.eigenvalues + self.epsilon) ** (self.p / 2.0 - 1.0)

    @property
    def scales(self) -> np.ndarray:
        """(lam_l + eps)^(p/4 - 1/2): row scaling of H^(1/2)."""
        return (self.eigenvalues + self.epsilon) ** (self.p / 4.0 - 0.5)

    def sqrt_matrix(self) -> np.ndarray:
        """H^(1/2) with row l equal to scale_l * v_l^H."""
        return self.scales[:, None] * self.eigenvectors.conj().T

    def weight_matrix(self) -> np.ndarray:
        """H = V diag(weights) V^H."""
        return (self.eigenvectors * self.weights) @ self.eigenvectors.conj().T

    def filters(self) -> np.ndarray:
        """Eigenvectors reshaped to filter arrays, shape (|supp|, f_rows, f_cols)."""
        if self.supp is None:
            raise DimensionError("filter bank has no rectangular support")
        return self.eigenvectors.T.reshape(self.supp.size, *self.supp.shape)


@dataclass
class SosMask:
    """Nonnegative spatial diagonal weights."""
    grid: KGrid
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.shape != self.grid.shape:
            raise DimensionError(
                f"mask of shape {self.entries.shape} does not fit grid {self.grid.shape}"
            )

    def mean(self) -> float:
        return float(np.mean(self.entries))


def _square_support(n_taps: int) -> Optional[FilterSupport]:
    side = int(round(np.sqrt(n_taps)))
    if side * side == n_taps and side % 2 == 1:
        return FilterSupport(side, side)
    return None


def weight_sqrt(
    gram: np.ndarray,
    epsilon: float,
    p: float,
    supp: Optional[FilterSupport] = None,
) -> FilterBank:
    """
    Eigen-decompose a shifted Gram matrix into an IRLS filter bank.

    Args:
        gram: Hermitian PSD matrix of size |supp| x |supp|
        epsilon: Positive shift eps_n
        p: Schatten exponent in (0, 1]
        supp: Filter support; inferred as a square support when omitted

    Returns:
        FilterBank with ascending eigenvalues
    """
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if not 0 < p <= 1:
        raise ParameterError(f"p must lie in (0, 1], got {p}")

    gram = np.asarray(gram, dtype=np.complex128)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise DimensionError(f"gram must be square, got shape {gram.shape}")
    if supp is None:
        supp = _square_support(gram.shape[0])
    if supp is not None and supp.size != gram.shape[0]:
        raise DimensionError(f"gram of size {gram.shape[0]} does not match support {supp.shape}")

    scale = max(1.0, float(np.max(np.abs(gram))))
    asymmetry = float(np.max(np.abs(gram - gram.conj().T)))
    if asymmetry > settings.eig_hermitian_tol * scale:
        raise NumericalError(f"gram is not Hermitian (max asymmetry {asymmetry:.3e})")

    eigenvalues, eigenvectors = scipy.linalg.eigh(gram)
    if eigenvalues[0] < -settings.eig_hermitian_tol * scale:
        logger.warning("Gram has negative eigenvalues", smallest=float(eigenvalues[0]))
    eigenvalues = np.clip(eigenvalues, 0.0, None)

    return FilterBank(
        supp=supp,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        epsilon=float(epsilon),
        p=float(p),
    )


def pad_filter(filt: np.ndarray, grid: KGrid) -> np.ndarray:
    """
    Zero-pad one or more centered filters to the grid.

    Args:
        filt: Array of shape (f_rows, f_cols) or (n, f_rows, f_cols)
        grid: Target grid

    Returns:
        k-space array(s) with the center tap at the DC index
    """
    filt = np.asarray(filt, dtype=np.complex128)
    f_rows, f_cols = filt.shape[-2:]
    FilterSupport(f_rows, f_cols).check_fits(grid)
    c_r, c_c = grid.center
    out = np.zeros(filt.shape[:-2] + grid.shape, dtype=np.complex128)
    out[..., c_r - f_rows // 2:c_r + f_rows // 2 + 1, c_c - f_cols // 2:c_c + f_cols // 2 + 1] = filt
    return out


def filter_polynomial(filt: np.ndarray, grid: KGrid) -> np.ndarray:
    """
    Trigonometric polynomial mu(r) of a k-space filter on the grid.

    Scaled so that circular convolution by the filter in k-space equals
    multiplication by mu in image space.
    """
    return np.sqrt(grid.size) * ifft2c(pad_filter(filt, grid))


def sos_mask(bank: FilterBank, grid: KGrid) -> SosMask:
    """Sum over the bank of weight_l * |mu_l(r)|^2."""
    filters = bank.filters()
    bank.supp.check_fits(grid)
    weights = bank.weights
    entries = np.zeros(grid.shape, dtype=np.float64)
    for start in range(0, len(weights), _SOS_BATCH):
        stop = start + _SOS_BATCH
        mu = filter_polynomial(filters[start:stop], grid)
        entries += np.tensordot(weights[start:stop], np.abs(mu) ** 2, axes=1)
    return SosMask(grid, entries)
