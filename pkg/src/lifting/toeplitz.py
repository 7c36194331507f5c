"""
Toeplitz lifting T(rho_hat) and its Gram matrix on a filter support.

A filter c is stored as an (f_rows, f_cols) array; entry [p, q] sits at
the centered offset (a_y, a_x) = (p - f_rows // 2, q - f_cols // 2) and
its column in the lifted matrix is the row-major position p * f_cols + q.
Row r of a channel block corresponds to a valid shift s, i.e. one where
every s - a stays inside the grid, and

    T[r, (p, q)] = X[s - a(p, q)]

so T @ c equals the "valid" part of the linear convolution X * c.
Channel blocks are stacked in the order of DerivativeOp.channel_names.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError
from ..grid import ComplexImage, DerivativeOp, Domain, KGrid


@dataclass(frozen=True)
class FilterSupport:
    """Odd-sized rectangle of centered filter offsets."""
    f_rows: int
    f_cols: int

    def __post_init__(self):
        for name, size in (("f_rows", self.f_rows), ("f_cols", self.f_cols)):
            if int(size) != size or size < 1 or size % 2 == 0:
                raise DimensionError(f"{name} must be an odd positive integer, got {size}")

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.f_rows, self.f_cols)

    @property
    def size(self) -> int:
        return self.f_rows * self.f_cols

    @property
    def half(self) -> Tuple[int, int]:
        return (self.f_rows // 2, self.f_cols // 2)

    def offsets(self) -> np.ndarray:
        """Array of shape (size, 2) holding (a_x, a_y) per filter column."""
        ay, ax = np.meshgrid(
            np.arange(self.f_rows) - self.f_rows // 2,
            np.arange(self.f_cols) - self.f_cols // 2,
            indexing="ij",
        )
        return np.stack([ax.ravel(), ay.ravel()], axis=1)

    def check_fits(self, grid: KGrid) -> None:
        if self.f_rows > grid.n_rows or self.f_cols > grid.n_cols:
            raise DimensionError(
                f"filter {self.shape} is larger than grid {grid.shape}"
            )

    def valid_shape(self, grid: KGrid) -> Tuple[int, int]:
        """Number of valid shifts along (rows, cols)."""
        return (grid.n_rows - self.f_rows + 1, grid.n_cols - self.f_cols + 1)


@dataclass
class LiftedMatrix:
    """Explicit lifted matrix with its channel blocks stacked vertically."""
    matrix: np.ndarray
    supp: FilterSupport
    grid: KGrid
    n_channels: int

    @property
    def rows_per_channel(self) -> int:
        rows, cols = self.supp.valid_shape(self.grid)
        return rows * cols

    def block(self, channel: int) -> np.ndarray:
        """Rows belonging to one derivative channel."""
        n = self.rows_per_channel
        return self.matrix[channel * n:(channel + 1) * n]

    def valid_set(self) -> np.ndarray:
        """Centered (k_x, k_y) of each valid shift, shape (rows_per_channel, 2)."""
        h_r, h_c = self.supp.half
        rows, cols = self.supp.valid_shape(self.grid)
        sy, sx = np.meshgrid(
            np.arange(rows) + h_r - self.grid.n_rows // 2,
            np.arange(cols) + h_c - self.grid.n_cols // 2,
            indexing="ij",
        )
        return np.stack([sx.ravel(), sy.ravel()], axis=1)

    def apply(self, filt: np.ndarray) -> np.ndarray:
        """Matrix-vector product with a filter given as vector or 2-D array."""
        return self.matrix @ _filter_vector(filt, self.supp)


def _filter_vector(filt: np.ndarray, supp: FilterSupport) -> np.ndarray:
    vec = np.asarray(filt, dtype=np.complex128).ravel()
    if vec.size != supp.size:
        raise DimensionError(f"filter has {vec.size} taps, support needs {supp.size}")
    return vec


def _channel_block(weighted: np.ndarray, supp: FilterSupport) -> np.ndarray:
    # Reversed windows turn the sliding correlation into a convolution.
    windows = sliding_window_view(weighted, supp.shape)[:, :, ::-1, ::-1]
    return windows.reshape(-1, supp.size)


def build_lifted(rho_hat: ComplexImage, op: DerivativeOp, supp: FilterSupport) -> LiftedMatrix:
    """
    Build T(rho_hat) = [T_ch(rho_hat)] over all channels of `op`.

    Args:
        rho_hat: Spectrum on the operator grid
        op: Derivative weighting (first or second order)
        supp: Filter support

    Returns:
        LiftedMatrix of shape (channels * valid shifts, supp.size)
    """
    rho_hat.require(op.grid, Domain.FOURIER)
    supp.check_fits(op.grid)
    weighted = op.weight(rho_hat.values)
    blocks = [_channel_block(channel, supp) for channel in weighted]
    return LiftedMatrix(
        matrix=np.concatenate(blocks, axis=0),
        supp=supp,
        grid=op.grid,
        n_channels=op.channels,
    )


def gram_matrix(rho_hat: ComplexImage, op: DerivativeOp, supp: FilterSupport) -> np.ndarray:
    """T(rho_hat)^H T(rho_hat), accumulated channel by channel."""
    rho_hat.require(op.grid, Domain.FOURIER)
    supp.check_fits(op.grid)
    gram = np.zeros((supp.size, supp.size), dtype=np.complex128)
    for channel in op.weight(rho_hat.values):
        block = _channel_block(channel, supp)
        gram += block.conj().T @ block
    # Exact Hermitian symmetry regardless of summation rounding.
    return 0.5 * (gram + gram.conj().T)


def annihilation_residual(
    rho_hat: ComplexImage,
    op: DerivativeOp,
    supp: FilterSupport,
    filt: np.ndarray,
) -> float:
    """||T(rho_hat) c||_2 for a filter c on `supp`."""
    vec = _filter_vector(filt, supp)
    lifted = build_lifted(rho_hat, op, supp)
    return float(np.linalg.norm(lifted.matrix @ vec))
