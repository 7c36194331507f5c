"""
Fourier-domain derivative weightings.

First order stacks (d/dx, d/dy); second order stacks (d2/dxx, d2/dxy, d2/dyy).
Per axis the multiplier is j*2*pi*k/N, so derivative scales do not depend
on the grid size.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Tuple

import numpy as np

from ..errors import DimensionError
from .kgrid import ComplexImage, Domain, KGrid, MultiChannelImage


class DerivativeOrder(Enum):
    """Order of the derivative weighting."""
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class DerivativeOp:
    """Diagonal k-space multipliers M1 (gradient) or M2 (Hessian)."""
    grid: KGrid
    order: DerivativeOrder

    @property
    def channels(self) -> int:
        return 2 if self.order is DerivativeOrder.FIRST else 3

    @property
    def channel_names(self) -> Tuple[str, ...]:
        if self.order is DerivativeOrder.FIRST:
            return ("x", "y")
        return ("xx", "xy", "yy")

    @cached_property
    def multipliers(self) -> np.ndarray:
        """Array of shape (channels, n_rows, n_cols)."""
        kx, ky = self.grid.mesh()
        wx = 2j * np.pi * kx / self.grid.n_cols
        wy = 2j * np.pi * ky / self.grid.n_rows
        if self.order is DerivativeOrder.FIRST:
            stack = np.stack([wx, wy])
        else:
            stack = np.stack([wx * wx, wx * wy, wy * wy])
        stack.setflags(write=False)
        return stack

    @cached_property
    def normal_diagonal(self) -> np.ndarray:
        """Diagonal of M*M, i.e. sum over channels of |w_ch(k)|^2."""
        diag = np.sum(np.abs(self.multipliers) ** 2, axis=0)
        diag.setflags(write=False)
        return diag

    def weight(self, spectrum: np.ndarray) -> np.ndarray:
        """Array-level M: (n_rows, n_cols) -> (channels, n_rows, n_cols)."""
        return self.multipliers * spectrum

    def weight_adjoint(self, channels: np.ndarray) -> np.ndarray:
        """Array-level M*: (channels, n_rows, n_cols) -> (n_rows, n_cols)."""
        return np.sum(np.conj(self.multipliers) * channels, axis=0)


def apply_derivative(op: DerivativeOp, rho_hat: ComplexImage) -> MultiChannelImage:
    """Multiply a spectrum by every channel multiplier of `op`."""
    if rho_hat.grid != op.grid:
        raise DimensionError(
            f"spectrum grid {rho_hat.grid.shape} does not match operator grid {op.grid.shape}"
        )
    rho_hat.require(op.grid, Domain.FOURIER)
    return MultiChannelImage(op.grid, op.weight(rho_hat.values), Domain.FOURIER)


def apply_derivative_adjoint(op: DerivativeOp, channels: MultiChannelImage) -> ComplexImage:
    """Adjoint of apply_derivative: sum of conj(w_ch) * channel."""
    if channels.grid != op.grid:
        raise DimensionError(
            f"channel grid {channels.grid.shape} does not match operator grid {op.grid.shape}"
        )
    if channels.n_channels != op.channels:
        raise DimensionError(
            f"expected {op.channels} channels for {op.order.value} order, got {channels.n_channels}"
        )
    return ComplexImage(op.grid, op.weight_adjoint(channels.channels), Domain.FOURIER)
