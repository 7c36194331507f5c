"""
Cartesian k-space grid and the centered unitary FFT contract.

Arrays are stored row-major with shape (n_rows, n_cols). Rows carry the
k_y frequency and columns the k_x frequency. In k-space the DC sample sits
at array index (n_rows // 2, n_cols // 2); in image space the origin is
array index (0, 0).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from ..errors import DimensionError, ParameterError

_AXES = (-2, -1)


class Domain(Enum):
    """Which side of the Fourier transform an array lives on."""
    SPATIAL = "spatial"
    FOURIER = "fourier"


@dataclass(frozen=True)
class KGrid:
    """Rectangular grid of centered integer frequencies."""
    n_rows: int
    n_cols: int

    def __post_init__(self):
        for name, size in (("n_rows", self.n_rows), ("n_cols", self.n_cols)):
            if int(size) != size or size < 4 or size % 2:
                raise DimensionError(f"{name} must be an even integer >= 4, got {size}")

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def size(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def center(self) -> Tuple[int, int]:
        """Array index of the DC sample."""
        return (self.n_rows // 2, self.n_cols // 2)

    def freq_x(self) -> np.ndarray:
        """Centered k_x values along the columns."""
        return np.arange(-(self.n_cols // 2), self.n_cols // 2)

    def freq_y(self) -> np.ndarray:
        """Centered k_y values along the rows."""
        return np.arange(-(self.n_rows // 2), self.n_rows // 2)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return (KX, KY), each of shape (n_rows, n_cols)."""
        kx, ky = np.meshgrid(self.freq_x(), self.freq_y())
        return kx, ky

    def index(self, k_x: int, k_y: int) -> int:
        """Linear row-major offset of frequency (k_x, k_y)."""
        row = k_y + self.n_rows // 2
        col = k_x + self.n_cols // 2
        if not (0 <= row < self.n_rows and 0 <= col < self.n_cols):
            raise DimensionError(f"frequency ({k_x}, {k_y}) is outside the grid")
        return row * self.n_cols + col

    def frequency(self, offset: int) -> Tuple[int, int]:
        """Inverse of index(): linear offset -> (k_x, k_y)."""
        if not 0 <= offset < self.size:
            raise DimensionError(f"offset {offset} is outside the grid")
        row, col = divmod(offset, self.n_cols)
        return col - self.n_cols // 2, row - self.n_rows // 2


@dataclass
class ComplexImage:
    """A complex 2-D array on a KGrid, either an image or its spectrum."""
    grid: KGrid
    values: np.ndarray
    domain: Domain

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            if self.values.size != self.grid.size:
                raise DimensionError(
                    f"values of size {self.values.size} do not fit grid {self.grid.shape}"
                )
            self.values = self.values.reshape(self.grid.shape)

    @classmethod
    def zeros(cls, grid: KGrid, domain: Domain) -> "ComplexImage":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), domain)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def replace(self, values: np.ndarray) -> "ComplexImage":
        """Same grid and domain, new values."""
        return ComplexImage(self.grid, values, self.domain)

    def require(self, grid: KGrid, domain: Domain) -> None:
        """Raise unless the image lives on `grid` in `domain`."""
        if self.grid != grid:
            raise DimensionError(f"grid {self.grid.shape} does not match {grid.shape}")
        if self.domain is not domain:
            raise ParameterError(f"expected a {domain.value} image, got {self.domain.value}")


@dataclass
class MultiChannelImage:
    """Stack of same-grid arrays, shape (channels, n_rows, n_cols)."""
    grid: KGrid
    channels: np.ndarray
    domain: Domain

    def __post_init__(self):
        self.channels = np.asarray(self.channels, dtype=np.complex128)
        if self.channels.ndim != 3 or self.channels.shape[1:] != self.grid.shape:
            raise DimensionError(
                f"channel stack of shape {self.channels.shape} does not fit grid {self.grid.shape}"
            )

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.channels))


def fft2c(array: np.ndarray) -> np.ndarray:
    """Unitary centered 2-D DFT over the last two axes."""
    return np.fft.fftshift(np.fft.fft2(array, axes=_AXES, norm="ortho"), axes=_AXES)


def ifft2c(array: np.ndarray) -> np.ndarray:
    """Inverse of fft2c."""
    return np.fft.ifft2(np.fft.ifftshift(array, axes=_AXES), axes=_AXES, norm="ortho")


def fft2_centered(img: ComplexImage) -> ComplexImage:
    """Spatial image -> centered unitary spectrum."""
    img.require(img.grid, Domain.SPATIAL)
    return ComplexImage(img.grid, fft2c(img.values), Domain.FOURIER)


def ifft2_centered(spectrum: ComplexImage) -> ComplexImage:
    """Centered unitary spectrum -> spatial image."""
    spectrum.require(spectrum.grid, Domain.FOURIER)
    return ComplexImage(spectrum.grid, ifft2c(spectrum.values), Domain.SPATIAL)
