"""Fourier undersampling operator A and its adjoint."""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, ParameterError
from ..grid import ComplexImage, Domain, KGrid


@dataclass
class SamplingOp:
    """Binary k-space mask with the measured values on its support."""
    grid: KGrid
    mask: np.ndarray
    measurements: np.ndarray
    noise_sigma: float = 0.0

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != self.grid.shape:
            raise DimensionError(f"mask of shape {self.mask.shape} does not fit grid {self.grid.shape}")
        self.measurements = np.asarray(self.measurements, dtype=np.complex128).ravel()
        if self.measurements.size != self.n_samples:
            raise DimensionError(
                f"{self.measurements.size} measurements for {self.n_samples} sampled locations"
            )
        if self.noise_sigma < 0:
            raise ParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    @classmethod
    def from_kspace(
        cls,
        kspace: ComplexImage,
        mask: np.ndarray,
        noise_sigma: float = 0.0,
    ) -> "SamplingOp":
        """Sample a full-grid spectrum through `mask`."""
        kspace.require(kspace.grid, Domain.FOURIER)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != kspace.grid.shape:
            raise DimensionError(f"mask of shape {mask.shape} does not fit grid {kspace.grid.shape}")
        return cls(kspace.grid, mask, kspace.values[mask], noise_sigma)

    @property
    def n_samples(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def sample_fraction(self) -> float:
        return self.n_samples / self.grid.size

    @property
    def acceleration(self) -> float:
        return self.grid.size / max(self.n_samples, 1)

    @property
    def dc_sampled(self) -> bool:
        return bool(self.mask[self.grid.center])

    def forward(self, spectrum: np.ndarray) -> np.ndarray:
        """A: full-grid spectrum -> sampled values."""
        return np.asarray(spectrum)[self.mask]

    def adjoint(self, values: np.ndarray) -> np.ndarray:
        """A*: sampled values -> zero-filled full-grid spectrum."""
        out = np.zeros(self.grid.shape, dtype=np.complex128)
        out[self.mask] = values
        return out

    def normal(self, spectrum: np.ndarray) -> np.ndarray:
        """A*A: projection onto the sampled locations."""
        return np.where(self.mask, spectrum, 0.0)

    def zero_filled(self) -> np.ndarray:
        """A*b."""
        return self.adjoint(self.measurements)

    def data_misfit(self, spectrum: np.ndarray) -> float:
        """||A x - b||^2."""
        return float(np.sum(np.abs(self.forward(spectrum) - self.measurements) ** 2))
