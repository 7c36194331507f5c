"""Variable-density random undersampling masks."""

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from ..errors import ParameterError
from ..grid import KGrid

logger = structlog.get_logger()


class MaskSpec(BaseModel):
    """Sampling density law and seed of a random mask."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_rows: int
    n_cols: int
    acceleration: float = Field(gt=0.0)
    density_decay: float = Field(default=1.5, gt=0.0)
    fully_sampled_center_radius: int = Field(default=4, ge=1)
    seed: int = Field(default=0, ge=0)

    @property
    def grid(self) -> KGrid:
        return KGrid(self.n_rows, self.n_cols)


def _radius(grid: KGrid) -> np.ndarray:
    kx, ky = grid.mesh()
    return np.sqrt(kx.astype(np.float64) ** 2 + ky.astype(np.float64) ** 2)


def sampling_density(spec: MaskSpec) -> np.ndarray:
    """
    Per-location sampling probability.

    p(k) = min(1, alpha * (1 + |k|)^(-decay)) outside the center disk and 1
    inside it, with alpha chosen so that sum(p) = grid size / R.

    Raises:
        ParameterError: R <= 1, or the center disk alone exceeds the budget
    """
    if spec.acceleration <= 1:
        raise ParameterError(f"acceleration must exceed 1, got {spec.acceleration}")

    grid = spec.grid
    radius = _radius(grid)
    center = radius <= spec.fully_sampled_center_radius
    budget = grid.size / spec.acceleration
    n_center = int(np.count_nonzero(center))
    if n_center > budget:
        raise ParameterError(
            f"center disk holds {n_center} samples, more than the budget of {budget:.1f} at R={spec.acceleration}"
        )

    profile = np.where(center, 0.0, (1.0 + radius) ** (-spec.density_decay))

    def expected(alpha: float) -> float:
        return n_center + float(np.sum(np.minimum(1.0, alpha * profile[~center]))) - budget

    if expected(0.0) >= 0.0:
        alpha = 0.0
    else:
        alpha_hi = 1.0 / float(np.min(profile[~center]))
        alpha = brentq(expected, 0.0, alpha_hi, xtol=1e-12)

    density = np.minimum(1.0, alpha * profile)
    density[center] = 1.0
    return density


def make_mask(spec: MaskSpec) -> np.ndarray:
    """
    Draw independent Bernoulli samples from sampling_density().

    Returns:
        Boolean array of the grid shape; DC and the center disk are always set
    """
    density = sampling_density(spec)
    rng = np.random.default_rng(spec.seed)
    mask = rng.random(density.shape) < density

    fraction = float(np.mean(mask))
    logger.info(
        "Mask generated",
        grid=spec.grid.shape,
        target_acceleration=spec.acceleration,
        achieved_fraction=round(fraction, 6),
        achieved_acceleration=round(1.0 / fraction, 6),
    )
    return mask
