"""
Synthetic piecewise-constant plus piecewise-linear phantoms.

Pixel (row, col) has coordinates (y, x) = (row, col). Shapes with a
constant profile form the first component, shapes with a linear profile
the second; the phantom is their sum.
"""

from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DimensionError, ParameterError
from ..grid import ComplexImage, Domain, KGrid
from ..lifting import FilterSupport

logger = structlog.get_logger()


class Profile(BaseModel):
    """Intensity inside a shape: constant, or a linear ramp about the shape center."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant", "linear"] = "constant"
    gx: float = 0.0
    gy: float = 0.0

    @property
    def is_linear(self) -> bool:
        return self.kind == "linear"


class Rectangle(BaseModel):
    """Half-open box x0 <= x < x1, y0 <= y < y1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["rectangle"] = "rectangle"
    x0: float
    y0: float
    x1: float
    y1: float
    amplitude: float = 1.0
    profile: Profile = Profile()

    @model_validator(mode="after")
    def _ordered(self) -> "Rectangle":
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("rectangle needs x0 < x1 and y0 < y1")
        return self

    @property
    def center(self) -> Tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def bounds(self) -> Tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)

    def indicator(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x >= self.x0) & (x < self.x1) & (y >= self.y0) & (y < self.y1)


class Disk(BaseModel):
    """Closed disk (x - cx)^2 + (y - cy)^2 <= radius^2."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["disk"] = "disk"
    cx: float
    cy: float
    radius: float = Field(gt=0.0)
    amplitude: float = 1.0
    profile: Profile = Profile()

    @property
    def center(self) -> Tuple[float, float]:
        return (self.cx, self.cy)

    def bounds(self) -> Tuple[float, float, float, float]:
        return (self.cx - self.radius, self.cy - self.radius, self.cx + self.radius, self.cy + self.radius)

    def indicator(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x - self.cx) ** 2 + (y - self.cy) ** 2 <= self.radius ** 2


Shape = Annotated[Union[Rectangle, Disk], Field(discriminator="kind")]


class PhantomSpec(BaseModel):
    """Grid size, shape list and seed of a synthetic phantom."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_rows: int
    n_cols: int
    shapes: List[Shape]
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _inside_grid(self) -> "PhantomSpec":
        for i, shape in enumerate(self.shapes):
            x0, y0, x1, y1 = shape.bounds()
            if x0 < 0 or y0 < 0 or x1 > self.n_cols or y1 > self.n_rows:
                raise ValueError(f"shapes[{i}] extends outside the {self.n_rows}x{self.n_cols} grid")
        return self

    @property
    def grid(self) -> KGrid:
        return KGrid(self.n_rows, self.n_cols)

    def components(self) -> Tuple[List[Shape], List[Shape]]:
        """(constant-profile shapes, linear-profile shapes)."""
        constant = [s for s in self.shapes if not s.profile.is_linear]
        linear = [s for s in self.shapes if s.profile.is_linear]
        return constant, linear


def _shape_values(shape: Shape, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    inside = shape.indicator(x, y)
    if not shape.profile.is_linear:
        return np.where(inside, shape.amplitude, 0.0)
    xc, yc = shape.center
    ramp = shape.amplitude + shape.profile.gx * (x - xc) + shape.profile.gy * (y - yc)
    return np.where(inside, ramp, 0.0)


def make_phantom(spec: PhantomSpec) -> Tuple[ComplexImage, Tuple[ComplexImage, ComplexImage]]:
    """
    Sample a phantom on its pixel grid.

    Args:
        spec: Phantom description

    Returns:
        (rho, (rho1, rho2)) as spatial images with rho == rho1 + rho2
    """
    if not spec.shapes:
        raise ParameterError("phantom needs at least one shape")

    grid = spec.grid
    y, x = np.mgrid[0:grid.n_rows, 0:grid.n_cols].astype(np.float64)
    constant, linear = spec.components()

    rho1 = np.zeros(grid.shape)
    for shape in constant:
        rho1 += _shape_values(shape, x, y)
    rho2 = np.zeros(grid.shape)
    for shape in linear:
        rho2 += _shape_values(shape, x, y)

    logger.debug(
        "Phantom sampled",
        grid=grid.shape,
        constant_shapes=len(constant),
        linear_shapes=len(linear),
    )
    return (
        ComplexImage(grid, rho1 + rho2, Domain.SPATIAL),
        (ComplexImage(grid, rho1, Domain.SPATIAL), ComplexImage(grid, rho2, Domain.SPATIAL)),
    )


def _interval_moments(freqs: np.ndarray, n: int, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Zeroth and first moments of e^(-j w x) over [lo, hi), w = 2 pi k / n.

    Returns:
        (int e^(-jwx) dx, int x e^(-jwx) dx) per frequency
    """
    omega = 2.0 * np.pi * freqs / n
    m0 = np.empty(freqs.shape, dtype=np.complex128)
    m1 = np.empty(freqs.shape, dtype=np.complex128)
    dc = freqs == 0
    w = np.where(dc, 1.0, omega)
    e_lo = np.exp(-1j * w * lo)
    e_hi = np.exp(-1j * w * hi)
    m0[:] = (e_lo - e_hi) / (1j * w)
    m1[:] = (lo * e_lo - hi * e_hi) / (1j * w) + m0 / (1j * w)
    m0[dc] = hi - lo
    m1[dc] = 0.5 * (hi ** 2 - lo ** 2)
    return m0, m1


def _rectangle_spectrum(shape: Rectangle, grid: KGrid) -> np.ndarray:
    x0, m1x = _interval_moments(grid.freq_x(), grid.n_cols, shape.x0, shape.x1)
    y0, m1y = _interval_moments(grid.freq_y(), grid.n_rows, shape.y0, shape.y1)
    outer = np.outer
    if not shape.profile.is_linear:
        spectrum = shape.amplitude * outer(y0, x0)
    else:
        xc, yc = shape.center
        gx, gy = shape.profile.gx, shape.profile.gy
        offset = shape.amplitude - gx * xc - gy * yc
        spectrum = offset * outer(y0, x0) + gx * outer(y0, m1x) + gy * outer(m1y, x0)
    return spectrum / np.sqrt(grid.size)


def analytic_spectrum(spec: PhantomSpec) -> Tuple[ComplexImage, Tuple[ComplexImage, ComplexImage]]:
    """
    Exact Fourier-series coefficients of a rectangle phantom on the centered grid.

    The coefficients follow the unitary convention of fft2c, i.e. ifft2c of
    the result is the bandlimited truncation of the continuous phantom. Only
    rectangles have closed forms.

    Returns:
        (rho_hat, (rho1_hat, rho2_hat)) in the Fourier domain
    """
    if not spec.shapes:
        raise ParameterError("phantom needs at least one shape")
    if any(not isinstance(shape, Rectangle) for shape in spec.shapes):
        raise ParameterError("analytic spectra are only available for rectangles")

    grid = spec.grid
    constant, linear = spec.components()
    rho1 = sum((_rectangle_spectrum(s, grid) for s in constant), np.zeros(grid.shape, dtype=np.complex128))
    rho2 = sum((_rectangle_spectrum(s, grid) for s in linear), np.zeros(grid.shape, dtype=np.complex128))
    return (
        ComplexImage(grid, rho1 + rho2, Domain.FOURIER),
        (ComplexImage(grid, rho1, Domain.FOURIER), ComplexImage(grid, rho2, Domain.FOURIER)),
    )


def _axis_filter(edges: List[float], n: int, multiplicity: int) -> np.ndarray:
    roots = np.repeat(np.exp(-2j * np.pi * np.asarray(edges, dtype=np.float64) / n), multiplicity)
    return np.poly(roots).astype(np.complex128)


def edge_filter(spec: PhantomSpec, supp: FilterSupport, order: int) -> np.ndarray:
    """
    Annihilating filter of a rectangle phantom component.

    The edge polynomial is mu(x, y) = mu_x(x) mu_y(y), where each factor
    vanishes on every edge coordinate of the component along its axis.
    Order 1 uses the constant-profile shapes with simple zeros; order 2 uses
    the linear-profile shapes with double zeros (mu squared).

    Args:
        spec: Rectangle phantom
        supp: Filter support the result is padded into
        order: 1 (gradient weighting) or 2 (Hessian weighting)

    Returns:
        Array of shape supp.shape
    """
    if order not in (1, 2):
        raise ParameterError(f"order must be 1 or 2, got {order}")
    if any(not isinstance(shape, Rectangle) for shape in spec.shapes):
        raise ParameterError("edge filters are only available for rectangles")
    constant, linear = spec.components()
    shapes = constant if order == 1 else linear
    if not shapes:
        raise ParameterError(f"phantom has no shapes annihilated at order {order}")

    x_edges = sorted({e % spec.n_cols for s in shapes for e in (s.x0, s.x1)})
    y_edges = sorted({e % spec.n_rows for s in shapes for e in (s.y0, s.y1)})
    cx = _axis_filter(x_edges, spec.n_cols, order)
    cy = _axis_filter(y_edges, spec.n_rows, order)
    if cy.size > supp.f_rows or cx.size > supp.f_cols:
        raise DimensionError(
            f"edge filter needs support {(cy.size, cx.size)}, got {supp.shape}"
        )

    filt = np.zeros(supp.shape, dtype=np.complex128)
    filt[:cy.size, :cx.size] = np.outer(cy, cx)
    return filt


def random_phantom_spec(
    grid: KGrid,
    n_constant: int = 2,
    n_linear: int = 1,
    seed: int = 0,
    disks: bool = False,
) -> PhantomSpec:
    """
    Draw a phantom with non-degenerate shapes, deterministic in seed.

    Args:
        grid: Target grid
        n_constant: Number of constant-profile shapes
        n_linear: Number of linear-profile shapes
        seed: Generator seed, stored on the returned PhantomSpec
        disks: Draw disks instead of integer-aligned rectangles

    Returns:
        PhantomSpec
    """
    if n_constant + n_linear < 1:
        raise ParameterError("phantom needs at least one shape")
    rng = np.random.default_rng(seed)
    shapes = []
    for i in range(n_constant + n_linear):
        linear = i >= n_constant
        amplitude = float(rng.uniform(0.5, 1.5))
        if disks:
            radius = float(rng.uniform(min(grid.shape) / 10, min(grid.shape) / 5))
            cx = float(rng.uniform(radius, grid.n_cols - radius))
            cy = float(rng.uniform(radius, grid.n_rows - radius))
            extent = 2 * radius
        else:
            width = int(rng.integers(max(2, grid.n_cols // 8), max(3, grid.n_cols // 3) + 1))
            height = int(rng.integers(max(2, grid.n_rows // 8), max(3, grid.n_rows // 3) + 1))
            x0 = int(rng.integers(0, grid.n_cols - width + 1))
            y0 = int(rng.integers(0, grid.n_rows - height + 1))
            extent = max(width, height)
        profile = (
            Profile(kind="linear", gx=float(rng.uniform(-1, 1) / extent), gy=float(rng.uniform(-1, 1) / extent))
            if linear
            else Profile()
        )
        if disks:
            shapes.append(Disk(cx=cx, cy=cy, radius=radius, amplitude=amplitude, profile=profile))
        else:
            shapes.append(Rectangle(
                x0=x0, y0=y0, x1=x0 + width, y1=y0 + height, amplitude=amplitude, profile=profile,
            ))
    return PhantomSpec(n_rows=grid.n_rows, n_cols=grid.n_cols, shapes=shapes, seed=seed)
