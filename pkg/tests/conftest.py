"""Shared fixtures: seeded generators, small grids and phantoms."""

import numpy as np
import pytest

from src.data import PhantomSpec, Profile, Rectangle
from src.grid import ComplexImage, Domain, KGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def grid8():
    return KGrid(8, 8)


@pytest.fixture
def grid16():
    return KGrid(16, 16)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_spectrum(rng, grid):
    return ComplexImage(grid, random_complex(rng, grid.shape), Domain.FOURIER)


def dense_ifft_matrix(grid):
    """Explicit F*: centered spectrum (row-major) -> image (row-major)."""
    kx, ky = grid.mesh()
    y, x = np.mgrid[0:grid.n_rows, 0:grid.n_cols]
    phase = (
        np.outer(x.ravel(), kx.ravel()) / grid.n_cols
        + np.outer(y.ravel(), ky.ravel()) / grid.n_rows
    )
    return np.exp(2j * np.pi * phase) / np.sqrt(grid.size)


def mixed_spec(n=32, offset=0.8, slope=1.0):
    """
    Two constant rectangles and one linear rectangle.

    offset is the linear rectangle's value at its center and slope scales
    its ramp. With offset=0 the split into constant and linear parts is
    unique; any nonzero offset could sit in either component.
    """
    s = n / 32
    return PhantomSpec(
        n_rows=n,
        n_cols=n,
        seed=3,
        shapes=[
            Rectangle(x0=4 * s, y0=5 * s, x1=14 * s, y1=15 * s, amplitude=1.0),
            Rectangle(x0=18 * s, y0=3 * s, x1=28 * s, y1=11 * s, amplitude=0.6),
            Rectangle(
                x0=6 * s, y0=18 * s, x1=27 * s, y1=29 * s, amplitude=offset,
                profile=Profile(kind="linear", gx=0.03 * slope / s, gy=-0.02 * slope / s),
            ),
        ],
    )


@pytest.fixture
def mixed_phantom_spec():
    return mixed_spec(32)
