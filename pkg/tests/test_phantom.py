import numpy as np
import pytest
from pydantic import ValidationError

from src.data import (
    Disk,
    PhantomSpec,
    Profile,
    Rectangle,
    analytic_spectrum,
    edge_filter,
    make_phantom,
    random_phantom_spec,
)
from src.errors import DimensionError, ParameterError
from src.grid import Domain, KGrid
from src.lifting import FilterSupport


def test_constant_disk():
    spec = PhantomSpec(n_rows=32, n_cols=32, shapes=[Disk(cx=15, cy=16, radius=6)])
    rho, (rho1, rho2) = make_phantom(spec)
    assert not np.any(rho2.values)
    assert np.all(rho.values.imag == 0)
    assert set(np.unique(rho.values.real)) == {0.0, 1.0}
    assert rho.domain is Domain.SPATIAL


def test_linear_ramp_over_full_grid():
    spec = PhantomSpec(n_rows=16, n_cols=16, shapes=[
        Rectangle(x0=0, y0=0, x1=16, y1=16, amplitude=0.3, profile=Profile(kind="linear", gx=0.1, gy=-0.05)),
    ])
    rho, (rho1, rho2) = make_phantom(spec)
    assert not np.any(rho1.values)
    values = rho.values.real
    assert np.max(np.abs(np.diff(values, n=2, axis=1))) <= 1e-12
    assert np.max(np.abs(np.diff(values, n=2, axis=0))) <= 1e-12
    assert values[8, 8] == pytest.approx(0.3)


def test_mixed_phantom_is_sum_of_components(mixed_phantom_spec):
    rho, (rho1, rho2) = make_phantom(mixed_phantom_spec)
    np.testing.assert_array_equal(rho.values, rho1.values + rho2.values)
    assert np.any(rho1.values) and np.any(rho2.values)
    again, _ = make_phantom(mixed_phantom_spec)
    assert again.values.tobytes() == rho.values.tobytes()


def test_empty_and_out_of_grid_specs():
    with pytest.raises(ParameterError):
        make_phantom(PhantomSpec(n_rows=8, n_cols=8, shapes=[]))
    with pytest.raises(ValidationError):
        PhantomSpec(n_rows=8, n_cols=8, shapes=[Rectangle(x0=2, y0=2, x1=10, y1=4)])
    with pytest.raises(ValidationError):
        PhantomSpec(n_rows=8, n_cols=8, shapes=[Disk(cx=1, cy=4, radius=2)])
    with pytest.raises(ValidationError):
        Rectangle(x0=4, y0=2, x1=4, y1=5)


def test_shapes_parse_by_kind():
    spec = PhantomSpec.model_validate({
        "n_rows": 16, "n_cols": 16,
        "shapes": [
            {"kind": "disk", "cx": 8, "cy": 8, "radius": 3},
            {"kind": "rectangle", "x0": 1, "y0": 1, "x1": 5, "y1": 4, "profile": {"kind": "linear", "gx": 0.1}},
        ],
    })
    assert isinstance(spec.shapes[0], Disk)
    assert isinstance(spec.shapes[1], Rectangle)
    constant, linear = spec.components()
    assert len(constant) == 1 and len(linear) == 1


def test_analytic_dc_is_weighted_area(mixed_phantom_spec):
    rho_hat, (rho1_hat, rho2_hat) = analytic_spectrum(mixed_phantom_spec)
    grid = rho_hat.grid
    np.testing.assert_allclose(rho_hat.values, rho1_hat.values + rho2_hat.values)
    area_sum = sum(
        s.amplitude * (s.x1 - s.x0) * (s.y1 - s.y0) for s in mixed_phantom_spec.shapes
    )
    # The linear ramps are centered on their rectangles, so they add no mean.
    assert rho_hat.values[grid.center] == pytest.approx(area_sum / np.sqrt(grid.size))
    assert rho_hat.domain is Domain.FOURIER


def test_analytic_spectrum_of_full_grid_constant():
    spec = PhantomSpec(n_rows=8, n_cols=8, shapes=[Rectangle(x0=0, y0=0, x1=8, y1=8, amplitude=2.0)])
    rho_hat, _ = analytic_spectrum(spec)
    expected = np.zeros((8, 8), dtype=complex)
    expected[4, 4] = 2.0 * 8
    np.testing.assert_allclose(rho_hat.values, expected, atol=1e-12)


def test_analytic_spectrum_needs_rectangles():
    spec = PhantomSpec(n_rows=16, n_cols=16, shapes=[Disk(cx=8, cy=8, radius=3)])
    with pytest.raises(ParameterError):
        analytic_spectrum(spec)
    with pytest.raises(ParameterError):
        edge_filter(spec, FilterSupport(5, 5), 1)


def test_edge_filter_shape_and_size_checks(mixed_phantom_spec):
    filt = edge_filter(mixed_phantom_spec, FilterSupport(7, 7), order=1)
    assert filt.shape == (7, 7)
    # Two constant rectangles: four distinct edges per axis.
    assert np.count_nonzero(np.abs(filt) > 0) == 25
    with pytest.raises(DimensionError):
        edge_filter(mixed_phantom_spec, FilterSupport(3, 3), order=1)
    with pytest.raises(ParameterError):
        edge_filter(mixed_phantom_spec, FilterSupport(7, 7), order=3)


def test_edge_filter_vanishes_on_edges():
    spec = PhantomSpec(n_rows=16, n_cols=16, shapes=[Rectangle(x0=3, y0=5, x1=10, y1=12)])
    filt = edge_filter(spec, FilterSupport(3, 3), order=1)
    offsets = FilterSupport(3, 3).offsets()

    def mu(x, y):
        return sum(
            tap * np.exp(2j * np.pi * (a_x * x / 16 + a_y * y / 16))
            for tap, (a_x, a_y) in zip(filt.ravel(), offsets)
        )

    for x_edge in (3, 10):
        assert abs(mu(x_edge, 7.3)) <= 1e-12
    for y_edge in (5, 12):
        assert abs(mu(1.7, y_edge)) <= 1e-12
    assert abs(mu(6.5, 8.5)) > 0.1


def test_random_phantom_spec_is_deterministic():
    grid = KGrid(32, 32)
    first = random_phantom_spec(grid, n_constant=2, n_linear=2, seed=5)
    second = random_phantom_spec(grid, n_constant=2, n_linear=2, seed=5)
    assert first == second
    constant, linear = first.components()
    assert len(constant) == 2 and len(linear) == 2
    assert random_phantom_spec(grid, seed=6) != first
    disks = random_phantom_spec(grid, n_constant=1, n_linear=1, seed=2, disks=True)
    assert all(isinstance(shape, Disk) for shape in disks.shapes)
    with pytest.raises(ParameterError):
        random_phantom_spec(grid, n_constant=0, n_linear=0)
