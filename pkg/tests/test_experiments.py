"""
Experiment-scale checks at 64x64. Deselected by default; run with
`pytest -m slow`.
"""

import json
import warnings

import numpy as np
import pytest

from src.cli import cmd_mask, cmd_sweep
from src.data import MaskSpec, component_leakage, make_mask, make_phantom, snr_db
from src.grid import fft2_centered
from src.solver import SamplingOp, SolverConfig, irls_recover
from tests.conftest import mixed_spec

pytestmark = pytest.mark.slow

LAMBDAS = [1e-4, 1e-3, 1e-2, 1e-1]


def undersampled(spec, seed=11, acceleration=2.0):
    rho, components = make_phantom(spec)
    mask = make_mask(MaskSpec(n_rows=spec.n_rows, n_cols=spec.n_cols, acceleration=acceleration, seed=seed))
    return SamplingOp.from_kspace(fft2_centered(rho), mask), rho, components


def best_snr(samp, truth, **solver):
    """Best SNR over a small lambda grid for one mode."""
    mode = solver.get("mode", "combined")
    if mode == "first_order":
        grid = [(l1, 1e-3) for l1 in LAMBDAS]
    elif mode == "second_order":
        grid = [(1e-3, l2) for l2 in LAMBDAS]
    else:
        grid = [(l1, l2) for l1 in LAMBDAS for l2 in LAMBDAS]
    return max(
        snr_db(truth, irls_recover(samp, SolverConfig(lambda1=l1, lambda2=l2, **solver)).rho)
        for l1, l2 in grid
    )


def test_surrogate_is_non_increasing_with_frozen_epsilon():
    samp, _, _ = undersampled(mixed_spec(64))
    cfg = SolverConfig(
        lambda1=1e-3, lambda2=1e-3, filter_size1=(7, 7), filter_size2=(7, 7),
        irls_iters=10, admm_iters_per_irls=200, epsilon_decay=1.0,
    )
    records = irls_recover(samp, cfg).diagnostics.records
    slack = 1e-6 * records[0].surrogate_before
    assert len({record.epsilon for record in records}) == 1
    for record in records:
        assert record.surrogate_after <= record.surrogate_before + slack


def test_combined_beats_single_components(tmp_path):
    spec = mixed_spec(64)
    (tmp_path / "phantom.json").write_text(spec.model_dump_json())
    (tmp_path / "mask.json").write_text(json.dumps({"n_rows": 64, "n_cols": 64, "acceleration": 2.0, "seed": 11}))
    cmd_mask(tmp_path / "mask.json", tmp_path)
    (tmp_path / "run.json").write_text(json.dumps({
        "modes": ["combined", "first_order", "second_order"],
        "phantom": "phantom.json",
        "mask": "mask.slr",
        "solver": {"filter_size1": [7, 7], "filter_size2": [7, 7]},
    }))
    frame = cmd_sweep(tmp_path / "run.json", LAMBDAS, LAMBDAS, workers=2, output_dir=tmp_path / "sweep")
    best = frame.groupby("mode")["snr_db"].max()

    assert best["combined"] >= best["first_order"] - 0.1
    assert best["combined"] >= best["second_order"] - 0.1
    assert best["combined"] >= min(best["first_order"], best["second_order"]) + 0.5


def test_components_separate_at_full_sampling():
    """
    Decomposition on mixed_spec(64) with a zero-offset ramp (the only
    identifiable split). Leakage limit 0.30, warning above 0.20, best over
    a small lambda2 grid.
    """
    spec = mixed_spec(64, offset=0.0, slope=2.0)
    rho, (true1, true2) = make_phantom(spec)
    samp = SamplingOp.from_kspace(fft2_centered(rho), np.ones(rho.grid.shape, dtype=bool))

    leakages = []
    for lambda2 in (1e-3, 1e-2, 1e-1):
        cfg = SolverConfig(
            lambda1=1e-3, lambda2=lambda2, filter_size1=(7, 7), filter_size2=(7, 7),
            irls_iters=15, admm_iters_per_irls=40,
        )
        rho1, rho2, _ = irls_recover(samp, cfg)
        leakages.append(max(component_leakage(rho1, true1, true2), component_leakage(rho2, true2, true1)))

    leakage = min(leakages)
    assert leakage <= 0.30
    if leakage > 0.20:
        warnings.warn(f"component leakage {leakage:.1%} above 20%")


@pytest.mark.parametrize("seed", [11, 12, 13])
def test_larger_filters_do_not_hurt(seed):
    samp, rho, _ = undersampled(mixed_spec(64), seed=seed)
    small = best_snr(samp, rho, filter_size1=(5, 5), filter_size2=(5, 5))
    large = best_snr(samp, rho, filter_size1=(11, 11), filter_size2=(11, 11))
    assert large >= small - 0.1
