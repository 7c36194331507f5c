import json

import numpy as np
import pandas as pd
import pytest

from src.cli import RunConfig, cmd_mask, cmd_phantom, cmd_recover, cmd_sweep, load_model, main, parse_lambdas, sweep_points
from src.data import PhantomSpec, make_phantom, read_array, read_mask, write_array
from src.errors import ConfigError, DimensionError, ParameterError
from src.grid import fft2_centered

PHANTOM = {
    "n_rows": 16,
    "n_cols": 16,
    "seed": 1,
    "shapes": [
        {"kind": "rectangle", "x0": 2, "y0": 3, "x1": 8, "y1": 9, "amplitude": 1.0},
        {"kind": "rectangle", "x0": 9, "y0": 8, "x1": 15, "y1": 14, "amplitude": 0.5,
         "profile": {"kind": "linear", "gx": 0.05, "gy": 0.02}},
    ],
}

MASK = {"n_rows": 16, "n_cols": 16, "acceleration": 2.0, "fully_sampled_center_radius": 2, "seed": 4}

SOLVER = {"filter_size1": [3, 3], "filter_size2": [3, 3], "irls_iters": 2, "admm_iters_per_irls": 5}


def write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def workspace(tmp_path):
    """Phantom spec, mask file and a run file for all three modes."""
    write_json(tmp_path / "phantom.json", PHANTOM)
    cmd_mask(write_json(tmp_path / "mask_spec.json", MASK), tmp_path / "mask")
    write_json(tmp_path / "run.json", {
        "modes": ["combined", "first_order", "second_order"],
        "phantom": "phantom.json",
        "mask": "mask/mask.slr",
        "solver": SOLVER,
        "output_dir": "out",
    })
    return tmp_path


def test_phantom_command_writes_components(tmp_path):
    files = cmd_phantom(write_json(tmp_path / "spec.json", PHANTOM), tmp_path / "ph")
    assert {"rho", "rho1", "rho2", "manifest"} <= set(files)
    rho, (rho1, rho2) = make_phantom(PhantomSpec.model_validate(PHANTOM))
    np.testing.assert_array_equal(read_array(files["rho"]).values, rho.values)
    np.testing.assert_array_equal(read_array(files["rho2"]).values, rho2.values)
    manifest = json.loads(files["manifest"].read_text())
    assert manifest["constant_shapes"] == 1 and manifest["linear_shapes"] == 1


def test_missing_field_names_the_field(tmp_path):
    spec = {key: value for key, value in PHANTOM.items() if key != "n_rows"}
    with pytest.raises(ConfigError) as info:
        cmd_phantom(write_json(tmp_path / "spec.json", spec), tmp_path / "ph")
    assert "n_rows" in str(info.value)
    assert "spec.json" in str(info.value)


def test_invalid_json_is_a_config_error(tmp_path):
    (tmp_path / "broken.json").write_text("{not json")
    with pytest.raises(ConfigError):
        load_model(tmp_path / "broken.json", PhantomSpec)


def test_mask_command_manifest(tmp_path):
    spec = dict(MASK, n_rows=64, n_cols=64, acceleration=4.0)
    files = cmd_mask(write_json(tmp_path / "mask.json", spec), tmp_path / "m")
    mask = read_mask(files["mask"])
    manifest = json.loads(files["manifest"].read_text())
    assert manifest["achieved_fraction"] == pytest.approx(mask.mean())
    assert manifest["achieved_acceleration"] == pytest.approx(1 / mask.mean())
    assert 0.2 <= manifest["achieved_fraction"] <= 0.3


def test_mask_command_rejects_no_acceleration(tmp_path):
    with pytest.raises(ParameterError):
        cmd_mask(write_json(tmp_path / "mask.json", dict(MASK, acceleration=1.0)), tmp_path / "m")


def test_mask_command_is_byte_reproducible(tmp_path):
    spec = write_json(tmp_path / "mask.json", MASK)
    first = cmd_mask(spec, tmp_path / "a")
    second = cmd_mask(spec, tmp_path / "b")
    assert first["mask"].read_bytes() == second["mask"].read_bytes()
    assert first["manifest"].read_bytes() == second["manifest"].read_bytes()


def test_recover_writes_components_and_report(workspace):
    report = cmd_recover(workspace / "run.json")
    out = workspace / "out"
    assert report["schema_version"] == 1
    assert set(report["modes"]) == {"combined", "first_order", "second_order"}

    combined = report["modes"]["combined"]
    assert isinstance(combined["snr_db"], float)
    assert {"rho1", "rho2", "error"} <= set(combined["files"])
    assert len(combined["iterations"]["iterations"]) == 2
    assert (out / "combined" / "rho1.slr").exists() and (out / "combined" / "rho2.slr").exists()

    rho2_first = read_array(out / "first_order" / "rho2.slr")
    assert not np.any(rho2_first.values)
    rho1_second = read_array(out / "second_order" / "rho1.slr")
    assert not np.any(rho1_second.values)

    on_disk = json.loads((out / "report.json").read_text())
    assert on_disk == json.loads(json.dumps(report))
    timing = json.loads((out / "timing.json").read_text())
    assert set(timing["seconds"]) == set(report["modes"])


def test_recover_png_export_records_range(workspace):
    run = json.loads((workspace / "run.json").read_text())
    run.update(modes=["combined"], export=["raw", "png"], output_dir="png_out")
    report = cmd_recover(write_json(workspace / "run_png.json", run))
    png_range = report["modes"]["combined"]["png_range"]
    assert set(png_range) == {"rho", "rho1", "rho2", "error"}
    lo, hi = png_range["rho"]
    assert 0 <= lo <= hi
    assert (workspace / "png_out" / "combined" / "rho.png").exists()


def test_recover_is_deterministic(workspace):
    cmd_recover(workspace / "run.json", workspace / "first")
    cmd_recover(workspace / "run.json", workspace / "second")
    for name in ("report.json", "combined/rho.slr", "combined/rho1.slr", "second_order/rho2.slr"):
        assert (workspace / "first" / name).read_bytes() == (workspace / "second" / name).read_bytes()


def test_recover_from_kspace_file(workspace):
    rho, _ = make_phantom(PhantomSpec.model_validate(PHANTOM))
    write_array(workspace / "kspace.slr", fft2_centered(rho))
    write_array(workspace / "truth.slr", rho)
    write_json(workspace / "run_k.json", {
        "modes": ["first_order"],
        "kspace": "kspace.slr",
        "truth": "truth.slr",
        "mask": "mask/mask.slr",
        "solver": SOLVER,
    })
    report = cmd_recover(workspace / "run_k.json", workspace / "k_out")
    assert report["modes"]["first_order"]["snr_db"] > 0

    write_json(workspace / "mask_big.json", dict(MASK, n_rows=32, n_cols=32))
    cmd_mask(workspace / "mask_big.json", workspace / "big")
    write_json(workspace / "run_bad.json", {
        "kspace": "kspace.slr", "mask": "big/mask.slr", "solver": SOLVER,
    })
    with pytest.raises(DimensionError):
        cmd_recover(workspace / "run_bad.json", workspace / "bad_out")


def test_run_config_needs_exactly_one_source(workspace):
    write_json(workspace / "both.json", {"phantom": "phantom.json", "kspace": "k.slr", "mask": "mask/mask.slr"})
    with pytest.raises(ConfigError):
        load_model(workspace / "both.json", RunConfig)
    write_json(workspace / "neither.json", {"mask": "mask/mask.slr"})
    with pytest.raises(ConfigError):
        load_model(workspace / "neither.json", RunConfig)


def test_corrupt_input_reports_file_and_exits_2(workspace, capsys):
    (workspace / "mask" / "mask.slr").write_bytes(b"SLR1 16 16 fourier\n" + bytes(10))
    assert main(["recover", str(workspace / "run.json")]) == 2
    err = capsys.readouterr().err
    assert "mask.slr" in err


def test_main_runs_phantom_command(tmp_path):
    spec = write_json(tmp_path / "spec.json", PHANTOM)
    assert main(["phantom", str(spec), "--output-dir", str(tmp_path / "cli")]) == 0
    assert (tmp_path / "cli" / "rho.slr").exists()


def test_sweep_grid_and_outputs(workspace):
    frame = cmd_sweep(workspace / "run.json", [1e-4, 1e-2], [1e-3, 1e-1], workers=2, output_dir=workspace / "sw")
    assert len(frame) == 4 + 2 + 2
    assert list(frame.columns) == ["mode", "lambda1", "lambda2", "snr_db"]
    on_disk = pd.read_csv(workspace / "sw" / "sweep.csv")
    assert len(on_disk) == len(frame)
    best = json.loads((workspace / "sw" / "sweep.json").read_text())["best"]
    combined = frame[frame["mode"] == "combined"]
    assert best["combined"]["snr_db"] == pytest.approx(combined["snr_db"].max())


@pytest.mark.parametrize("workers", [0, -1])
def test_sweep_rejects_non_positive_workers(workspace, workers):
    with pytest.raises(ParameterError):
        cmd_sweep(workspace / "run.json", [1e-3], [1e-3], workers=workers, output_dir=workspace / "sw")
    assert not (workspace / "sw" / "sweep.csv").exists()


def test_sweep_points_pin_lambdas():
    run = RunConfig(modes=["first_order", "second_order"], phantom="p.json", mask="m.slr",
                    solver={"lambda1": 0.5, "lambda2": 0.25})
    points = sweep_points(run, [1.0, 2.0], [3.0])
    assert [(mode.value, l1, l2) for mode, l1, l2 in points] == [
        ("first_order", 1.0, 0.25), ("first_order", 2.0, 0.25), ("second_order", 0.5, 3.0),
    ]


def test_parse_lambdas():
    assert parse_lambdas("1e-3, 0.1") == [1e-3, 0.1]
    with pytest.raises(ParameterError):
        parse_lambdas("a,b")
    with pytest.raises(ParameterError):
        parse_lambdas("0,1")
