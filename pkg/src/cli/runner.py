"""
Command implementations: phantom and mask generation, recovery and the
regularization sweep.

Every command reads a JSON file validated by a pydantic model and writes
its outputs below an output directory (settings.output_dir by default).
Relative input paths inside a run file resolve against the run file's
directory.
"""

import asyncio
import itertools
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config.settings import settings
from ..errors import ConfigError, DimensionError, ParameterError
from ..grid import ComplexImage, Domain, fft2_centered
from ..solver import SamplingOp, SolverConfig, SolverMode, irls_recover
from ..data import (
    MaskSpec,
    PhantomSpec,
    add_noise,
    error_image,
    make_mask,
    make_phantom,
    read_array,
    read_mask,
    snr_db,
    write_array,
    write_mask,
    write_png,
)

logger = structlog.get_logger()

REPORT_SCHEMA_VERSION = 1

ModelT = TypeVar("ModelT", bound=BaseModel)


def _default_solver() -> SolverConfig:
    size = settings.default_filter_size
    return SolverConfig(filter_size1=(size, size), filter_size2=(size, size))


class RunConfig(BaseModel):
    """Inputs, modes, solver parameters and exports of a recovery run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    modes: List[SolverMode] = Field(default_factory=lambda: [SolverMode.COMBINED], min_length=1)

    # Inputs: a phantom spec, or a k-space file with optional truth
    mask: str
    phantom: Optional[str] = None
    kspace: Optional[str] = None
    truth: Optional[str] = None

    # Simulated acquisition noise (phantom inputs only)
    noise_sigma: float = Field(default=0.0, ge=0.0)
    noise_seed: int = Field(default=0, ge=0)

    solver: SolverConfig = Field(default_factory=_default_solver)

    output_dir: Optional[str] = None
    export: List[Literal["raw", "png"]] = Field(default_factory=lambda: ["raw"])

    @model_validator(mode="after")
    def _one_source(self) -> "RunConfig":
        if (self.phantom is None) == (self.kspace is None):
            raise ValueError("exactly one of 'phantom' and 'kspace' must be given")
        if self.truth is not None and self.phantom is not None:
            raise ValueError("'truth' only applies to k-space inputs")
        return self

    def solver_for(self, mode: SolverMode) -> SolverConfig:
        return self.solver.model_copy(update={"mode": mode})


@dataclass
class RunInputs:
    """Sampling operator plus whatever ground truth is available."""
    samp: SamplingOp
    truth: Optional[ComplexImage] = None
    truth_components: Optional[Tuple[ComplexImage, ComplexImage]] = None


def load_model(path: Path, model: Type[ModelT]) -> ModelT:
    """
    Read and validate a JSON file.

    Raises:
        ConfigError: unreadable file, invalid JSON, or failed validation
            (the message names the file and each offending field)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: cannot read file ({e.strerror})")
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"{path}: {problems}")


def _output_dir(explicit: Optional[Path], fallback: Optional[Path] = None) -> Path:
    out = Path(explicit) if explicit is not None else Path(fallback or settings.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")
    return path


def _finite_or_none(value: float) -> Optional[float]:
    """JSON has no infinity; exact recoveries report null."""
    return float(value) if np.isfinite(value) else None


def _resolve(base: Path, name: str) -> Path:
    candidate = Path(name)
    return candidate if candidate.is_absolute() else base / candidate


def _run_output(run: RunConfig, run_path: Path) -> Optional[Path]:
    return _resolve(run_path.parent, run.output_dir) if run.output_dir else None


def cmd_phantom(spec_path: Path, output_dir: Optional[Path] = None) -> Dict[str, Path]:
    """
    Write rho, rho1 and rho2 of a phantom spec plus a phantom.json manifest.

    Returns:
        Mapping of output name to path
    """
    spec = load_model(spec_path, PhantomSpec)
    rho, (rho1, rho2) = make_phantom(spec)
    out = _output_dir(output_dir)

    files = {
        "rho": write_array(out / "rho.slr", rho),
        "rho1": write_array(out / "rho1.slr", rho1),
        "rho2": write_array(out / "rho2.slr", rho2),
    }
    if settings.png_export:
        for name, image in (("rho", rho), ("rho1", rho1), ("rho2", rho2)):
            write_png(out / f"{name}.png", image)

    constant, linear = spec.components()
    files["manifest"] = _write_json(out / "phantom.json", {
        "spec": spec.model_dump(mode="json"),
        "constant_shapes": len(constant),
        "linear_shapes": len(linear),
        "norms": {"rho": rho.norm(), "rho1": rho1.norm(), "rho2": rho2.norm()},
        "files": {name: path.name for name, path in files.items()},
    })
    logger.info("Phantom written", output_dir=str(out), grid=spec.grid.shape)
    return files


def cmd_mask(spec_path: Path, output_dir: Optional[Path] = None) -> Dict[str, Path]:
    """Write mask.slr and a mask.json manifest with the achieved sampling."""
    spec = load_model(spec_path, MaskSpec)
    mask = make_mask(spec)
    out = _output_dir(output_dir)

    n_samples = int(np.count_nonzero(mask))
    fraction = n_samples / mask.size
    files = {"mask": write_mask(out / "mask.slr", mask)}
    files["manifest"] = _write_json(out / "mask.json", {
        "spec": spec.model_dump(mode="json"),
        "n_samples": n_samples,
        "achieved_fraction": fraction,
        "achieved_acceleration": 1.0 / fraction,
        "files": {"mask": "mask.slr"},
    })
    logger.info("Mask written", output_dir=str(out), achieved_fraction=round(fraction, 6))
    return files


def load_inputs(run: RunConfig, base_dir: Path) -> RunInputs:
    """
    Build the sampling operator of a run.

    Phantom inputs are simulated through the mask with optional noise;
    k-space inputs are sampled directly.
    """
    mask = read_mask(_resolve(base_dir, run.mask))

    if run.phantom is not None:
        spec = load_model(_resolve(base_dir, run.phantom), PhantomSpec)
        rho, components = make_phantom(spec)
        if mask.shape != rho.grid.shape:
            raise DimensionError(f"mask of shape {mask.shape} does not fit phantom grid {rho.grid.shape}")
        samp = SamplingOp.from_kspace(fft2_centered(rho), mask)
        if run.noise_sigma > 0:
            samp = SamplingOp(
                samp.grid,
                mask,
                add_noise(samp.measurements, run.noise_sigma, run.noise_seed),
                noise_sigma=run.noise_sigma,
            )
        return RunInputs(samp, rho, components)

    kspace = read_array(_resolve(base_dir, run.kspace))
    if kspace.domain is not Domain.FOURIER:
        raise ParameterError(f"{run.kspace}: expected a fourier-domain array")
    if mask.shape != kspace.grid.shape:
        raise DimensionError(f"mask of shape {mask.shape} does not fit k-space grid {kspace.grid.shape}")
    truth = None
    if run.truth is not None:
        truth = read_array(_resolve(base_dir, run.truth))
        truth.require(kspace.grid, Domain.SPATIAL)
    return RunInputs(SamplingOp.from_kspace(kspace, mask), truth)


def _export(out: Path, name: str, image: ComplexImage, export: Sequence[str],
            files: Dict[str, str], png: Dict[str, List[float]]) -> None:
    if "raw" in export:
        write_array(out / f"{name}.slr", image)
        files[name] = f"{out.name}/{name}.slr"
    if "png" in export or settings.png_export:
        lo, hi = write_png(out / f"{name}.png", image)
        png[name] = [lo, hi]


def cmd_recover(run_path: Path, output_dir: Optional[Path] = None) -> dict:
    """
    Recover every mode of a run file and write images plus report.json.

    report.json holds the config echo, per-mode SNR, per-iteration
    diagnostics and PNG ranges; wall times go to timing.json.

    Returns:
        The report
    """
    run_path = Path(run_path)
    run = load_model(run_path, RunConfig)
    inputs = load_inputs(run, run_path.parent)
    out = _output_dir(output_dir, _run_output(run, run_path))
    samp = inputs.samp

    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": run.model_dump(mode="json"),
        "grid": list(samp.grid.shape),
        "n_samples": samp.n_samples,
        "acceleration": samp.acceleration,
        "modes": {},
    }
    timing = {}

    for mode in run.modes:
        cfg = run.solver_for(mode)
        logger.info("Recovering", mode=mode.value, run=str(run_path))
        started = time.perf_counter()
        result = irls_recover(samp, cfg)
        timing[mode.value] = time.perf_counter() - started

        mode_dir = out / mode.value
        mode_dir.mkdir(parents=True, exist_ok=True)
        files: Dict[str, str] = {}
        png: Dict[str, List[float]] = {}
        for name, image in (("rho", result.rho), ("rho1", result.rho1), ("rho2", result.rho2)):
            _export(mode_dir, name, image, run.export, files, png)

        entry = {
            "snr_db": None,
            "iterations": result.diagnostics.to_dict(),
            "files": files,
            "png_range": png,
        }
        if inputs.truth is not None:
            entry["snr_db"] = _finite_or_none(snr_db(inputs.truth, result.rho))
            _export(mode_dir, "error", error_image(inputs.truth, result.rho), run.export, files, png)
        report["modes"][mode.value] = entry
        logger.info("Mode finished", mode=mode.value, snr_db=entry["snr_db"], seconds=round(timing[mode.value], 3))

    _write_json(out / "report.json", report)
    _write_json(out / "timing.json", {"seconds": timing})
    return report


def parse_lambdas(text: str) -> List[float]:
    """'1e-3,1e-2' -> [0.001, 0.01]."""
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse lambda list '{text}'")
    if not values or any(v <= 0 for v in values):
        raise ParameterError(f"lambda list must hold positive numbers, got '{text}'")
    return values


def sweep_points(run: RunConfig, lambda1: Sequence[float], lambda2: Sequence[float]) -> List[Tuple[SolverMode, float, float]]:
    """
    (mode, lambda1, lambda2) grid per run mode.

    first_order varies lambda1 only, second_order lambda2 only, combined
    the full product; pinned lambdas keep the run's value.
    """
    points = []
    for mode in run.modes:
        if mode is SolverMode.FIRST_ORDER:
            points += [(mode, l1, run.solver.lambda2) for l1 in lambda1]
        elif mode is SolverMode.SECOND_ORDER:
            points += [(mode, run.solver.lambda1, l2) for l2 in lambda2]
        else:
            points += [(mode, l1, l2) for l1, l2 in itertools.product(lambda1, lambda2)]
    return points


def _solve_point(samp: SamplingOp, truth: ComplexImage, cfg: SolverConfig) -> float:
    result = irls_recover(samp, cfg)
    return snr_db(truth, result.rho)


async def _run_sweep(
    inputs: RunInputs,
    run: RunConfig,
    points: List[Tuple[SolverMode, float, float]],
    workers: int,
) -> List[dict]:
    semaphore = asyncio.Semaphore(workers)

    async def solve(mode: SolverMode, l1: float, l2: float) -> dict:
        cfg = run.solver.model_copy(update={"mode": mode, "lambda1": l1, "lambda2": l2})
        async with semaphore:
            snr = await asyncio.to_thread(_solve_point, inputs.samp, inputs.truth, cfg)
        logger.info("Sweep point finished", mode=mode.value, lambda1=l1, lambda2=l2, snr_db=snr)
        return {"mode": mode.value, "lambda1": l1, "lambda2": l2, "snr_db": snr}

    return await asyncio.gather(*(solve(*point) for point in points))


def cmd_sweep(
    run_path: Path,
    lambda1: Sequence[float],
    lambda2: Sequence[float],
    workers: Optional[int] = None,
    output_dir: Optional[Path] = None,
) -> pd.DataFrame:
    """
    Grid-search (lambda1, lambda2) for every mode of a run file.

    Writes sweep.csv with one row per solve and sweep.json with the best
    lambdas per mode. Requires ground truth.

    Returns:
        DataFrame with columns mode, lambda1, lambda2, snr_db
    """
    run_path = Path(run_path)
    run = load_model(run_path, RunConfig)
    inputs = load_inputs(run, run_path.parent)
    if inputs.truth is None:
        raise ParameterError("sweep needs ground truth (a phantom or a truth file)")
    workers = settings.sweep_workers if workers is None else workers
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    out = _output_dir(output_dir, _run_output(run, run_path))

    points = sweep_points(run, lambda1, lambda2)
    logger.info("Starting sweep", points=len(points), workers=workers)
    rows = asyncio.run(_run_sweep(inputs, run, points, workers))

    frame = pd.DataFrame(rows, columns=["mode", "lambda1", "lambda2", "snr_db"])
    frame.to_csv(out / "sweep.csv", index=False)

    best = {}
    for mode, group in frame.groupby("mode", sort=True):
        row = group.loc[group["snr_db"].idxmax()]
        best[mode] = {
            "lambda1": float(row["lambda1"]),
            "lambda2": float(row["lambda2"]),
            "snr_db": _finite_or_none(float(row["snr_db"])),
        }
    _write_json(out / "sweep.json", {"schema_version": REPORT_SCHEMA_VERSION, "best": best, "points": len(points)})
    return frame
