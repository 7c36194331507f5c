"""Command-line surface."""
from .runner import (
    RunConfig,
    RunInputs,
    load_model,
    load_inputs,
    cmd_phantom,
    cmd_mask,
    cmd_recover,
    cmd_sweep,
    parse_lambdas,
    sweep_points,
)
from .main import build_parser, main

__all__ = [
    "RunConfig",
    "RunInputs",
    "load_model",
    "load_inputs",
    "cmd_phantom",
    "cmd_mask",
    "cmd_recover",
    "cmd_sweep",
    "parse_lambdas",
    "sweep_points",
    "build_parser",
    "main",
]
