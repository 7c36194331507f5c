"""Synthetic phantoms, sampling masks, metrics and array files."""
from .phantom import (
    Profile,
    Rectangle,
    Disk,
    PhantomSpec,
    make_phantom,
    analytic_spectrum,
    edge_filter,
    random_phantom_spec,
)
from .masks import MaskSpec, sampling_density, make_mask
from .metrics import add_noise, snr_db, component_leakage, error_image
from .array_io import write_array, read_array, write_mask, read_mask, write_png

__all__ = [
    "Profile",
    "Rectangle",
    "Disk",
    "PhantomSpec",
    "make_phantom",
    "analytic_spectrum",
    "edge_filter",
    "random_phantom_spec",
    "MaskSpec",
    "sampling_density",
    "make_mask",
    "add_noise",
    "snr_db",
    "component_leakage",
    "error_image",
    "write_array",
    "read_array",
    "write_mask",
    "read_mask",
    "write_png",
]
