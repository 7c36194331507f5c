"""
Array file format and PNG export.

An array file is one ASCII header line `SLR1 <rows> <cols> <domain>\n`
followed by little-endian float64 (re, im) pairs in row-major order.
Masks use the same layout with values 0.0 / 1.0 in the fourier domain.
"""

from pathlib import Path
from typing import Tuple, Union

import imageio.v2 as imageio
import numpy as np
import structlog

from ..errors import DimensionError, FormatError
from ..grid import ComplexImage, Domain, KGrid

logger = structlog.get_logger()

MAGIC = "SLR1"
_DTYPE = np.dtype("<f8")

PathLike = Union[str, Path]


def write_array(path: PathLike, image: ComplexImage) -> Path:
    """Write an image or spectrum; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f"{MAGIC} {image.grid.n_rows} {image.grid.n_cols} {image.domain.value}\n"
    payload = np.stack([image.values.real, image.values.imag], axis=-1).astype(_DTYPE)
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(payload.tobytes())
    logger.debug("Array written", path=str(path), shape=image.grid.shape, domain=image.domain.value)
    return path


def _parse_header(line: bytes, path: Path) -> Tuple[KGrid, Domain]:
    try:
        fields = line.decode("ascii").split()
    except UnicodeDecodeError:
        raise FormatError("header is not ASCII", path=str(path))
    if len(fields) != 4 or fields[0] != MAGIC:
        raise FormatError(f"expected header '{MAGIC} <rows> <cols> <domain>'", path=str(path))
    try:
        rows, cols = int(fields[1]), int(fields[2])
    except ValueError:
        raise FormatError(f"grid size '{fields[1]} {fields[2]}' is not an integer pair", path=str(path))
    try:
        domain = Domain(fields[3])
    except ValueError:
        raise FormatError(f"unknown domain tag '{fields[3]}'", path=str(path))
    try:
        grid = KGrid(rows, cols)
    except DimensionError as e:
        raise FormatError(str(e), path=str(path))
    return grid, domain


def read_array(path: PathLike) -> ComplexImage:
    """
    Read an array file.

    Raises:
        FormatError: unreadable file, bad header, or payload of the wrong length
    """
    path = Path(path)
    try:
        with open(path, "rb") as f:
            header = f.readline(256)
            payload = f.read()
    except OSError as e:
        raise FormatError(f"cannot read file ({e.strerror})", path=str(path))
    if not header.endswith(b"\n"):
        raise FormatError("missing header line", path=str(path))

    grid, domain = _parse_header(header, path)
    expected = grid.size * 2 * _DTYPE.itemsize
    if len(payload) != expected:
        raise FormatError(f"payload has {len(payload)} bytes, expected {expected}", path=str(path))
    pairs = np.frombuffer(payload, dtype=_DTYPE).reshape(grid.n_rows, grid.n_cols, 2)
    return ComplexImage(grid, pairs[..., 0] + 1j * pairs[..., 1], domain)


def write_mask(path: PathLike, mask: np.ndarray) -> Path:
    """Write a boolean mask as a 0/1 fourier-domain array."""
    mask = np.asarray(mask, dtype=bool)
    grid = KGrid(*mask.shape)
    return write_array(path, ComplexImage(grid, mask.astype(np.float64), Domain.FOURIER))


def read_mask(path: PathLike) -> np.ndarray:
    """Read a mask written by write_mask."""
    image = read_array(path)
    values = image.values
    if np.any(values.imag != 0) or not np.all(np.isin(values.real, (0.0, 1.0))):
        raise FormatError("mask values must be 0 or 1", path=str(path))
    return values.real == 1.0


def write_png(path: PathLike, image: ComplexImage) -> Tuple[float, float]:
    """
    Export |image| as 8-bit grayscale, mapped linearly between its min and max.

    Returns:
        (min, max) of the magnitude
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    magnitude = np.abs(image.values)
    lo, hi = float(magnitude.min()), float(magnitude.max())
    if hi > lo:
        scaled = np.round(255.0 * (magnitude - lo) / (hi - lo))
    else:
        scaled = np.zeros_like(magnitude)
    imageio.imwrite(path, scaled.astype(np.uint8))
    logger.debug("PNG written", path=str(path), min=lo, max=hi)
    return lo, hi
