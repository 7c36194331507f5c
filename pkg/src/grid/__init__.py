"""k-space grid, unitary FFT pair and derivative weightings."""
from .kgrid import (
    Domain,
    KGrid,
    ComplexImage,
    MultiChannelImage,
    fft2c,
    ifft2c,
    fft2_centered,
    ifft2_centered,
)
from .derivatives import (
    DerivativeOrder,
    DerivativeOp,
    apply_derivative,
    apply_derivative_adjoint,
)

__all__ = [
    "Domain",
    "KGrid",
    "ComplexImage",
    "MultiChannelImage",
    "fft2c",
    "ifft2c",
    "fft2_centered",
    "ifft2_centered",
    "DerivativeOrder",
    "DerivativeOp",
    "apply_derivative",
    "apply_derivative_adjoint",
]
