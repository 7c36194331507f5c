"""IRLS weight update: annihilating-filter bank and sum-of-squares masks."""
from .filter_bank import (
    FilterBank,
    SosMask,
    weight_sqrt,
    sos_mask,
    pad_filter,
    filter_polynomial,
)

__all__ = [
    "FilterBank",
    "SosMask",
    "weight_sqrt",
    "sos_mask",
    "pad_filter",
    "filter_polynomial",
]
