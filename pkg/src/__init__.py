"""Adaptive structured low-rank recovery of images from undersampled k-space."""
__version__ = "1.0.0"
