"""Inverse-power-law collision kernels, their hard-sphere limit, and a DSMC solver."""

__version__ = "0.1.0"
