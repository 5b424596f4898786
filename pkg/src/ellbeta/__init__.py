"""Numerical elliptic beta integrals: special functions, kernels, quadrature."""

__version__ = "0.1.0"
