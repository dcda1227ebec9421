"""Fricke polynomials U, V, W of prime level and their isogeny numerators."""

__version__ = "0.1.0"
