"""Exact and spectral tools for translation actions, their cohomology, and nilpotent Lie algebras."""

__version__ = "0.1.0"
