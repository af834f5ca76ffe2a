"""Exact mutations and stability checks for spaces of complexes."""

__version__ = "0.1.0"
