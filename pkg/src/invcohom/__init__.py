"""Exact cohomology workbench for left-invariant involutive structures."""

__version__ = "0.1.0"
