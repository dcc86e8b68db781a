"""Numerical surgery-slope certificates for genus-one two-bridge knots K(m, n)."""
__version__ = "0.1.0"
