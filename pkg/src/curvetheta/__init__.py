"""Numerical tools for Riemann theta functions, hyperelliptic Jacobians and
the determinant identities that tie them together."""

__version__ = "0.1.0"
