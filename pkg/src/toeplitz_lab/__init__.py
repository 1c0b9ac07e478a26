"""Truncated Toeplitz operators with inner symbols and the semigroups they generate."""

__version__ = "0.1.0"
