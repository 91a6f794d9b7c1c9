"""Scattered linearized polynomials over finite fields: tests, probes, certificates."""

__version__ = "0.1.0"
