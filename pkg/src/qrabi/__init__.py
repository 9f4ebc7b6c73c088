"""Quantum Rabi model: heat kernel, propagator, spectral zeta and G-functions."""

__version__ = "0.1.0"
