"""Discrete Teichmuller harmonic map flow on a genus-2 hyperbolic surface."""
__version__ = "0.1.0"
