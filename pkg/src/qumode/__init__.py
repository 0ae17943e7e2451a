"""Continuous-variable photonic circuit simulation.

The package provides a small circuit language (:mod:`qumode.blackbird`), an
execution engine, a Gaussian (covariance-matrix) backend, a truncated Fock
backend, matrix decompositions, and reference algorithms.
"""
__version__ = "0.1.0"
