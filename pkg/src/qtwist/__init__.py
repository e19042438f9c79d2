"""Exact simulation and analysis of a two-qubit circuit whose classical
deduction chain is locally sound but globally invalid."""

from . import circuit, logic, optics, qcore, tomography

__all__ = ["circuit", "logic", "optics", "qcore", "tomography"]
__version__ = "0.1.0"
