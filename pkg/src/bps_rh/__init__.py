"""Riemann-Hilbert problems for finite uncoupled BPS structures, with numerical checks."""

from .bps_core import BpsStructure, Ray, TorusPoint, double
from .rh_solver import RhEvaluation, y_solution, y_plus, y_minus

__all__ = ["BpsStructure", "Ray", "TorusPoint", "double", "RhEvaluation",
           "y_solution", "y_plus", "y_minus"]
__version__ = "0.1.0"
