"""Conic modeling, standard-form programs and solver backends."""

from .expcone import in_exp_cone, project_exp_cone, project_exp_dual
from .model import Expr, Model, lin
from .program import ConicProgram, SolveSettings, Solution, cone_distance, residuals
from .solvers import BACKENDS, solve

__all__ = [
    "BACKENDS", "ConicProgram", "Expr", "Model", "SolveSettings", "Solution",
    "cone_distance", "lin", "in_exp_cone", "project_exp_cone", "project_exp_dual",
    "residuals", "solve",
]
