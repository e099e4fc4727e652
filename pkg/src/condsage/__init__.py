"""Conditional SAGE relaxations for signomial and polynomial optimization."""

from .conic import Model, SolveSettings, solve
from .problemfile import ProblemFile, ProblemFileError
from .recovery import (
    CandidateList,
    RecoverySettings,
    gf2_solve,
    poly_recover,
    recover,
    refine,
    sig_recover,
    variable_magnitudes,
    variable_signs,
)
from .relaxations import (
    HierarchyLevel,
    HierarchyTooLarge,
    ProblemSpec,
    RelaxationResult,
    build_level,
    solve_level,
    solve_spec,
)
from .sage_cones import is_sage, sage_bound
from .sets import (
    ConicSet,
    SignSymmetricDomain,
    box,
    from_signomial_constraints,
    linear_set,
    log_annulus,
    log_ball,
    log_box,
    orthant_domain,
    whole_space,
)
from .symbolic import Polynomial, Signomial

__version__ = "0.1.0"

__all__ = [
    "CandidateList", "ConicSet", "HierarchyLevel", "HierarchyTooLarge", "Model",
    "Polynomial", "ProblemFile", "ProblemFileError", "ProblemSpec", "RecoverySettings",
    "RelaxationResult", "SignSymmetricDomain", "Signomial", "SolveSettings", "box",
    "build_level", "from_signomial_constraints", "gf2_solve", "is_sage", "linear_set",
    "log_annulus", "log_ball", "log_box", "orthant_domain", "poly_recover", "recover",
    "refine", "sage_bound", "sig_recover", "solve", "solve_level", "solve_spec",
    "variable_magnitudes", "variable_signs", "whole_space",
]
