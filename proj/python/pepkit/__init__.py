"""Worst-case performance of fixed-step first-order methods."""

import json

from ._core import (
    FunctionClass,
    ParseError,
    Problem,
    Solution,
    SolverError,
    StepMatrix,
    assemble,
    check_interpolable,
    conj_fgm_ogm,
    conj_gm_grad,
    conj_gm_obj,
    custom,
    fgm,
    gm,
    hopt,
    hopt_bounds,
    mfgm,
    ogm,
    proof,
    solve,
)
from . import _core

__all__ = [
    "FunctionClass", "ParseError", "Problem", "Solution", "SolverError", "StepMatrix",
    "assemble", "certificate", "check_interpolable", "conj_fgm_ogm", "conj_gm_grad",
    "conj_gm_obj", "custom", "fgm", "gm", "hopt", "hopt_bounds", "mfgm", "ogm", "proof",
    "reconstruct", "solve", "worst_case",
]


def certificate(problem, solution):
    """Preferred dual certificate with its verification report, as a dict."""
    return json.loads(_core.certificate_json(problem, solution))


def reconstruct(problem, solution):
    """Worst-case instance (factor, triples, achieved value) as a dict."""
    return json.loads(_core.reconstruct_json(problem, solution))


def worst_case(H, mu=0.0, L=1.0, R=1.0, criterion="obj"):
    """Solves the performance estimation problem and returns the solution."""
    problem = assemble(FunctionClass(mu, L), H, R, criterion)
    return solve(problem)
