"""Exact solutions of the separated three-particle elliptic Calogero-Moser equation at integer coupling."""

import json

from ._core import (
    AnsatzParams,
    CmsepError,
    DegeneracyError,
    InputError,
    LatticeDegenerateError,
    MotionIntegrals,
    PeriodLattice,
    PoleError,
    bloch_factor,
    eval_B,
    format_complex,
    gamma_branches,
    ode_residual,
    parse_complex,
    psi,
    residuals,
    same_solution,
    solve,
    verify_params,
)
from ._core import reverify_report as _reverify_report
from ._core import run_config as _run_config


def run(path):
    """Solve and verify the problem file at `path`; returns (exit_code, report dict)."""
    code, text = _run_config(str(path))
    return code, json.loads(text)


def reverify(report):
    """Largest absolute difference between stored and recomputed metrics of a report dict."""
    return _reverify_report(json.dumps(report))


__all__ = [
    "AnsatzParams",
    "CmsepError",
    "DegeneracyError",
    "InputError",
    "LatticeDegenerateError",
    "MotionIntegrals",
    "PeriodLattice",
    "PoleError",
    "bloch_factor",
    "eval_B",
    "format_complex",
    "gamma_branches",
    "ode_residual",
    "parse_complex",
    "psi",
    "residuals",
    "reverify",
    "run",
    "same_solution",
    "solve",
    "verify_params",
]
