"""Refinement constraint solving through IMP model checking.

Each function takes source text and returns plain Python values. Errors
from parsing, type checking or the solver raise HmcError.
"""

import json

from . import _hmc
from ._hmc import HmcError

__all__ = ["HmcError", "check", "translate", "validate", "exec_program"]


def check(text, *, oracle=False, clone=True, mode="solver", int_range=(-2, 2), max_preds=8, smt_cmd=None):
    """Solve a constraint set. Returns the JSON report as a dict."""
    lo, hi = int_range
    return json.loads(_hmc.check(text, oracle, clone, mode, lo, hi, max_preds, smt_cmd))


def translate(text, *, clone=True, simplify=False):
    """Return the IMP program for a constraint set as text."""
    return _hmc.translate(text, clone, simplify)


def validate(text, solution, *, mode="solver", int_range=(-2, 2), smt_cmd=None):
    lo, hi = int_range
    return json.loads(_hmc.validate(text, solution, mode, lo, hi, smt_cmd))


def exec_program(imp, *, semantics="relational", int_range=(-2, 2), fuel=None):
    """Explore an IMP program over a finite domain."""
    lo, hi = int_range
    return json.loads(_hmc.exec(imp, semantics, lo, hi, fuel))
