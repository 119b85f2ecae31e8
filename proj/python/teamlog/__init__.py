"""Python front end for the teamlog C++ core.

Structures, teams and coherence systems are plain dicts in the same JSON
layout the command-line tool reads and writes.
"""

import json

from . import _teamlog
from ._teamlog import TeamlogError

__all__ = [
    "TeamlogError",
    "format_formula",
    "evaluate",
    "sat",
    "translate",
    "crosscheck",
    "merge",
    "run_suite",
    "suite_names",
    "cli",
]


def format_formula(text, strict=False):
    """Canonical text of a formula."""
    return _teamlog.format_formula(text, strict)


def evaluate(structure, team, formula, strict=False, prune=True):
    """Verdict of ``structure |=_team formula`` with the call count."""
    return json.loads(
        _teamlog.eval_json(json.dumps(structure), json.dumps(team), formula, strict, prune)
    )


def sat(formulas, max_n=3, strict=False):
    return json.loads(_teamlog.sat_json(list(formulas), max_n, strict))


def translate(formula, vars=()):
    return json.loads(_teamlog.translate_json(formula, list(vars)))


def crosscheck(structure, team, formula):
    return json.loads(_teamlog.crosscheck_json(json.dumps(structure), json.dumps(team), formula))


def merge(system):
    return json.loads(_teamlog.merge_json(json.dumps(system)))


def run_suite(name, seed=7):
    return json.loads(_teamlog.suite_json(name, seed))


def suite_names():
    return list(_teamlog.suite_names())


def cli(*args):
    """Runs one command-line invocation in process; returns (exit code, report dict)."""
    code, text = _teamlog.cli([str(a) for a in args])
    return code, json.loads(text) if text.lstrip().startswith("{") else text
