"""Derivation-based symplectic mechanics on matrix and polynomial algebras.

Specs and element literals are plain dicts/lists (the same JSON the CLI reads);
reports come back as dicts with an added "exit_code" entry.
"""

import csv
import io
import json

import numpy as np

from . import _supmech
from ._supmech import (
    Error,
    ForbiddenCoupling,
    SpecParseError,
    StepTooLarge,
    default_tolerance,
    parse_algebra,
)

__version__ = _supmech.__version__

__all__ = [
    "Error",
    "ForbiddenCoupling",
    "SpecParseError",
    "StepTooLarge",
    "classify",
    "default_tolerance",
    "jacobi",
    "matrix_literal",
    "parse_algebra",
    "poisson_bracket",
    "run_dynamics",
    "to_matrix",
    "verify",
]


def _report(text):
    report = json.loads(text)
    report["exit_code"] = _supmech.exit_code(text)
    return report


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def matrix_literal(m):
    """Element literal for a complex matrix: nested [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[z.real, z.imag] for z in row] for row in m]


def to_matrix(literal):
    """Inverse of matrix_literal."""
    return np.array([[complex(*z) if isinstance(z, list) else complex(z) for z in row] for row in literal])


def _literal(x):
    if isinstance(x, np.ndarray):
        return matrix_literal(x)
    return x


def verify(target, algebra=None, trials=100, seed=1, hbar=None, hbar_right=None):
    """Run the calculus, symplectic, tensor, or dynamics suite."""
    return _report(_supmech.verify(target, algebra, trials, seed, hbar, hbar_right))


def classify(left, right, seed=11):
    """Classify a pair of single-system specs as commutative, quantum, or inconsistent worlds."""
    return _report(_supmech.classify(_text(left), _text(right), seed))


def jacobi(bracket, world, trials=20, seed=1):
    """Jacobi check of a tensor-product bracket in the commutative, quantum, or mixed world."""
    return _report(_supmech.jacobi(bracket, world, trials, seed))


def run_dynamics(spec, seed=11):
    """Evolve a system spec; returns (report, trajectory rows as dicts of floats)."""
    text, table = _supmech.run_dynamics(_text(spec), seed)
    rows = [{k: float(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(table))]
    return _report(text), rows


def poisson_bracket(spec, a, b):
    """Poisson bracket of two element literals (numpy matrices accepted) under the spec's form."""
    out = json.loads(_supmech.poisson_bracket(_text(spec), json.dumps(_literal(a)), json.dumps(_literal(b))))
    if isinstance(a, np.ndarray):
        return to_matrix(out)
    return out
