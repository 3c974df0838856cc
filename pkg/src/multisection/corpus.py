"""Benchmark corpus: six bracketed root-finding problems.

These cover the shapes a bracketing method meets in practice — trig,
exponential, polynomial, rational (with a pole just outside the bracket),
a damped oscillation, and a logarithm — each paired with a closed-form
reference root.  All functions are plain numpy-ufunc compositions, so one
definition serves three callers: scalar evaluation, vectorized node
evaluation over arrays, and nopython compilation by numba.

``exp(-x)*sin(x)`` on [-8, -5] deserves a note: the reference root is
x = -2π where sin vanishes, and the exp(-x) factor (~e^8) magnifies f
without moving the zero.  ``1/(10-x) - 1/4`` has its root at exactly 6.0,
where the function value in binary64 is exactly zero — useful for
exercising the exact-zero termination path.
"""

from __future__ import annotations

import math

import numpy as np

from .solver import Interval, Problem

__all__ = ["corpus", "builtin_functions", "BUILTIN_NAMES"]


def f_sin_cos(x):
    """sin(x) - cos(x); root at pi/4 within [0, pi/2]."""
    return np.sin(x) - np.cos(x)


def f_exp_gap(x):
    """exp(x) - 2 - x; root near 1.1462 within [1, 4]."""
    return np.exp(x) - 2.0 - x


def f_square_8(x):
    """x**2 - 8; root at -2*sqrt(2) within [-5, -2]."""
    return x * x - 8.0


def f_inv_shift(x):
    """1/(10-x) - 1/4; root at exactly 6 within [-2, 7]."""
    return 1.0 / (10.0 - x) - 0.25


def f_exp_sin(x):
    """exp(-x)*sin(x); root at -2*pi within [-8, -5]."""
    return np.exp(-x) * np.sin(x)


def f_log_square(x):
    """log(x**2) - 7; root at exp(3.5) within [20, 40]."""
    return np.log(x * x) - 7.0


# Root of exp(x) = x + 2 on [1, 4]; no elementary closed form.  Value
# computed once with 50-digit interval arithmetic and frozen here; the
# test suite re-derives it with an independent high-precision oracle.
_EXP_GAP_ROOT = 1.1461932206205825

_SPECS = (
    ("sin-cos", f_sin_cos, 0.0, math.pi / 2, math.pi / 4),
    ("exp-gap", f_exp_gap, 1.0, 4.0, _EXP_GAP_ROOT),
    ("square-8", f_square_8, -5.0, -2.0, -2.0 * math.sqrt(2.0)),
    ("inv-shift", f_inv_shift, -2.0, 7.0, 6.0),
    ("exp-sin", f_exp_sin, -8.0, -5.0, -2.0 * math.pi),
    ("log-square", f_log_square, 20.0, 40.0, math.exp(3.5)),
)

#: Names accepted by the command line's --function selector.
BUILTIN_NAMES = tuple(spec[0] for spec in _SPECS)


def corpus() -> list[Problem]:
    """Return the six benchmark problems, in their canonical order."""
    return [
        Problem(id=name, f=fn, bracket=Interval(lo, hi), reference_root=root)
        for name, fn, lo, hi, root in _SPECS
    ]


def builtin_functions() -> dict:
    """Map builtin function names to their callables (for CLI selectors)."""
    return {name: fn for name, fn, *_ in _SPECS}
