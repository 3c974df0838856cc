"""N-section bracketing root finder.

Bisection generalized to N >= 2 subdivisions per iteration: each pass
evaluates the N - 1 interior nodes

    x_j = lo + (j * (hi - lo)) / N,        j = 1 .. N-1

left to right, keeps the leftmost subinterval whose endpoint signs differ,
and repeats.  One iteration shrinks the bracket by a factor of N at the
cost of N - 1 evaluations, so the iteration count falls like 1/log(N)
while per-iteration cost grows linearly — the trade-off quantified in
:mod:`multisection.model`.

Termination compares a *tracked* width ``w`` (initialized to ``hi - lo``
and updated ``w /= N`` each iteration) against ``width_tolerance`` rather
than recomputing ``hi - lo`` of the current bracket.  The two agree to a
rounding unit per step, but the tracked width keeps shrinking even after
the bracket endpoints collide to adjacent doubles, which makes iteration
counts reproducible and equal to :func:`predicted_max_iterations`.

A node value that is exactly zero terminates immediately.  The zero node
is reported as the root and recorded as the right endpoint of the chosen
subinterval (sign 0 differs from the nonzero sign to its left), so every
iteration record — including the last one of an exact-zero run — carries a
genuine subinterval of 1/N the parent width.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (
    BracketError,
    DomainError,
    EvaluationError,
    NoSignChangeError,
)

logger = logging.getLogger(__name__)

#: Default width tolerance: one binary64 spacing unit at scale 1.
MACHINE_WIDTH = 2.0 ** -52


def sign(value: float) -> int:
    """Return -1, 0, or +1.  NaN raises :class:`EvaluationError`."""
    if math.isnan(value):
        raise EvaluationError("function value is NaN")
    if value > 0.0:
        return 1
    if value < 0.0:
        return -1
    return 0


@dataclass(frozen=True)
class Interval:
    """A nonempty closed interval [lo, hi] with finite endpoints."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise DomainError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def midpoint(self) -> float:
        return self.lo + (self.hi - self.lo) / 2.0


@dataclass(frozen=True)
class Problem:
    """A root-finding problem: a callable and a bracket that traps a root."""

    id: str
    f: Callable[[float], float]
    bracket: Interval
    reference_root: Optional[float] = None

    def __post_init__(self) -> None:
        if self.reference_root is not None:
            if not (self.bracket.lo <= self.reference_root <= self.bracket.hi):
                raise DomainError(
                    f"reference root {self.reference_root} lies outside "
                    f"[{self.bracket.lo}, {self.bracket.hi}]"
                )


@dataclass(frozen=True)
class SolveOptions:
    """Solver knobs.

    ``max_iterations`` of None means "predicted iteration count plus two",
    a headroom cap that a correct run never hits.
    """

    sections: int = 2
    width_tolerance: float = MACHINE_WIDTH
    residual_tolerance: float = 0.0
    max_iterations: Optional[int] = None

    def __post_init__(self) -> None:
        if self.sections < 2:
            raise DomainError(f"sections must be >= 2, got {self.sections}")
        if not (self.width_tolerance > 0.0 and math.isfinite(self.width_tolerance)):
            raise DomainError(f"width_tolerance must be positive, got {self.width_tolerance}")
        if self.residual_tolerance < 0.0:
            raise DomainError(
                f"residual_tolerance must be >= 0, got {self.residual_tolerance}"
            )
        if self.max_iterations is not None and self.max_iterations < 0:
            raise DomainError(f"max_iterations must be >= 0, got {self.max_iterations}")


class Termination(Enum):
    """Why a solve stopped."""

    EXACT_ZERO = "ExactZero"
    WIDTH_REACHED = "WidthReached"
    RESIDUAL_REACHED = "ResidualReached"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class IterationRecord:
    """Everything one iteration did.

    ``evaluated_nodes`` holds exactly ``sections - 1`` pairs ``(x, f(x))``
    in ascending x.  ``exact_root`` is the zero node when this iteration
    hit one, else None; in that case it equals ``chosen_subinterval.hi``.
    """

    index: int
    interval_before: Interval
    evaluated_nodes: tuple[tuple[float, float], ...]
    chosen_subinterval: Interval
    exact_root: Optional[float] = None


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a solve.

    ``function_evaluations`` counts the two bracket-endpoint evaluations
    plus ``sections - 1`` per iteration.  The diagnostic residual probe at
    the returned root (for width/iteration-capped stops) is not counted:
    it is reporting, not search work.
    """

    root: float
    residual: float
    iterations: int
    function_evaluations: int
    trace: tuple[IterationRecord, ...]
    termination: Termination


def _validate_endpoints(problem: Problem) -> tuple[float, float, int, int]:
    """Evaluate f at the bracket endpoints once, validating as we go."""
    f = problem.f
    lo, hi = problem.bracket.lo, problem.bracket.hi
    f_lo = float(f(lo))
    f_hi = float(f(hi))
    if math.isnan(f_lo) or math.isnan(f_hi):
        bad = lo if math.isnan(f_lo) else hi
        raise EvaluationError(f"f({bad}) is NaN")
    s_lo, s_hi = sign(f_lo), sign(f_hi)
    if s_lo == s_hi:
        raise BracketError(
            f"f does not change sign over [{lo}, {hi}]: "
            f"f(lo)={f_lo}, f(hi)={f_hi}"
        )
    return f_lo, f_hi, s_lo, s_hi


def validate_bracket(problem: Problem) -> tuple[int, int]:
    """Check that the bracket traps a sign change; return the endpoint signs.

    Raises :class:`BracketError` when the signs match (including the
    degenerate case of both endpoints being exact zeros) and
    :class:`EvaluationError` on NaN.  A single exact-zero endpoint is a
    valid bracket: sign 0 differs from the other side.
    """
    _, _, s_lo, s_hi = _validate_endpoints(problem)
    return s_lo, s_hi


def _evaluate_nodes(
    f: Callable[[float], float], lo: float, hi: float, sections: int
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate f at the N-1 interior nodes, vectorized when f allows it.

    Node arithmetic is pinned to ``lo + (j * (hi - lo)) / N`` so vector and
    scalar paths produce bit-identical abscissas.
    """
    span = hi - lo
    j = np.arange(1, sections, dtype=np.float64)
    xs = lo + (j * span) / sections
    try:
        raw = f(xs)
        fs = np.asarray(raw, dtype=np.float64)
        if fs.shape != xs.shape:
            raise TypeError("shape mismatch")
    except EvaluationError:
        raise
    except Exception:
        fs = np.array([float(f(float(x))) for x in xs], dtype=np.float64)
    if np.isnan(fs).any():
        bad = xs[int(np.argmax(np.isnan(fs)))]
        raise EvaluationError(f"f({bad}) is NaN")
    return xs, fs


def _scan_segments(
    pts_x: list[float], pts_f: list[float]
) -> tuple[int, Interval, Optional[float]]:
    """Find the leftmost adjacent pair with differing signs.

    A zero value has sign 0 and therefore differs from any nonzero
    neighbor, so an exact zero is picked up by the same scan that finds
    sign changes; the zero endpoint of the pair is returned as the exact
    root.  Returns the left point's index so callers can look up cached f
    values positionally (point abscissas can coincide once the bracket is
    a single spacing unit wide).  Raises :class:`NoSignChangeError` when
    every pair matches.
    """
    s_prev = sign(pts_f[0])
    for k in range(1, len(pts_x)):
        s_k = sign(pts_f[k])
        if s_k != s_prev:
            chosen = Interval(pts_x[k - 1], pts_x[k])
            if pts_f[k] == 0.0:
                return k - 1, chosen, pts_x[k]
            if pts_f[k - 1] == 0.0:
                return k - 1, chosen, pts_x[k - 1]
            return k - 1, chosen, None
        s_prev = s_k
    raise NoSignChangeError(
        "no adjacent evaluation pair changes sign; "
        "is the function deterministic?"
    )


def _step(
    interval: Interval,
    f: Callable[[float], float],
    sections: int,
    index: int,
    f_lo: float,
    f_hi: float,
) -> tuple[IterationRecord, float, float]:
    """One multisection pass; returns the record plus the f values at the
    chosen subinterval's endpoints (so the caller never re-evaluates)."""
    xs, fs = _evaluate_nodes(f, interval.lo, interval.hi, sections)
    pts_x = [interval.lo, *xs.tolist(), interval.hi]
    pts_f = [f_lo, *fs.tolist(), f_hi]
    k, chosen, exact = _scan_segments(pts_x, pts_f)
    record = IterationRecord(
        index=index,
        interval_before=interval,
        evaluated_nodes=tuple(zip(xs.tolist(), fs.tolist())),
        chosen_subinterval=chosen,
        exact_root=exact,
    )
    return record, pts_f[k], pts_f[k + 1]


def multisect_step(
    interval: Interval,
    f: Callable[[float], float],
    sections: int,
    *,
    index: int = 1,
    f_lo: Optional[float] = None,
    f_hi: Optional[float] = None,
) -> IterationRecord:
    """Perform a single N-section pass over ``interval``.

    Preconditions: ``sections >= 2`` and f changes sign (or vanishes)
    across the interval.  Endpoint values can be passed in to avoid
    re-evaluation; otherwise they are computed here.
    """
    if sections < 2:
        raise DomainError(f"sections must be >= 2, got {sections}")
    if f_lo is None:
        f_lo = float(f(interval.lo))
    if f_hi is None:
        f_hi = float(f(interval.hi))
    if math.isnan(f_lo) or math.isnan(f_hi):
        raise EvaluationError("endpoint function value is NaN")
    record, _, _ = _step(interval, f, sections, index, f_lo, f_hi)
    return record


def predicted_max_iterations(
    interval: Interval, width_tolerance: float, sections: int
) -> int:
    """Number of iterations the solver will run before its tracked width
    drops to ``width_tolerance``.

    This simulates the solver's own update (``w /= sections`` in binary64)
    bit for bit, so ``solve`` with the same arguments performs exactly this
    many iterations unless it lands on an exact zero first.  Equivalently
    it is the smallest M with width / N**M <= tol, up to the rounding of
    repeated division.
    """
    if sections < 2:
        raise DomainError(f"sections must be >= 2, got {sections}")
    if not (width_tolerance > 0.0 and math.isfinite(width_tolerance)):
        raise DomainError(f"width_tolerance must be positive, got {width_tolerance}")
    w = interval.width
    count = 0
    while w > width_tolerance:
        w /= sections
        count += 1
    return count


def solve(
    problem: Problem,
    options: Optional[SolveOptions] = None,
    *,
    backend: Optional[str] = None,
) -> SolveResult:
    """Drive :func:`multisect_step` to convergence.

    ``backend`` selects the evaluation engine: "numpy" (the reference
    path below), "numba" (a compiled kernel producing the same records),
    or None to defer to the MULTISECTION_BACKEND environment variable and
    then to auto-detection.  See :mod:`multisection.kernels`.
    """
    if options is None:
        options = SolveOptions()

    from . import kernels  # deferred: kernels imports this module's types

    chosen_backend = kernels.resolve_backend(backend)
    if chosen_backend == "numba":
        result = kernels.solve_numba(problem, options)
        if result is not None:
            return result
        logger.warning(
            "numba backend unavailable for problem %r; using numpy path", problem.id
        )
    return _solve_reference(problem, options)


def _solve_reference(problem: Problem, options: SolveOptions) -> SolveResult:
    """The plain Python/numpy solve loop.  Semantics live here; the numba
    kernel in :mod:`multisection.kernels` must match it record for record."""
    f = problem.f
    sections = options.sections
    tol = options.width_tolerance
    rtol = options.residual_tolerance

    f_lo, f_hi, s_lo, s_hi = _validate_endpoints(problem)
    evaluations = 2
    if s_lo == 0 or s_hi == 0:
        root = problem.bracket.lo if s_lo == 0 else problem.bracket.hi
        return SolveResult(
            root=root,
            residual=0.0,
            iterations=0,
            function_evaluations=evaluations,
            trace=(),
            termination=Termination.EXACT_ZERO,
        )

    cap = options.max_iterations
    if cap is None:
        cap = predicted_max_iterations(problem.bracket, tol, sections) + 2

    current = problem.bracket
    w = current.width
    iterations = 0
    trace: list[IterationRecord] = []

    while True:
        if w <= tol:
            termination = Termination.WIDTH_REACHED
            root = current.midpoint()
            residual = float(f(root))  # diagnostic probe, not counted
            break
        if iterations >= cap:
            termination = Termination.MAX_ITERATIONS
            root = current.midpoint()
            residual = float(f(root))
            break

        record, nf_lo, nf_hi = _step(
            current, f, sections, iterations + 1, f_lo, f_hi
        )
        iterations += 1
        evaluations += sections - 1
        w /= sections
        trace.append(record)

        if record.exact_root is not None:
            return SolveResult(
                root=record.exact_root,
                residual=0.0,
                iterations=iterations,
                function_evaluations=evaluations,
                trace=tuple(trace),
                termination=Termination.EXACT_ZERO,
            )

        if rtol > 0.0:
            best_x, best_f = min(
                record.evaluated_nodes, key=lambda pair: abs(pair[1])
            )
            if abs(best_f) <= rtol:
                return SolveResult(
                    root=best_x,
                    residual=best_f,
                    iterations=iterations,
                    function_evaluations=evaluations,
                    trace=tuple(trace),
                    termination=Termination.RESIDUAL_REACHED,
                )

        current = record.chosen_subinterval
        f_lo, f_hi = nf_lo, nf_hi

    return SolveResult(
        root=root,
        residual=residual,
        iterations=iterations,
        function_evaluations=evaluations,
        trace=tuple(trace),
        termination=termination,
    )
