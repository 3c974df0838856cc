"""Multisection: N-section bracketing root finding with an optimal-N model.

The solver generalizes bisection to N subdivisions per iteration; the
model answers "which N is fastest on this machine?" by fitting the
per-loop cost t = m*N + c and minimizing total time analytically via the
Lambert W function.  The bench module measures m and c on the host; the
convergence module verifies the per-iteration error bound
|p_i - p| <= (b-a)/N^i and explores its finite-precision endgame.
"""

from .bench import (
    CalibrationResult,
    LinearFit,
    LoopRunner,
    SweepConfig,
    SyntheticRunner,
    TimingSample,
    WallClockRunner,
    calibrate,
    fit_linear,
    measure_loop_time,
    per_solve_seconds,
    read_sweep_csv,
    sweep,
    write_sweep_csv,
)
from .convergence import (
    BoundCheckReport,
    BoundSequence,
    bound_at,
    first_index_below,
    underflow_exponent,
    verify_error_bounds,
)
from .corpus import builtin_functions, corpus
from .errors import (
    BoundViolation,
    BracketError,
    ClockError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    EvaluationError,
    FitError,
    MultisectionError,
    NoSignChangeError,
    RangeError,
)
from .kernels import available_backends, resolve_backend
from .lambert import check_w_identity, lambert_w0
from .model import (
    CostModel,
    EfficiencyReport,
    ProblemScale,
    efficiency_report,
    n_min_integer,
    n_min_real,
    rel_eff,
    total_function_evals,
    total_time,
)
from .solver import (
    Interval,
    IterationRecord,
    Problem,
    SolveOptions,
    SolveResult,
    Termination,
    multisect_step,
    predicted_max_iterations,
    solve,
    validate_bracket,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # solver
    "Interval", "Problem", "SolveOptions", "SolveResult", "IterationRecord",
    "Termination", "solve", "multisect_step", "validate_bracket",
    "predicted_max_iterations",
    # corpus
    "corpus", "builtin_functions",
    # backends
    "available_backends", "resolve_backend",
    # lambert
    "lambert_w0", "check_w_identity",
    # model
    "CostModel", "ProblemScale", "EfficiencyReport", "total_function_evals",
    "total_time", "n_min_real", "n_min_integer", "rel_eff", "efficiency_report",
    # bench
    "TimingSample", "LinearFit", "SweepConfig", "CalibrationResult",
    "LoopRunner", "WallClockRunner", "SyntheticRunner", "measure_loop_time",
    "sweep", "fit_linear", "calibrate", "per_solve_seconds",
    "write_sweep_csv", "read_sweep_csv",
    # convergence
    "BoundSequence", "BoundCheckReport", "bound_at", "first_index_below",
    "underflow_exponent", "verify_error_bounds",
    # errors
    "MultisectionError", "DomainError", "BracketError", "EvaluationError",
    "NoSignChangeError", "ConvergenceError", "ClockError", "DegenerateError",
    "FitError", "RangeError", "BoundViolation",
]
