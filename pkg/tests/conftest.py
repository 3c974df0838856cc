"""Shared test configuration.

The suite pins the solver to the numpy backend via the environment so
that property tests generating fresh lambdas don't trigger a jit compile
per example; backend-specific tests pass ``backend=`` explicitly, which
always overrides the environment.
"""

import os

os.environ.setdefault("MULTISECTION_BACKEND", "numpy")

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")
