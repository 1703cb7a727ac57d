from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from bcsgl.gap import critical_temperature
from bcsgl.glcoeff import compute_coefficients
from bcsgl.model import builtin_potential

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


# Reference problem shared across the suite: gaussian 2 exp(-r^2), mu = 1.
# Solved once per session; every consumer treats the result as read-only.


@pytest.fixture(scope="session")
def reference_potential():
    return builtin_potential("gaussian", v0=2.0, a=1.0)


@pytest.fixture(scope="session")
def reference_solution(reference_potential):
    return critical_temperature(reference_potential, 1.0, bracket=(0.05, 0.3))


@pytest.fixture(scope="session")
def reference_coefficients(reference_solution):
    return compute_coefficients(reference_solution)
