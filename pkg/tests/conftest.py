import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hadamard_dr.manifolds import SPD, Euclidean, Hyperbolic, set_validation

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

BACKENDS = {
    "H2": lambda: Hyperbolic(2),
    "H3": lambda: Hyperbolic(3),
    "P2": lambda: SPD(2),
    "P3": lambda: SPD(3),
}

ACCEPTANCE_RESULTS = {}


@pytest.fixture(autouse=True)
def _validation_on():
    set_validation(True)
    yield
    set_validation(True)


@pytest.fixture(params=list(BACKENDS))
def backend(request):
    return request.param, BACKENDS[request.param]()


@pytest.fixture(params=["E2"] + list(BACKENDS))
def any_manifold(request):
    if request.param == "E2":
        return request.param, Euclidean(2)
    return request.param, BACKENDS[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][1:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
