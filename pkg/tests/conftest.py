import numpy as np
import pytest
from hypothesis import settings

from bethe_sumrules import kernels
from bethe_sumrules.tree import random_potential

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

AMPLITUDES = (0.5, 1.0, 2.0, 3.0)


def ensemble(count=20):
    """Seeded random potentials of depth 1..3 with amplitudes up to 3."""
    return [random_potential(s, 1 + s % 3, AMPLITUDES[s % 4]) for s in range(count)]


ZETAS = [0.4, 0.3 + 0.5j, -0.6 + 0.2j, -0.2 - 0.7j, 0.75j]


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    prev = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
