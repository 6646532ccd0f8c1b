import numpy as np
import pytest

from lvlmg.grid import AxisSpec, build_grid


def dirichlet_grid(n, dim=1, length=1.0):
    return build_grid([AxisSpec(n, length) for _ in range(dim)])


def ecs_grid(n, dim=1, length=1.0, angle=np.pi / 6):
    return build_grid([AxisSpec.with_ecs(n, length, angle=angle) for _ in range(dim)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
