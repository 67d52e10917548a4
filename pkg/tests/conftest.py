import numpy as np
import pytest

from tvlinf import GridSpec, ScalarField, VectorField


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_scalar(rng, grid):
    return ScalarField(grid, rng.standard_normal(grid.shape))


def random_vector(rng, grid):
    return VectorField(grid, rng.standard_normal((grid.dims,) + grid.shape))


@pytest.fixture(params=[GridSpec.regular(37, 0.05, -1.0), GridSpec.regular((12, 9), (1.0, 0.5))],
                ids=["1d", "2d"])
def grid(request):
    return request.param


# acceptance criteria register one line each; printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
