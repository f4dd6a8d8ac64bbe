import numpy as np
import pytest

from cosmotomo.grid import make_grid
from cosmotomo.model import ForwardModel


def kron_step_matrix(spec):
    """One-step matrix built literally from the Kronecker-product formula."""
    n, s = spec.n, spec.courant ** 2
    I = np.eye(n)
    Tx = -2 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
    return np.eye(n * n) + 0.5 * s * np.kron(I, Tx) + 0.5 * s * np.kron(Tx, I)


def kron_solution_matrix(spec):
    """Explicit ``S``: stacked midpoint averages of the matrix leapfrog recursion."""
    T = kron_step_matrix(spec)
    P = [np.eye(spec.size), T]
    for _ in range(2, spec.n_slices + 1):
        P.append(2 * T @ P[-1] - P[-2])
    return np.vstack([0.5 * (P[k - 1] + P[k]) for k in range(1, spec.n_slices + 1)])


@pytest.fixture(scope="session")
def desk_grid():
    return make_grid(9, 2, 1, 6)


@pytest.fixture(scope="session")
def desk_model(desk_grid):
    return ForwardModel.build(desk_grid, "full")


@pytest.fixture(scope="session")
def paper_grid():
    return make_grid(51, 7, 2, 40)


@pytest.fixture(scope="session")
def model_7x7(paper_grid):
    return ForwardModel.build(paper_grid, "7x7")


@pytest.fixture(scope="session")
def dense_7x7(model_7x7):
    return model_7x7.assemble()


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
