import math

import numpy as np
import pytest

from optpot import SampledFunction, make_grid, solve_inverse

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def pi_grid():
    return make_grid(math.pi, 2000)


@pytest.fixture(scope="session")
def zero_pi(pi_grid):
    return SampledFunction.constant(pi_grid, 0.0)


@pytest.fixture(scope="session")
def sol_m1(zero_pi):
    return solve_inverse(zero_pi, (2.0,))


@pytest.fixture(scope="session")
def sol_m2(zero_pi):
    return solve_inverse(zero_pi, (2.0, 5.0))


def sine(grid, k):
    return SampledFunction(grid, np.sin(k * grid.x))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__.endswith("test_acceptance"):
        title = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE.append((title, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for title, outcome in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {title}")
