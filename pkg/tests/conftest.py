import numpy as np
import pytest

from gwlab import mmspace
from gwlab.gwcore import build_problem

EXAMPLE1_GAMMA = np.array(
    [[0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]], dtype=float
)
EXAMPLE1_A = np.array(
    [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]], dtype=float
)
EXAMPLE1_B = np.array([0.5, 0.5, 0.25, 0.75])


def random_measure(rng, k):
    w = rng.uniform(0.05, 1.0, k)
    w /= w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return w


def random_space(rng, k, uniform=False):
    pts = rng.standard_normal((k, int(rng.integers(1, 4))))
    mu = np.full(k, 1.0 / k) if uniform else random_measure(rng, k)
    return mmspace.point_cloud_space(pts, mu)


@pytest.fixture
def example1_spaces():
    X = mmspace.delta_space(2)
    Y = mmspace.make_space([[0, 1], [1, 0]], [0.25, 0.75])
    return X, Y


@pytest.fixture
def example1(example1_spaces):
    return build_problem(*example1_spaces, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "acceptance" not in report.keywords:
        return
    _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
