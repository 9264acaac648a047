import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import random_measure
from gwlab.errors import DimensionMismatch
from gwlab.transport import ot_linear, transport_simplex


def _is_spanning_tree(cells, m, n):
    parent = list(range(m + n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in cells:
        a, b = find(i), find(m + j)
        if a == b:
            return False
        parent[a] = b
    return True


def vertex_enumeration(cost, mu_x, mu_y):
    """Minimum of <cost, P> over all basic feasible plans (spanning-tree supports)."""
    m, n = cost.shape
    cells = list(itertools.product(range(m), range(n)))
    A = np.vstack([np.kron(np.eye(m), np.ones((1, n))), np.kron(np.ones((1, m)), np.eye(n))])
    b = np.concatenate([mu_x, mu_y])
    best = np.inf
    for support in itertools.combinations(range(m * n), m + n - 1):
        if not _is_spanning_tree([cells[s] for s in support], m, n):
            continue
        x, *_ = np.linalg.lstsq(A[:, support], b, rcond=None)
        if np.any(x < -1e-12):
            continue
        best = min(best, float(cost.reshape(-1)[list(support)] @ x))
    return best


def test_zero_cost():
    c = ot_linear(np.zeros((3, 2)), [0.2, 0.3, 0.5], [0.5, 0.5])
    assert c.is_feasible([0.2, 0.3, 0.5], [0.5, 0.5], 1e-15)


def test_uniform_swap_cost():
    c = ot_linear(np.array([[0.0, 1.0], [1.0, 0.0]]), [0.5, 0.5], [0.5, 0.5])
    np.testing.assert_array_equal(c.mu, [0.5, 0, 0, 0.5])


def test_example1_marginals():
    cost = np.array([[0.0, 1.0], [1.0, 0.0]])
    c = ot_linear(cost, [0.5, 0.5], [0.25, 0.75])
    np.testing.assert_allclose(c.mu, [0.25, 0.25, 0.0, 0.5], atol=1e-15)
    # the polytope is the segment mu11 = t in [0, 1/4]; its two vertices cost
    # t=0: (0, 1/2, 1/4, 1/4) -> 3/4 and t=1/4: (1/4, 1/4, 0, 1/2) -> 1/4
    vertices = {0.75: [0, 0.5, 0.25, 0.25], 0.25: [0.25, 0.25, 0, 0.5]}
    for value, mu in vertices.items():
        assert float(cost.reshape(-1) @ np.array(mu)) == value
    assert float(cost.reshape(-1) @ c.mu) == 0.25


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        ot_linear(np.zeros((2, 3)), [0.5, 0.5], [0.5, 0.5])


@pytest.mark.parametrize("m, n", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_matches_vertex_enumeration(m, n, rng):
    for _ in range(25):
        cost = rng.standard_normal((m, n))
        if rng.random() < 0.3:
            cost = np.round(cost)  # ties
        mu_x, mu_y = random_measure(rng, m), random_measure(rng, n)
        if rng.random() < 0.3 and m == n:
            mu_y = mu_x.copy()  # degenerate bases
        c = ot_linear(cost, mu_x, mu_y)
        assert c.is_feasible(mu_x, mu_y, 1e-12)
        assert float(cost.reshape(-1) @ c.mu) == pytest.approx(vertex_enumeration(cost, mu_x, mu_y), abs=1e-10)


def test_matches_linprog_larger(rng):
    for _ in range(20):
        m, n = rng.integers(2, 12, 2)
        cost = rng.uniform(0, 5, (m, n))
        mu_x, mu_y = random_measure(rng, m), random_measure(rng, n)
        c = ot_linear(cost, mu_x, mu_y)
        A = np.vstack([np.kron(np.eye(m), np.ones((1, n))), np.kron(np.ones((1, m)), np.eye(n))])
        lp = linprog(cost.reshape(-1), A_eq=A, b_eq=np.concatenate([mu_x, mu_y]), method="highs")
        assert c.is_feasible(mu_x, mu_y, 1e-12)
        assert float(cost.reshape(-1) @ c.mu) == pytest.approx(lp.fun, abs=1e-10)


def test_result_is_a_vertex(rng):
    cost = rng.standard_normal((4, 5))
    plan, basis = transport_simplex(cost, random_measure(rng, 4), random_measure(rng, 5))
    assert len(basis) == 4 + 5 - 1
    assert _is_spanning_tree(basis, 4, 5)
    assert np.count_nonzero(plan) <= 8


def test_deterministic_tie_breaking():
    cost = np.zeros((3, 3))
    mu = np.full(3, 1 / 3)
    a = ot_linear(cost, mu, mu).mu
    b = ot_linear(cost, mu, mu).mu
    np.testing.assert_array_equal(a, b)
