"""The GW quadratic program on the flattened coupling vector.

A coupling between an m-point and an n-point space is stored as a vector
of length m*n in row-major order: entry (i, j) of the transport plan sits
at position ``i * n + j`` (0-based). Every module uses this layout, so
``coupling.mu.reshape(m, n)`` is always the transport plan.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, IndexOutOfRange, InfeasibleInit, NegativeValue
from .mmspace import MetricMeasureSpace

COUPLING_TOL = 1e-9


def flat_index(i: int, j: int, m: int, n: int) -> int:
    """Position of plan entry (i, j) in the flat coupling vector."""
    if not (0 <= i < m and 0 <= j < n):
        raise IndexOutOfRange(f"({i}, {j}) outside a {m}x{n} plan")
    return i * n + j


def pair_index(flat: int, m: int, n: int) -> tuple[int, int]:
    if not 0 <= flat < m * n:
        raise IndexOutOfRange(f"{flat} outside a plan of size {m * n}")
    return divmod(flat, n)


def _loss(diff, p):
    r = np.abs(diff)
    if p == 1:
        return r
    if p == 2:
        return r * r
    return r**p


def _check_p(p):
    if not (np.isfinite(p) and p >= 1):
        raise ValueError(f"exponent p must be a finite real >= 1, got {p!r}")


def build_gamma(X: MetricMeasureSpace, Y: MetricMeasureSpace, p: float = 1.0) -> np.ndarray:
    """Dense (m*n) x (m*n) matrix with entries |d_X[i,k] - d_Y[j,l]|^p.

    Row ``i*n + j``, column ``k*n + l``; the (i, k) block is n x n over (j, l).
    """
    _check_p(p)
    dx, dy = X.dist, Y.dist
    m, n = dx.shape[0], dy.shape[0]
    g = _loss(dx[:, None, :, None] - dy[None, :, None, :], p).reshape(m * n, m * n)
    # vectorized pow may differ by an ulp between mirrored entries
    return np.triu(g) + np.triu(g, 1).T


def build_constraints(mu_x, mu_y) -> tuple[np.ndarray, np.ndarray]:
    """Marginal constraints ``A @ mu = b`` for the flattened plan.

    The first m rows sum plan rows, the last n rows sum plan columns.
    A has rank m + n - 1; the redundant row is kept.
    """
    mu_x = np.asarray(mu_x, dtype=np.float64)
    mu_y = np.asarray(mu_y, dtype=np.float64)
    m, n = mu_x.size, mu_y.size
    A = np.vstack([np.kron(np.eye(m), np.ones((1, n))), np.kron(np.ones((1, m)), np.eye(n))])
    return A, np.concatenate([mu_x, mu_y])


@dataclass(frozen=True, eq=False)
class GwProblem:
    m: int
    n: int
    p: float
    gamma: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    X: MetricMeasureSpace
    Y: MetricMeasureSpace

    @property
    def mu_x(self) -> np.ndarray:
        return self.X.measure

    @property
    def mu_y(self) -> np.ndarray:
        return self.Y.measure

    @property
    def dof(self) -> int:
        """Dimension of the coupling polytope."""
        return (self.m - 1) * (self.n - 1)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "p": self.p,
            "gamma": self.gamma.tolist(),
            "constraint_matrix": self.constraint_matrix.astype(int).tolist(),
            "rhs": self.rhs.tolist(),
        }


def build_problem(X: MetricMeasureSpace, Y: MetricMeasureSpace, p: float = 1.0) -> GwProblem:
    gamma = build_gamma(X, Y, p)
    gamma.setflags(write=False)
    A, b = build_constraints(X.measure, Y.measure)
    return GwProblem(X.n_points, Y.n_points, float(p), gamma, A, b, X, Y)


@dataclass(frozen=True, eq=False)
class Coupling:
    """Flattened transport plan (row-major, length m*n)."""

    m: int
    n: int
    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        if mu.size != self.m * self.n:
            raise DimensionMismatch(f"coupling of length {mu.size} is not {self.m}x{self.n}")
        object.__setattr__(self, "mu", mu)

    @property
    def plan(self) -> np.ndarray:
        return self.mu.reshape(self.m, self.n)

    def marginal_error(self, mu_x, mu_y) -> float:
        plan = self.plan
        return float(
            max(
                np.max(np.abs(plan.sum(axis=1) - mu_x)),
                np.max(np.abs(plan.sum(axis=0) - mu_y)),
            )
        )

    def is_feasible(self, mu_x, mu_y, tol: float = COUPLING_TOL) -> bool:
        return bool(np.all(self.mu >= 0.0) and self.marginal_error(mu_x, mu_y) <= tol)


def as_coupling(problem: GwProblem, coupling) -> Coupling:
    if isinstance(coupling, Coupling):
        if (coupling.m, coupling.n) != (problem.m, problem.n):
            raise DimensionMismatch(
                f"coupling is {coupling.m}x{coupling.n}, problem is {problem.m}x{problem.n}"
            )
        return coupling
    mu = np.asarray(coupling, dtype=np.float64)
    if mu.size != problem.m * problem.n:
        raise DimensionMismatch(f"coupling of size {mu.size} for a {problem.m}x{problem.n} problem")
    return Coupling(problem.m, problem.n, mu.reshape(-1))


def check_feasible(problem: GwProblem, coupling, tol: float = COUPLING_TOL) -> Coupling:
    c = as_coupling(problem, coupling)
    if not c.is_feasible(problem.mu_x, problem.mu_y, tol):
        raise InfeasibleInit(
            f"coupling violates the marginals by {c.marginal_error(problem.mu_x, problem.mu_y):.3g}"
            " or has negative entries"
        )
    return c


def objective(problem: GwProblem, coupling) -> float:
    """``mu' Gamma mu`` via the dense matrix."""
    mu = as_coupling(problem, coupling).mu
    return float(mu @ (problem.gamma @ mu))


def objective_tensor(problem: GwProblem, coupling, backend=None) -> float:
    """The same value from the 4-index sum, without forming Gamma."""
    plan = as_coupling(problem, coupling).plan
    return kernels.tensor_objective(problem.X.dist, problem.Y.dist, problem.p, plan, backend)


def gradient(problem: GwProblem, coupling) -> np.ndarray:
    """``2 Gamma mu`` as a flat vector."""
    mu = as_coupling(problem, coupling).mu
    return 2.0 * (problem.gamma @ mu)


def gradient_tensor(problem: GwProblem, coupling, backend=None) -> np.ndarray:
    plan = as_coupling(problem, coupling).plan
    return kernels.tensor_gradient(problem.X.dist, problem.Y.dist, problem.p, plan, backend).reshape(-1)


def independence_coupling(mu_x, mu_y) -> Coupling:
    mu_x = np.asarray(mu_x, dtype=np.float64)
    mu_y = np.asarray(mu_y, dtype=np.float64)
    return Coupling(mu_x.size, mu_y.size, np.outer(mu_x, mu_y).reshape(-1))


def diagonal_coupling(mu) -> Coupling:
    """Identity plan of a space with itself."""
    mu = np.asarray(mu, dtype=np.float64)
    return Coupling(mu.size, mu.size, np.diag(mu).reshape(-1))


def gw_distance(optimal_value: float, p: float) -> float:
    """Half the p-th root of the optimal value."""
    if optimal_value < 0:
        raise NegativeValue(f"optimal value {optimal_value!r} is negative")
    _check_p(p)
    return 0.5 * optimal_value ** (1.0 / p)


def qap_decompose(X: MetricMeasureSpace, Y: MetricMeasureSpace, coupling) -> tuple[float, float]:
    """Split the squared-loss objective into a marginal-only constant and a QAP cross term.

    For p = 2, ``mu' Gamma_2 mu = constant + cross_term`` where the
    constant depends only on the two measures and the cross term is the
    Koopmans-Beckmann objective with flow matrix ``-d_X``, doubled.
    The constant is evaluated on the coupling's own marginals, which equal
    the two measures for any feasible coupling.
    """
    m, n = X.n_points, Y.n_points
    if isinstance(coupling, Coupling):
        if (coupling.m, coupling.n) != (m, n):
            raise DimensionMismatch(f"coupling is {coupling.m}x{coupling.n}, spaces are {m}x{n}")
        plan = coupling.plan
    else:
        mu = np.asarray(coupling, dtype=np.float64)
        if mu.size != m * n:
            raise DimensionMismatch(f"coupling of size {mu.size} for {m}x{n} spaces")
        plan = mu.reshape(m, n)
    dx, dy = X.dist, Y.dist
    mx, my = plan.sum(axis=1), plan.sum(axis=0)
    constant = float(mx @ (dx * dx) @ mx + my @ (dy * dy) @ my)
    cross = float(2.0 * np.sum((-dx) * (plan @ dy @ plan.T)))
    return constant, cross


def write_gamma(problem: GwProblem, path) -> None:
    """Dump Gamma as JSON (default) or CSV when ``path`` ends in ``.csv``."""
    path = str(path)
    if path.lower().endswith(".csv"):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in problem.gamma:
                w.writerow([repr(float(v)) for v in row])
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(problem.to_json(), fh)
            fh.write("\n")
