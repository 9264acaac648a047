"""Ground-truth global minima for GW programs with few degrees of freedom.

The coupling polytope of an m x n problem has dimension (m-1)(n-1). For
the 2 x 2 case the objective is a univariate quadratic and is minimized
in closed form; up to four free coordinates a dense grid over the
polytope followed by local polishing gives a value with an error bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResolutionTooSmall, TooManyDof, WrongDimension
from .gwcore import Coupling, GwProblem
from .solvers import frank_wolfe, round_to_polytope

MAX_DOF = 4
MIN_RESOLUTION = 10
FEASIBILITY_SLACK = 1e-12
N_POLISH = 8
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleResult:
    value: float
    coupling: Coupling
    method: str
    grid_resolution: int | None = None
    error_bound: float = 0.0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "grid_resolution": self.grid_resolution,
            "error_bound": self.error_bound,
            "coupling": self.coupling.plan.tolist(),
        }


def _value(problem, mu):
    return float(mu @ (problem.gamma @ mu))


def rounding_bound(problem: GwProblem, mu) -> float:
    """Floating-point error bound for evaluating ``mu' Gamma mu``."""
    k = problem.m * problem.n
    eps = np.finfo(float).eps
    a = np.abs(mu)
    return 2.0 * k * eps * float(a @ (np.abs(problem.gamma) @ a))


def oracle_1dof(problem: GwProblem) -> OracleResult:
    """Exact minimum for two 2-point spaces.

    With ``t`` the mass on plan entry (0, 0), every feasible plan is
    ``[[t, a - t], [b - t, 1 - a - b + t]]`` for ``t`` in
    ``[max(0, a + b - 1), min(a, b)]``; the objective is a quadratic in t.
    """
    if (problem.m, problem.n) != (2, 2):
        raise WrongDimension(f"oracle_1dof needs a 2x2 problem, got {problem.m}x{problem.n}")
    a, b = float(problem.mu_x[0]), float(problem.mu_y[0])
    lo, hi = max(0.0, a + b - 1.0), min(a, b)
    base = np.array([0.0, a, b, 1.0 - a - b])
    e = np.array([1.0, -1.0, -1.0, 1.0])
    G = problem.gamma
    quad = float(e @ G @ e)
    lin = 2.0 * float(e @ G @ base)

    def plan_at(t):
        # endpoints zero one entry up to rounding
        return np.maximum(base + t * e, 0.0)

    candidates = [lo, hi]
    if quad > 0:
        t_star = -lin / (2.0 * quad)
        if lo < t_star < hi:
            candidates.append(t_star)
    best_mu, best_val = None, np.inf
    for t in candidates:
        mu = plan_at(t)
        val = _value(problem, mu)
        if val < best_val:
            best_mu, best_val = mu, val
    return OracleResult(
        best_val, Coupling(2, 2, best_mu), "closed-form-1dof", None, rounding_bound(problem, best_mu)
    )


def _reconstruct(free, mu_x, mu_y):
    """Full plans from free entries ``plan[:m-1, :n-1]`` (rows of ``free``)."""
    m, n = mu_x.size, mu_y.size
    N = free.shape[0]
    inner = free.reshape(N, m - 1, n - 1)
    plan = np.empty((N, m, n))
    plan[:, : m - 1, : n - 1] = inner
    plan[:, : m - 1, n - 1] = mu_x[: m - 1] - inner.sum(axis=2)
    plan[:, m - 1, : n - 1] = mu_y[: n - 1] - inner.sum(axis=1)
    plan[:, m - 1, n - 1] = mu_x[m - 1] - plan[:, m - 1, : n - 1].sum(axis=1)
    return plan.reshape(N, m * n)


def _parametrization_norm(m, n):
    """Spectral norm of the linear map from free entries to the full plan."""
    dof = (m - 1) * (n - 1)
    basis = np.eye(dof)
    zero = _reconstruct(np.zeros((1, dof)), np.zeros(m), np.zeros(n))
    cols = _reconstruct(basis, np.zeros(m), np.zeros(n)) - zero
    return float(np.linalg.norm(cols.T, 2))


def oracle_grid(problem: GwProblem, resolution: int = 100) -> OracleResult:
    """Global minimum by exhaustive grid search over the free plan entries.

    The free coordinates are the entries ``plan[i, j]`` with ``i < m-1``
    and ``j < n-1``; the last row and column are reconstructed from the
    marginals and points with a reconstructed entry below ``-1e-12`` are
    dropped. Each axis takes ``resolution`` evenly spaced values on
    ``[0, min(mu_x[i], mu_y[j])]``. The best few grid points are polished
    with Frank-Wolfe at tolerance 1e-12.

    ``error_bound`` is ``2 ||Gamma||_F * h`` with ``h`` the grid-cell
    diagonal mapped into plan space, plus the rounding bound of the
    final evaluation. The closed form reports the rounding bound alone.
    """
    m, n = problem.m, problem.n
    dof = problem.dof
    if dof > MAX_DOF:
        raise TooManyDof(f"{m}x{n} problem has {dof} degrees of freedom; the grid oracle allows {MAX_DOF}")
    if resolution < MIN_RESOLUTION:
        raise ResolutionTooSmall(f"resolution must be at least {MIN_RESOLUTION}")
    mu_x, mu_y = problem.mu_x, problem.mu_y
    G = problem.gamma
    if dof == 0:
        mu = np.outer(mu_x, mu_y).reshape(-1)
        return OracleResult(_value(problem, mu), Coupling(m, n, mu), "grid", resolution, 0.0)

    upper = np.minimum.outer(mu_x[: m - 1], mu_y[: n - 1]).reshape(-1)
    axes = [np.linspace(0.0, u, resolution) for u in upper]
    steps = upper / (resolution - 1)

    # best N_POLISH feasible points, kept as (value, flat grid index)
    best_vals = np.full(0, np.inf)
    best_idx = np.zeros(0, dtype=np.int64)
    total = resolution**dof
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = np.array(np.unravel_index(flat, (resolution,) * dof)).T
        free = np.column_stack([axes[a][digits[:, a]] for a in range(dof)])
        mus = _reconstruct(free, mu_x, mu_y)
        ok = np.all(mus >= -FEASIBILITY_SLACK, axis=1)
        if not ok.any():
            continue
        mus, flat = np.maximum(mus[ok], 0.0), flat[ok]
        vals = np.einsum("ij,jk,ik->i", mus, G, mus)
        best_vals = np.concatenate([best_vals, vals])
        best_idx = np.concatenate([best_idx, flat])
        order = np.lexsort((best_idx, best_vals))[:N_POLISH]
        best_vals, best_idx = best_vals[order], best_idx[order]

    h = float(np.sqrt(np.sum(steps**2))) * _parametrization_norm(m, n)
    bound = 2.0 * float(np.linalg.norm(G)) * h

    best_mu, best_val = None, np.inf
    for idx in best_idx:
        digits = np.array(np.unravel_index(idx, (resolution,) * dof))
        free = np.array([axes[a][digits[a]] for a in range(dof)])[None, :]
        mu = np.maximum(_reconstruct(free, mu_x, mu_y)[0], 0.0)
        val = _value(problem, mu)
        if val < best_val:
            best_mu, best_val = mu, val
        start = _repair(Coupling(m, n, mu), mu_x, mu_y)
        polished = frank_wolfe(problem, start, max_iter=20000, tol=1e-12)
        for cand in (polished.coupling.mu, _face_polish(problem, polished.coupling.mu)):
            if cand is None:
                continue
            v = _value(problem, cand)
            if v < best_val:
                best_mu, best_val = cand, v
    bound += rounding_bound(problem, best_mu)
    return OracleResult(best_val, Coupling(m, n, best_mu), "grid", resolution, bound)


def _repair(coupling, mu_x, mu_y):
    plan = round_to_polytope(coupling.plan, mu_x, mu_y)
    return Coupling(coupling.m, coupling.n, plan.reshape(-1))


def _face_polish(problem: GwProblem, mu: np.ndarray, zero_tol: float = 1e-10):
    """Stationary point of the objective on the face containing ``mu``.

    Solves the KKT system with the entries that are (numerically) zero in
    ``mu`` held at zero. Returns the solution if it is feasible, else None.
    """
    k = mu.size
    active = np.flatnonzero(mu > zero_tol)
    A = problem.constraint_matrix[:, active]
    b = problem.rhs
    H = 2.0 * problem.gamma[np.ix_(active, active)]
    r = A.shape[0]
    kkt = np.block([[H, A.T], [A, np.zeros((r, r))]])
    rhs = np.concatenate([np.zeros(active.size), b])
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    out = np.zeros(k)
    out[active] = sol[: active.size]
    if np.any(out < -FEASIBILITY_SLACK):
        return None
    out = np.maximum(out, 0.0)
    c = Coupling(problem.m, problem.n, out)
    if c.marginal_error(problem.mu_x, problem.mu_y) > 1e-12:
        return None
    return out


def dominates(oracle: OracleResult, value: float, slack: float = 1e-9) -> bool:
    """True when ``value`` is no better than the oracle minimum (up to ``slack``)."""
    return value >= oracle.value - slack


def default_resolution(dof: int) -> int:
    """Per-axis resolution keeping the grid near a million points."""
    if dof <= 0:
        return MIN_RESOLUTION
    return max(MIN_RESOLUTION, int(round(1e6 ** (1.0 / dof))))


def oracle(problem: GwProblem, resolution: int | None = None) -> OracleResult:
    """Closed form for 2x2 problems, grid search otherwise."""
    if (problem.m, problem.n) == (2, 2):
        return oracle_1dof(problem)
    if resolution is None:
        resolution = default_resolution(problem.dof)
    return oracle_grid(problem, resolution)

