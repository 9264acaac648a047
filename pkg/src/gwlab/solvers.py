"""Local solvers for the GW quadratic program.

Frank-Wolfe with an exact transport oracle and closed-form line search,
entropic mirror descent with Sinkhorn projections, and a seeded
multistart wrapper around Frank-Wolfe.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalUnderflow, ValidationError
from .gwcore import (
    Coupling,
    GwProblem,
    as_coupling,
    check_feasible,
    gradient,
    gradient_tensor,
    gw_distance,
    independence_coupling,
)
from .transport import ot_linear

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 1000
DEFAULT_OUTER_ITERS = 200
DEFAULT_SINKHORN_ITERS = 100
# Above this many plan entries, gradients are contracted from the distance
# matrices instead of multiplying by the dense Gamma.
DENSE_LIMIT = 2500


def make_rng(seed: int) -> np.random.Generator:
    """The only random source in gwlab: numpy's PCG64 seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class SolveResult:
    coupling: Coupling
    value: float
    distance: float
    iterations: int
    fw_gap: float
    history: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    method: str = "fw"

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "distance": self.distance,
            "iterations": self.iterations,
            "fw_gap": self.fw_gap,
            "coupling": self.coupling.plan.tolist(),
        }

    def write_trace(self, path) -> None:
        """CSV with header ``iteration,value,gap``."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "value", "gap"])
            for (it, val), gap in zip(self.history, self.gaps):
                w.writerow([it, repr(val), repr(gap)])


def _grad(problem: GwProblem, mu: np.ndarray) -> np.ndarray:
    if problem.m * problem.n > DENSE_LIMIT:
        return gradient_tensor(problem, mu)
    return gradient(problem, mu)


def _quad(problem: GwProblem, x: np.ndarray, y: np.ndarray) -> float:
    return float(x @ (problem.gamma @ y))


def fw_gap(problem: GwProblem, coupling) -> float:
    """Frank-Wolfe gap ``grad' (mu - s)`` with ``s`` from the transport oracle."""
    mu = as_coupling(problem, coupling).mu
    g = _grad(problem, mu)
    s = ot_linear(g.reshape(problem.m, problem.n), problem.mu_x, problem.mu_y).mu
    return float(g @ (mu - s))


def line_search(a: float, b: float) -> float:
    """Minimizer over [0, 1] of ``a g^2 + b g``."""
    if a > 0:
        return min(max(-b / (2.0 * a), 0.0), 1.0)
    if a == 0:
        return 1.0 if b < 0 else 0.0
    return 1.0 if a + b < 0 else 0.0


def frank_wolfe(
    problem: GwProblem,
    init=None,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> SolveResult:
    """Conditional gradient descent from a feasible coupling.

    Each step moves toward the transport-oracle vertex for the current
    gradient ``2 Gamma mu`` with the exact step size of the quadratic
    along that segment, so the objective never increases. Stops after
    ``max_iter`` steps, or once the Frank-Wolfe gap is at most ``tol`` and
    the line search along the oracle direction gains at most ``tol``
    (a stationary point can still have a concave descent direction). The
    reported value is the objective of the returned coupling.
    """
    if init is None:
        init = independence_coupling(problem.mu_x, problem.mu_y)
    mu = check_feasible(problem, init).mu.copy()
    m, n = problem.m, problem.n
    value = _quad(problem, mu, mu)
    history = [(0, value)]
    gaps = []
    gap = np.inf
    it = 0
    while True:
        g = _grad(problem, mu)
        s = ot_linear(g.reshape(m, n), problem.mu_x, problem.mu_y).mu
        d = s - mu
        gap = float(-(g @ d))
        gaps.append(gap)
        if it >= max_iter:
            break
        a = _quad(problem, d, d)
        b = float(g @ d)
        step = line_search(a, b)
        decrease = -(step * b + step * step * a)
        # a zero gap can still sit on a concave ridge: keep going while the
        # oracle direction buys a real decrease
        if step == 0.0 or (gap <= tol and decrease <= tol):
            break
        candidate = mu + step * d if step < 1.0 else s
        new_value = _quad(problem, candidate, candidate)
        if new_value > value:
            # predicted decrease lost to rounding
            break
        mu, value = candidate, new_value
        it += 1
        history.append((it, value))
    if len(gaps) < len(history):
        gaps.append(gap)
    return SolveResult(
        Coupling(m, n, mu),
        value,
        gw_distance(max(value, 0.0), problem.p),
        it,
        gap if gap > 0 else 0.0,
        history,
        gaps,
        "fw",
    )


def _lse(a, axis):
    # scipy's logsumexp carries array-API overhead that dominates on small plans
    top = np.max(a, axis=axis, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    return np.log(np.sum(np.exp(a - top), axis=axis)) + np.squeeze(top, axis=axis)


def _sinkhorn_log(log_kernel, mu_x, mu_y, iters):
    """Alternating marginal scaling of ``exp(log_kernel)``; returns the log plan."""
    log_a = np.log(mu_x)
    log_b = np.log(mu_y)
    f = np.zeros(mu_x.size)
    g = np.zeros(mu_y.size)
    for _ in range(iters):
        f = log_a - _lse(log_kernel + g[None, :], axis=1)
        g = log_b - _lse(log_kernel + f[:, None], axis=0)
    return log_kernel + f[:, None] + g[None, :]


def _sinkhorn_plain(kernel, mu_x, mu_y, iters):
    v = np.ones(mu_y.size)
    u = np.ones(mu_x.size)
    for _ in range(iters):
        u = mu_x / (kernel @ v)
        v = mu_y / (kernel.T @ u)
    return u[:, None] * kernel * v[None, :]


def sinkhorn_project(weights, mu_x, mu_y, iters: int = 200) -> np.ndarray:
    """Scale a positive matrix toward the coupling polytope.

    Runs ``iters`` row/column scaling passes; the result has exact column
    sums and approximately correct row sums. Zero entries stay zero.
    """
    w = np.asarray(weights, dtype=np.float64)
    pos = w[w > 0]
    if pos.size and pos.max() / pos.min() < 1e100:
        return _sinkhorn_plain(w, np.asarray(mu_x), np.asarray(mu_y), iters)
    with np.errstate(divide="ignore"):
        log_k = np.log(w)
    return np.exp(_sinkhorn_log(log_k, np.asarray(mu_x), np.asarray(mu_y), iters))


def round_to_polytope(plan, mu_x, mu_y) -> np.ndarray:
    """Make a nearly feasible nonnegative plan exactly feasible.

    Shrinks rows and columns that overshoot their marginals, then puts
    the missing mass back as a rank-one product of the row and column
    deficits.
    """
    P = np.array(plan, dtype=np.float64)
    r = P.sum(axis=1)
    P *= np.minimum(1.0, np.divide(mu_x, r, out=np.ones_like(r), where=r > 0))[:, None]
    c = P.sum(axis=0)
    P *= np.minimum(1.0, np.divide(mu_y, c, out=np.ones_like(c), where=c > 0))[None, :]
    err_r = np.maximum(mu_x - P.sum(axis=1), 0.0)
    err_c = np.maximum(mu_y - P.sum(axis=0), 0.0)
    total = err_r.sum()
    if total > 0:
        P += np.outer(err_r, err_c) / total
    return P


def random_coupling(mu_x, mu_y, rng: np.random.Generator, passes: int = 200) -> Coupling:
    """Random interior point: Sinkhorn-projected uniform(0.01, 1) weights, then rounded."""
    mu_x = np.asarray(mu_x, dtype=np.float64)
    mu_y = np.asarray(mu_y, dtype=np.float64)
    w = rng.uniform(0.01, 1.0, size=(mu_x.size, mu_y.size))
    plan = round_to_polytope(sinkhorn_project(w, mu_x, mu_y, passes), mu_x, mu_y)
    return Coupling(mu_x.size, mu_y.size, plan.reshape(-1))


def default_epsilon(problem: GwProblem) -> float:
    return 0.05 * float(problem.gamma.mean())


def entropic_gw(
    problem: GwProblem,
    epsilon: float | None = None,
    outer_iters: int = DEFAULT_OUTER_ITERS,
    sinkhorn_iters: int = DEFAULT_SINKHORN_ITERS,
    init=None,
) -> SolveResult:
    """Entropic mirror descent on the coupling polytope.

    Each outer step reweights the current plan by ``exp(-C / epsilon)``,
    with ``C`` the gradient ``2 Gamma mu`` as an m x n cost, and rescales
    the result onto the marginals with ``sinkhorn_iters`` Sinkhorn passes.
    Scaling runs on the kernel directly while it is representable and
    switches to log space (with the iterate kept as a log plan) otherwise. Reported values are for the unregularized objective.
    """
    if epsilon is None:
        epsilon = default_epsilon(problem)
    if not epsilon > 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon!r}")
    if init is None:
        init = independence_coupling(problem.mu_x, problem.mu_y)
    mu = check_feasible(problem, init, tol=1e-6).mu.copy()
    m, n = problem.m, problem.n
    mu_x, mu_y = problem.mu_x, problem.mu_y
    value = _quad(problem, mu, mu)
    history = [(0, value)]
    it = 0
    if sinkhorn_iters > 0:
        # the iterate is carried in log space so that entries driven below
        # the float range keep their ordering instead of collapsing to zero
        with np.errstate(divide="ignore"):
            log_plan = np.log(mu.reshape(m, n))
        for it in range(1, outer_iters + 1):
            cost = _grad(problem, mu).reshape(m, n)
            log_k = log_plan - (cost - cost.min()) / epsilon
            kernel = np.exp(log_k)
            support = np.isfinite(log_k)
            new = None
            if np.all(kernel[support] > np.finfo(float).tiny):
                new = _sinkhorn_plain(kernel, mu_x, mu_y, sinkhorn_iters)
                if np.all(np.isfinite(new)) and np.all(new[support] > np.finfo(float).tiny):
                    log_plan = np.log(new)
                else:
                    new = None
            if new is None:
                log_plan = _sinkhorn_log(log_k, mu_x, mu_y, sinkhorn_iters)
                new = np.exp(log_plan)
            if not np.all(np.isfinite(new)) or not np.all(new.sum(axis=1) > 0):
                raise NumericalUnderflow(
                    f"Sinkhorn scaling broke down at epsilon={epsilon:g}; increase epsilon"
                )
            # a finite number of scaling passes leaves a marginal residual;
            # the iterate itself stays unrounded
            mu = round_to_polytope(new, mu_x, mu_y).reshape(-1)
            value = _quad(problem, mu, mu)
            history.append((it, value))
    gap = fw_gap(problem, mu)
    return SolveResult(
        Coupling(m, n, mu),
        value,
        gw_distance(max(value, 0.0), problem.p),
        it if sinkhorn_iters > 0 else 0,
        gap if gap > 0 else 0.0,
        history,
        [np.nan] * (len(history) - 1) + [gap],
        "entropic",
    )


def multistart(
    problem: GwProblem,
    k: int = 5,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> SolveResult:
    """Best Frank-Wolfe run over ``k`` starts.

    Start 0 is the independence coupling; starts 1..k-1 are
    :func:`random_coupling` draws from ``make_rng(seed)``. Ties go to the
    lowest start index.
    """
    if k < 1:
        raise ValidationError("multistart needs k >= 1")
    rng = make_rng(seed)
    starts = [independence_coupling(problem.mu_x, problem.mu_y)]
    starts += [random_coupling(problem.mu_x, problem.mu_y, rng) for _ in range(k - 1)]
    best = None
    for start in starts:
        res = frank_wolfe(problem, start, max_iter=max_iter, tol=tol)
        if best is None or res.value < best.value:
            best = res
    best.method = "multistart"
    return best
