"""Exact discrete optimal transport by the transportation simplex method.

This is the linear-minimization oracle used by Frank-Wolfe: it returns a
vertex of the coupling polytope minimizing ``<cost, plan>``.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import ConvergenceError, DimensionMismatch
from .gwcore import Coupling


def _northwest_corner(mu_x, mu_y):
    m, n = mu_x.size, mu_y.size
    a, b = mu_x.copy(), mu_y.copy()
    basis = []
    i = j = 0
    while True:
        basis.append((i, j))
        x = min(a[i], b[j])
        a[i] -= x
        b[j] -= x
        if i == m - 1 and j == n - 1:
            return basis
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif a[i] <= b[j]:
            i += 1
        else:
            j += 1


def _tree_flows(basis, mu_x, mu_y):
    """Unique flows on a spanning-tree basis, found by peeling leaves."""
    m = mu_x.size
    # nodes 0..m-1 are rows, m..m+n-1 columns
    remaining = np.concatenate([mu_x, mu_y]).astype(np.float64)
    incident = [set() for _ in range(remaining.size)]
    for e, (i, j) in enumerate(basis):
        incident[i].add(e)
        incident[m + j].add(e)
    flows = np.zeros(len(basis))
    leaves = deque(v for v, es in enumerate(incident) if len(es) == 1)
    while leaves:
        v = leaves.popleft()
        if len(incident[v]) != 1:
            continue
        e = incident[v].pop()
        i, j = basis[e]
        other = m + j if v == i else i
        flows[e] = remaining[v]
        remaining[other] -= remaining[v]
        remaining[v] = 0.0
        incident[other].discard(e)
        if len(incident[other]) == 1:
            leaves.append(other)
    return flows


def _potentials(basis, cost, m, n):
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    adj_row = [[] for _ in range(m)]
    adj_col = [[] for _ in range(n)]
    for i, j in basis:
        adj_row[i].append(j)
        adj_col[j].append(i)
    u[0] = 0.0
    stack = [("r", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "r":
            for j in adj_row[k]:
                if np.isnan(v[j]):
                    v[j] = cost[k, j] - u[k]
                    stack.append(("c", j))
        else:
            for i in adj_col[k]:
                if np.isnan(u[i]):
                    u[i] = cost[i, k] - v[k]
                    stack.append(("r", i))
    return u, v


def _tree_path(basis, m, start_row, end_col):
    """Basis edges on the tree path from row ``start_row`` to column ``end_col``."""
    adj = {}
    for e, (i, j) in enumerate(basis):
        adj.setdefault(i, []).append((m + j, e))
        adj.setdefault(m + j, []).append((i, e))
    target = m + end_col
    prev = {start_row: None}
    queue = deque([start_row])
    while queue:
        node = queue.popleft()
        if node == target:
            break
        for nxt, e in adj.get(node, ()):
            if nxt not in prev:
                prev[nxt] = (node, e)
                queue.append(nxt)
    path = []
    node = target
    while prev[node] is not None:
        node, e = prev[node]
        path.append(e)
    path.reverse()
    return path


def transport_simplex(cost, mu_x, mu_y, max_pivots: int | None = None):
    """Solve ``min <cost, P>`` over plans with row sums ``mu_x`` and column sums ``mu_y``.

    Returns ``(plan, basis)`` where ``basis`` is the final spanning tree of
    m + n - 1 cells. Entering and leaving ties go to the lowest flat index;
    after a run of degenerate pivots the entering rule switches to the
    lowest-index improving cell to rule out cycling.
    """
    cost = np.asarray(cost, dtype=np.float64)
    mu_x = np.asarray(mu_x, dtype=np.float64)
    mu_y = np.asarray(mu_y, dtype=np.float64)
    m, n = mu_x.size, mu_y.size
    if cost.shape != (m, n):
        raise DimensionMismatch(f"cost has shape {cost.shape}, marginals give ({m}, {n})")
    if max_pivots is None:
        max_pivots = 50 * (m * n + 10) ** 2
    tol = 1e-12 * max(1.0, float(np.abs(cost).max()) if cost.size else 1.0)

    basis = _northwest_corner(mu_x, mu_y)
    flows = _tree_flows(basis, mu_x, mu_y)
    degenerate_run = 0
    for _ in range(max_pivots):
        u, v = _potentials(basis, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        for i, j in basis:
            reduced[i, j] = 0.0
        flat = reduced.reshape(-1)
        if flat.min() >= -tol:
            break
        if degenerate_run > m + n:
            enter = int(np.flatnonzero(flat < -tol)[0])
        else:
            enter = int(np.argmin(flat))
        ei, ej = divmod(enter, n)
        path = _tree_path(basis, m, ei, ej)
        minus = path[0::2]
        theta = min(flows[e] for e in minus)
        candidates = [e for e in minus if flows[e] == theta]
        leave = min(candidates, key=lambda e: basis[e][0] * n + basis[e][1])
        degenerate_run = degenerate_run + 1 if theta <= 0.0 else 0
        basis[leave] = (ei, ej)
        flows = _tree_flows(basis, mu_x, mu_y)
    else:
        raise ConvergenceError(f"transportation simplex exceeded {max_pivots} pivots")

    plan = np.zeros((m, n))
    for (i, j), f in zip(basis, flows):
        plan[i, j] = max(f, 0.0)
    return plan, basis


def ot_linear(cost, mu_x, mu_y) -> Coupling:
    """Vertex coupling minimizing ``sum cost[i, j] * plan[i, j]``."""
    plan, _ = transport_simplex(cost, mu_x, mu_y)
    m, n = plan.shape
    return Coupling(m, n, plan.reshape(-1))
