"""Pure-numpy versions of the routines in ``_kernels.pyx``.

The Jacobi fallback applies a full round of disjoint rotations at once
(round-robin pair schedule), so each round is a handful of vectorized
row/column updates instead of k/2 Python-level rotations.
"""

import numpy as np


def _round_robin(k):
    """Yield (P, Q) index arrays covering every pair once per sweep."""
    players = list(range(k)) + ([-1] if k % 2 else [])
    size = len(players)
    for _ in range(size - 1):
        ps, qs = [], []
        for idx in range(size // 2):
            a, b = players[idx], players[size - 1 - idx]
            if a < 0 or b < 0:
                continue
            ps.append(min(a, b))
            qs.append(max(a, b))
        yield np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)
        players = [players[0], players[-1]] + players[1:-1]


def _off_norm(a):
    # summed directly: total minus diagonal energy cancels to ~1e-8 relative
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigenvalues(a, tol, max_sweeps):
    k = a.shape[0]
    schedule = list(_round_robin(k))
    sweep = 0
    off = _off_norm(a)
    while off > tol and sweep < max_sweeps:
        sweep += 1
        for P, Q in schedule:
            if P.size == 0:
                continue
            apq = a[P, Q]
            app = a[P, P]
            aqq = a[Q, Q]
            active = apq != 0.0
            safe = np.where(active, apq, 1.0)
            with np.errstate(over="ignore"):
                # a huge theta means a negligible rotation; t -> 0
                theta = (aqq - app) / (2.0 * safe)
                sign = np.where(theta >= 0.0, 1.0, -1.0)
                t = sign / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rows_p = a[P, :].copy()
            rows_q = a[Q, :].copy()
            a[P, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[Q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            cols_p = a[:, P].copy()
            cols_q = a[:, Q].copy()
            a[:, P] = c[None, :] * cols_p - s[None, :] * cols_q
            a[:, Q] = s[None, :] * cols_p + c[None, :] * cols_q
            a[P, P] = app - t * apq
            a[Q, Q] = aqq + t * apq
            a[P, Q] = 0.0
            a[Q, P] = 0.0
        off = _off_norm(a)
    return np.diag(a).copy(), sweep, off


def _loss(diff, p):
    r = np.abs(diff)
    if p == 1.0:
        return r
    if p == 2.0:
        return r * r
    return r**p


def tensor_gradient(dx, dy, p, plan):
    m, n = plan.shape
    out = np.empty((m, n))
    for i in range(m):
        # block[j, k, l] = |dx[i,k] - dy[j,l]|^p
        block = _loss(dx[i][None, :, None] - dy[:, None, :], p)
        out[i] = 2.0 * np.einsum("jkl,kl->j", block, plan)
    return out


def tensor_objective(dx, dy, p, plan):
    total = 0.0
    for i in range(plan.shape[0]):
        block = _loss(dx[i][None, :, None] - dy[:, None, :], p)
        total += float(plan[i] @ np.einsum("jkl,kl->j", block, plan))
    return total
