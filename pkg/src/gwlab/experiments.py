"""Negative-eigenvalue sweeps over growing second spaces."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .errors import InvalidSize, InternalInconsistency
from .gwcore import build_problem, objective, qap_decompose
from .solvers import make_rng, random_coupling
from .mmspace import Curve3D, delta_space, subsampled_arc_length_space
from .spectral import certify_nonconvex

SWEEP_HEADER = ("n", "matrix_dim", "negative_count", "min_eigenvalue")


@dataclass(frozen=True)
class SweepRow:
    n: int
    matrix_dim: int
    negative_count: int
    min_eigenvalue: float


def delta_closed_form(m: int, n: int) -> np.ndarray:
    """Ascending spectrum of Gamma_1 between the uniform simplices on m and n points.

    Gamma_1 = I_m (x) J_n + J_m (x) I_n - 2 I, with J the all-ones matrix.
    """
    vals = [m + n - 2.0] + [m - 2.0] * (n - 1) + [n - 2.0] * (m - 1) + [-2.0] * ((m - 1) * (n - 1))
    return np.sort(np.array(vals))


def _row(X, Y, p, method):
    report = certify_nonconvex(build_problem(X, Y, p), method)
    row = SweepRow(Y.n_points, X.n_points * Y.n_points, report.negative_count, report.min_eigenvalue)
    if row.negative_count < 1:
        raise InternalInconsistency(f"no negative eigenvalue at n={row.n}")
    return row


def sweep_delta(m: int = 2, n_min: int = 2, n_max: int = 50, p: float = 1.0, method: str = "auto"):
    """Fix the m-point simplex, grow the second simplex from n_min to n_max points."""
    if not (2 <= n_min <= n_max) or m < 2:
        raise InvalidSize(f"need m >= 2 and 2 <= n_min <= n_max, got m={m}, {n_min}..{n_max}")
    X = delta_space(m)
    return [_row(X, delta_space(n), p, method) for n in range(n_min, n_max + 1)]


def sweep_curves(
    curve_x: Curve3D,
    curve_y: Curve3D,
    m: int = 50,
    n_min: int = 10,
    n_max: int = 50,
    p: float = 1.0,
    method: str = "auto",
):
    """Fix an m-sample arc-length space on ``curve_x``, grow one on ``curve_y``.

    Samples are evenly spaced by index with both endpoints kept.
    """
    if not (2 <= n_min <= n_max) or m < 2:
        raise InvalidSize(f"need m >= 2 and 2 <= n_min <= n_max, got m={m}, {n_min}..{n_max}")
    if len(curve_x) < m:
        raise InvalidSize(f"first curve has {len(curve_x)} samples, need {m}")
    if len(curve_y) < n_max:
        raise InvalidSize(f"second curve has {len(curve_y)} samples, need {n_max}")
    X = subsampled_arc_length_space(curve_x, m)
    return [
        _row(X, subsampled_arc_length_space(curve_y, n), p, method)
        for n in range(n_min, n_max + 1)
    ]


def trend(rows) -> float:
    """Spearman rank correlation between n and the negative count."""
    ns = [r.n for r in rows]
    counts = [r.negative_count for r in rows]
    if len(rows) < 2 or len(set(counts)) < 2:
        return float("nan")
    return float(spearmanr(ns, counts).statistic)


def write_sweep(rows, dest) -> None:
    """Write sweep rows with a header to a path or an open text stream."""
    if hasattr(dest, "write"):
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in rows:
            w.writerow([r.n, r.matrix_dim, r.negative_count, repr(r.min_eigenvalue)])
        return
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        write_sweep(rows, fh)


def read_sweep(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            SweepRow(int(r["n"]), int(r["matrix_dim"]), int(r["negative_count"]), float(r["min_eigenvalue"]))
            for r in reader
        ]


QAP_RTOL = 1e-12


def qap_check(X, Y, trials: int = 100, seed: int = 0, rtol: float = QAP_RTOL) -> dict:
    """Check ``constant + cross_term == objective`` (p = 2) on random couplings.

    The error is measured relative to the largest of the three magnitudes,
    since the constant and cross term can nearly cancel.
    """
    problem = build_problem(X, Y, 2.0)
    rng = make_rng(seed)
    failures = []
    worst = 0.0
    for t in range(trials):
        c = random_coupling(X.measure, Y.measure, rng)
        const, cross = qap_decompose(X, Y, c)
        obj = objective(problem, c)
        scale = max(abs(const), abs(cross), abs(obj))
        err = 0.0 if scale == 0 else abs(const + cross - obj) / scale
        worst = max(worst, err)
        if err > rtol:
            failures.append({"trial": t, "objective": obj, "constant": const, "cross_term": cross, "rel_error": err})
    return {"trials": trials, "seed": seed, "max_rel_error": worst, "failures": failures}
