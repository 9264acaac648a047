"""Spectral certificates that the GW objective matrix is indefinite."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, InternalInconsistency, NotSymmetric, TooFewPoints
from .gwcore import GwProblem

SYMMETRY_TOL = 1e-12
JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
# Cyclic Jacobi costs O(k^3) per sweep with a large constant; past this size
# "auto" switches to LAPACK's symmetric tridiagonal solver.
JACOBI_MAX_DIM = 256


def _as_symmetric(M) -> np.ndarray:
    a = np.asarray(M, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max())) if a.size else 1.0
    if np.any(np.abs(a - a.T) > SYMMETRY_TOL * scale):
        raise NotSymmetric("matrix is not symmetric")
    return a


def default_tol(M) -> float:
    return 1e-8 * max(1.0, float(np.linalg.norm(M)))


def eigenvalues_symmetric(M, method: str = "auto", backend=None) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix.

    ``method="jacobi"`` runs cyclic Jacobi rotations until the off-diagonal
    Frobenius norm is below ``1e-12 * ||M||_F`` (at most 100 sweeps).
    ``"lapack"`` calls ``numpy.linalg.eigvalsh``. ``"auto"`` uses Jacobi up
    to ``JACOBI_MAX_DIM`` rows and LAPACK beyond.
    """
    a = _as_symmetric(M)
    k = a.shape[0]
    if k == 0:
        return np.empty(0)
    if method == "auto":
        method = "jacobi" if k <= JACOBI_MAX_DIM else "lapack"
    if method == "lapack":
        return np.linalg.eigvalsh(a)
    if method != "jacobi":
        raise ValueError(f"unknown method {method!r}")
    tol = JACOBI_REL_TOL * float(np.linalg.norm(a))
    diag, sweeps, off = kernels.jacobi_eigenvalues(a, tol, JACOBI_MAX_SWEEPS, backend)
    if off > tol:
        raise ConvergenceError(f"Jacobi did not converge in {sweeps} sweeps (off-norm {off:.3g})")
    return np.sort(diag)


def count_negative(M, tol: float | None = None, method: str = "auto") -> int:
    """Number of eigenvalues strictly below ``-tol``."""
    if tol is None:
        tol = default_tol(M)
    return int(np.sum(eigenvalues_symmetric(M, method) < -tol))


def principal_minor_2x2(problem: GwProblem) -> float:
    """Determinant of the top-left 2x2 block of Gamma.

    The block pairs plan entries (0, 0) and (0, 1); its determinant is
    ``-d_Y(y_0, y_1)^(2p)``, negative whenever Y has two points.
    """
    if problem.n < 2:
        raise TooFewPoints("the second space needs at least two points")
    g = problem.gamma
    return float(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0])


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    negative_count: int
    minor_det: float
    psd_verdict: bool
    tol: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def to_json(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "negative_count": self.negative_count,
            "minor_det": self.minor_det,
            "psd": self.psd_verdict,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def certify_nonconvex(problem: GwProblem, method: str = "auto") -> SpectralReport:
    """Spectrum, negative count and 2x2 minor of Gamma, asserting indefiniteness.

    Any valid instance with at least two points per space has a negative
    2x2 principal minor, so a PSD verdict (or a non-negative minor) can
    only come from a bug and raises :class:`InternalInconsistency`.
    """
    if problem.m < 2 or problem.n < 2:
        raise TooFewPoints("both spaces need at least two points")
    g = problem.gamma
    tol = default_tol(g)
    eig = eigenvalues_symmetric(g, method)
    neg = int(np.sum(eig < -tol))
    minor = principal_minor_2x2(problem)
    psd = bool(eig[0] >= -tol)
    report = SpectralReport(eig, neg, minor, psd, tol)
    if minor >= 0:
        raise InternalInconsistency(f"2x2 principal minor is {minor!r}, expected < 0")
    if psd:
        raise InternalInconsistency(
            f"spectrum is PSD (min eigenvalue {eig[0]!r}) despite a negative principal minor"
        )
    trace_err = abs(float(eig.sum()) - float(np.trace(g)))
    if trace_err > 1e-8 * max(1.0, float(np.linalg.norm(g))):
        raise InternalInconsistency(f"eigenvalues miss the trace by {trace_err:.3g}")
    return report
