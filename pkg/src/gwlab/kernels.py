"""Select the compiled kernels when available, else the numpy fallback.

Set ``GWLAB_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by the backend-equivalence tests).
"""

import os

import numpy as np

from . import _fallback

BACKEND = "python"
_compiled = None

if os.environ.get("GWLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled

        BACKEND = "cython"
    except ImportError:  # extension not built
        _compiled = None


def _impl(backend):
    if backend is None:
        backend = BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if backend == "python":
        return _fallback
    raise ValueError(f"unknown backend {backend!r}")


def available_backends():
    return ("cython", "python") if _compiled is not None else ("python",)


def jacobi_eigenvalues(matrix, tol, max_sweeps=100, backend=None):
    """Return ``(diagonal, sweeps, off_norm)`` for a private copy of ``matrix``."""
    work = np.array(matrix, dtype=np.float64, order="C", copy=True)
    return _impl(backend).jacobi_eigenvalues(work, float(tol), int(max_sweeps))


def tensor_objective(dx, dy, p, plan, backend=None):
    return float(
        _impl(backend).tensor_objective(
            np.ascontiguousarray(dx, dtype=np.float64),
            np.ascontiguousarray(dy, dtype=np.float64),
            float(p),
            np.ascontiguousarray(plan, dtype=np.float64),
        )
    )


def tensor_gradient(dx, dy, p, plan, backend=None):
    return np.asarray(
        _impl(backend).tensor_gradient(
            np.ascontiguousarray(dx, dtype=np.float64),
            np.ascontiguousarray(dy, dtype=np.float64),
            float(p),
            np.ascontiguousarray(plan, dtype=np.float64),
        )
    )
