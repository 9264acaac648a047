"""Finite metric-measure spaces: validation, example families and file loaders."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import (
    AsymmetricDistance,
    DuplicateConsecutiveSamples,
    DuplicatePoints,
    InvalidSize,
    MeasureNotSimplex,
    NegativeDistance,
    NonzeroDiagonal,
    ParseError,
)

MEASURE_TOL = 1e-12
SYMMETRY_TOL = 1e-12
TRIANGLE_TOL = 1e-12

FORMATS = ("distance-matrix", "point-cloud", "curve")


class TriangleInequalityWarning(UserWarning):
    """Distance matrix is a dissimilarity but not a metric."""


def _frozen(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MetricMeasureSpace:
    """A finite set of points with a distance matrix and a probability vector.

    Build instances with :func:`make_space` (or one of the generators);
    the constructor itself does not validate.
    """

    dist: np.ndarray
    measure: np.ndarray
    triangle_ok: bool = True

    @property
    def n_points(self) -> int:
        return int(self.measure.shape[0])

    def validate(self) -> MetricMeasureSpace:
        make_space(self.dist, self.measure)
        return self

    def scaled(self, factor: float) -> MetricMeasureSpace:
        return make_space(self.dist * factor, self.measure)

    def __repr__(self):
        return f"MetricMeasureSpace(n_points={self.n_points}, triangle_ok={self.triangle_ok})"


@dataclass(frozen=True, eq=False)
class Curve3D:
    """Ordered samples of a curve in R^3."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != 3:
            raise InvalidSize(f"curve samples must have shape (N, 3), got {s.shape}")
        if s.shape[0] < 2:
            raise InvalidSize("a curve needs at least two samples")
        seg = np.linalg.norm(np.diff(s, axis=0), axis=1)
        bad = np.flatnonzero(seg == 0.0)
        if bad.size:
            raise DuplicateConsecutiveSamples(
                f"samples {int(bad[0])} and {int(bad[0]) + 1} coincide"
            )
        object.__setattr__(self, "samples", _frozen(s))

    def __len__(self):
        return self.samples.shape[0]

    def cumulative_length(self) -> np.ndarray:
        seg = np.linalg.norm(np.diff(self.samples, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])


def _check_measure(measure, n):
    if measure.shape != (n,):
        raise InvalidSize(f"measure has shape {measure.shape}, expected ({n},)")
    if not np.all(np.isfinite(measure)) or np.any(measure <= 0.0) or np.any(measure > 1.0):
        raise MeasureNotSimplex("measure entries must lie in (0, 1]")
    total = math.fsum(measure.tolist())
    if abs(total - 1.0) > MEASURE_TOL:
        raise MeasureNotSimplex(f"measure sums to {total!r}, not 1")


def triangle_violation(dist: np.ndarray) -> float:
    """Largest amount by which d[i,k] exceeds d[i,j] + d[j,k]."""
    n = dist.shape[0]
    worst = 0.0
    for j in range(n):
        excess = dist - (dist[:, j][:, None] + dist[j][None, :])
        worst = max(worst, float(excess.max()))
    return worst


def make_space(dist, measure, check_triangle: bool = True) -> MetricMeasureSpace:
    """Validate a distance matrix and measure and return the space.

    Distances that are symmetric only up to ``1e-12`` (relative to the
    largest entry) are symmetrized so downstream matrices are exactly
    symmetric. A failed triangle inequality emits
    :class:`TriangleInequalityWarning` and sets ``triangle_ok=False``;
    generators whose output is a metric by construction skip that O(n^3)
    check with ``check_triangle=False``.
    """
    d = np.array(dist, dtype=np.float64)
    mu = np.array(measure, dtype=np.float64).reshape(-1)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise InvalidSize(f"distance matrix must be square and non-empty, got shape {d.shape}")
    n = d.shape[0]
    _check_measure(mu, n)
    if not np.all(np.isfinite(d)):
        raise NegativeDistance("distance matrix has non-finite entries")
    if np.any(np.diag(d) != 0.0):
        raise NonzeroDiagonal("distance matrix must have a zero diagonal")
    if np.any(d < 0.0):
        raise NegativeDistance("distance matrix has negative entries")
    scale = max(1.0, float(np.abs(d).max()))
    if np.any(np.abs(d - d.T) > SYMMETRY_TOL * scale):
        raise AsymmetricDistance("distance matrix is not symmetric")
    d = 0.5 * (d + d.T)
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] == 0.0):
        i, k = np.argwhere((d == 0.0) & off)[0]
        raise DuplicatePoints(f"points {i} and {k} are at distance 0")
    excess = triangle_violation(d) if check_triangle else 0.0
    ok = excess <= TRIANGLE_TOL * scale
    if not ok:
        warnings.warn(
            f"triangle inequality violated by {excess:.3g}", TriangleInequalityWarning, stacklevel=2
        )
    return MetricMeasureSpace(_frozen(d), _frozen(mu), triangle_ok=ok)


def uniform_measure(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def delta_space(n: int) -> MetricMeasureSpace:
    """``n`` points at mutual distance 1 with the uniform measure."""
    if n < 1:
        raise InvalidSize("delta_space needs n >= 1")
    return make_space(1.0 - np.eye(n), uniform_measure(n))


def arc_length_space(curve: Curve3D, measure=None) -> MetricMeasureSpace:
    """Distances along the polyline through the curve samples, in sample order."""
    if not isinstance(curve, Curve3D):
        curve = Curve3D(curve)
    s = curve.cumulative_length()
    dist = np.abs(s[:, None] - s[None, :])
    if measure is None:
        measure = uniform_measure(len(curve))
    return make_space(dist, measure, check_triangle=False)


def point_cloud_space(points, measure=None) -> MetricMeasureSpace:
    """Euclidean distances between the rows of ``points``."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise InvalidSize(f"point cloud must have shape (N, d), got {x.shape}")
    dist = squareform(pdist(x)) if x.shape[0] > 1 else np.zeros((1, 1))
    if measure is None:
        measure = uniform_measure(x.shape[0])
    return make_space(dist, measure, check_triangle=False)


def subsample_indices(total: int, count: int) -> np.ndarray:
    """Evenly spaced indices into ``range(total)``, both endpoints included."""
    if count < 1 or count > total:
        raise InvalidSize(f"cannot take {count} samples from {total}")
    if count == 1:
        return np.array([0])
    return np.rint(np.linspace(0, total - 1, count)).astype(int)


def subsampled_arc_length_space(curve: Curve3D, count: int) -> MetricMeasureSpace:
    """Arc-length space on ``count`` evenly indexed samples.

    Distances are measured along the full curve, then restricted to the
    chosen samples, so subsampling does not shorten the path.
    """
    idx = subsample_indices(len(curve), count)
    s = curve.cumulative_length()[idx]
    return make_space(np.abs(s[:, None] - s[None, :]), uniform_measure(count), check_triangle=False)


def spiral_curve(
    n_samples: int,
    growth: float,
    t_max: float = 12.0,
    omega: float = 2.0,
    drift: float = 0.05,
    center=(1.0, 1.0, 1.0),
) -> Curve3D:
    """Stand-in trajectory: a 3D spiral around ``center``.

    Not the ODE system used for the published trajectories (which is not
    available here). ``growth < 0`` spirals in toward ``center`` like a
    stable focus, ``growth > 0`` spirals out like an unstable one.
    """
    t = np.linspace(0.0, t_max, n_samples)
    r = 0.5 * np.exp(growth * t)
    c = np.asarray(center, dtype=np.float64)
    pts = np.column_stack(
        [
            c[0] + r * np.cos(omega * t),
            c[1] + r * np.sin(omega * t),
            c[2] + drift * t + 0.25 * r * np.sin(0.5 * omega * t),
        ]
    )
    return Curve3D(pts)


def _read_rows(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError("file not found", path=path) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(str(exc), path=path) from None
    rows = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            raise ParseError(f"non-numeric value in row {row!r}", path=path, lineno=lineno) from None
        rows.append((lineno, values))
    if not rows:
        raise ParseError("file has no data rows", path=path)
    return rows


def _rectangular(rows, width, path):
    for lineno, values in rows:
        if len(values) != width:
            raise ParseError(
                f"expected {width} values, found {len(values)}", path=path, lineno=lineno
            )
    return np.array([values for _, values in rows])


def load_curve(path) -> Curve3D:
    rows = _read_rows(path)
    samples = _rectangular(rows, 3, path)
    return Curve3D(samples)


def load_space(path, format: str = "distance-matrix") -> MetricMeasureSpace:
    """Read a space from a headerless UTF-8 CSV file.

    ``distance-matrix``: n rows of n values, optionally followed by one
    measure row (uniform otherwise). ``point-cloud``: one point per row.
    ``curve``: one ``x,y,z`` sample per row, distances by arc length.
    """
    rows = _read_rows(path)
    if format == "distance-matrix":
        n = len(rows[0][1])
        if len(rows) == n:
            dist, measure = _rectangular(rows, n, path), uniform_measure(n)
        elif len(rows) == n + 1:
            dist = _rectangular(rows[:n], n, path)
            measure = _rectangular(rows[n:], n, path)[0]
        else:
            lineno = rows[min(len(rows), n + 1) - 1][0]
            raise ParseError(
                f"expected {n} or {n + 1} rows for a {n}x{n} matrix, found {len(rows)}",
                path=path,
                lineno=lineno,
            )
        return make_space(dist, measure)
    if format == "point-cloud":
        d = len(rows[0][1])
        return point_cloud_space(_rectangular(rows, d, path))
    if format == "curve":
        return arc_length_space(Curve3D(_rectangular(rows, 3, path)))
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def save_space(space: MetricMeasureSpace, path) -> None:
    """Write ``space`` in the distance-matrix format (measure row included)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in space.dist:
            w.writerow([repr(float(v)) for v in row])
        w.writerow([repr(float(v)) for v in space.measure])


def save_curve(curve: Curve3D, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in curve.samples:
            w.writerow([repr(float(v)) for v in row])
