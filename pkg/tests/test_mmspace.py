import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwlab import mmspace
from gwlab.errors import (
    AsymmetricDistance,
    DuplicateConsecutiveSamples,
    DuplicatePoints,
    InvalidSize,
    MeasureNotSimplex,
    NegativeDistance,
    NonzeroDiagonal,
    ParseError,
)
from gwlab.mmspace import Curve3D, TriangleInequalityWarning


def test_make_space_example1():
    X = mmspace.make_space([[0, 1], [1, 0]], [0.5, 0.5])
    assert X.n_points == 2
    np.testing.assert_array_equal(X.dist, [[0, 1], [1, 0]])
    np.testing.assert_array_equal(X.measure, [0.5, 0.5])
    assert X.triangle_ok


def test_single_point_space():
    X = mmspace.make_space([[0]], [1])
    assert X.n_points == 1


@pytest.mark.parametrize(
    "dist, measure, exc",
    [
        ([[0, 1], [1, 0]], [0.6, 0.5], MeasureNotSimplex),
        ([[0, 1], [1, 0]], [1.0, 0.0], MeasureNotSimplex),
        ([[0, 1], [2, 0]], [0.5, 0.5], AsymmetricDistance),
        ([[1, 1], [1, 0]], [0.5, 0.5], NonzeroDiagonal),
        ([[0, -1], [-1, 0]], [0.5, 0.5], NegativeDistance),
        ([[0, 0], [0, 0]], [0.5, 0.5], DuplicatePoints),
        ([[0, 1, 1], [1, 0, 1]], [0.5, 0.5], InvalidSize),
        ([[0, 1], [1, 0]], [1.0], InvalidSize),
    ],
)
def test_make_space_rejects(dist, measure, exc):
    with pytest.raises(exc):
        mmspace.make_space(dist, measure)


def test_measure_tolerance_is_tight():
    with pytest.raises(MeasureNotSimplex):
        mmspace.make_space([[0, 1], [1, 0]], [0.5, 0.5 + 1e-10])


def test_near_symmetric_input_is_symmetrized():
    d = np.array([[0, 1.0], [1.0 + 1e-14, 0]])
    X = mmspace.make_space(d, [0.5, 0.5])
    assert np.array_equal(X.dist, X.dist.T)


def test_triangle_violation_warns_but_builds():
    d = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
    with pytest.warns(TriangleInequalityWarning):
        X = mmspace.make_space(d, [1 / 3, 1 / 3, 1 / 3])
    assert not X.triangle_ok


def test_space_is_immutable():
    X = mmspace.delta_space(3)
    with pytest.raises(ValueError):
        X.dist[0, 1] = 7.0


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_delta_space(n):
    X = mmspace.delta_space(n)
    np.testing.assert_array_equal(X.dist, 1 - np.eye(n))
    np.testing.assert_allclose(X.measure, np.full(n, 1 / n), rtol=0, atol=0)
    assert np.count_nonzero(X.dist == 1) == n * (n - 1)
    assert np.count_nonzero(X.dist == 0) == n


def test_delta_space_zero():
    with pytest.raises(InvalidSize):
        mmspace.delta_space(0)


def test_arc_length_collinear():
    X = mmspace.arc_length_space(Curve3D([(0, 0, 0), (1, 0, 0), (2, 0, 0)]))
    np.testing.assert_array_equal(X.dist, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    np.testing.assert_allclose(X.measure, [1 / 3] * 3)


def test_arc_length_bend():
    X = mmspace.arc_length_space(Curve3D([(0, 0, 0), (1, 0, 0), (1, 1, 0)]))
    assert X.dist[0, 2] == 2.0


def test_curve_rejects_repeated_sample():
    with pytest.raises(DuplicateConsecutiveSamples):
        Curve3D([(0, 0, 0), (0, 0, 0), (1, 0, 0)])


def test_curve_needs_two_samples():
    with pytest.raises(InvalidSize):
        Curve3D([(0, 0, 0)])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_arc_length_dominates_chord_and_is_additive(n, seed):
    rng = np.random.default_rng(seed)
    pts = np.cumsum(rng.standard_normal((n, 3)), axis=0)
    X = mmspace.arc_length_space(Curve3D(pts))
    chord = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    assert np.all(X.dist >= chord - 1e-12 * max(1.0, chord.max()))
    i, j, k = sorted(rng.integers(0, n, 3))
    assert X.dist[i, k] == pytest.approx(X.dist[i, j] + X.dist[j, k], rel=1e-12, abs=1e-12)


def test_subsample_indices_keep_endpoints():
    idx = mmspace.subsample_indices(101, 10)
    assert idx[0] == 0 and idx[-1] == 100
    assert np.all(np.diff(idx) > 0)


def test_subsampled_space_uses_full_curve_length():
    c = mmspace.spiral_curve(200, 0.1)
    X = mmspace.subsampled_arc_length_space(c, 5)
    assert X.dist[0, -1] == pytest.approx(c.cumulative_length()[-1])


def test_load_distance_matrix_with_measure(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("0,1\n1,0\n0.5,0.5\n", encoding="utf-8")
    X = mmspace.load_space(f, "distance-matrix")
    np.testing.assert_array_equal(X.dist, [[0, 1], [1, 0]])
    np.testing.assert_array_equal(X.measure, [0.5, 0.5])


def test_load_distance_matrix_uniform_default(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("0,1,1\n1,0,1\n1,1,0\n", encoding="utf-8")
    X = mmspace.load_space(f)
    np.testing.assert_allclose(X.measure, [1 / 3] * 3)


def test_load_point_cloud(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("0,0,0\n3,4,0\n", encoding="utf-8")
    X = mmspace.load_space(f, "point-cloud")
    np.testing.assert_array_equal(X.dist, [[0, 5], [5, 0]])


def test_load_curve_format(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("0,0,0\n1,0,0\n1,1,0\n", encoding="utf-8")
    X = mmspace.load_space(f, "curve")
    assert X.dist[0, 2] == 2.0


def test_parse_error_reports_line(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("0,1\n1,0,3\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        mmspace.load_space(f)
    assert info.value.lineno == 2


def test_parse_error_non_numeric(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("0,1\nx,0\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        mmspace.load_space(f)
    assert info.value.lineno == 2


def test_parse_error_missing_file(tmp_path):
    with pytest.raises(ParseError):
        mmspace.load_space(tmp_path / "nope.csv")


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    X = mmspace.point_cloud_space(rng.standard_normal((6, 2)), None)
    mmspace.save_space(X, tmp_path / "x.csv")
    Y = mmspace.load_space(tmp_path / "x.csv")
    np.testing.assert_array_equal(X.dist, Y.dist)
    np.testing.assert_array_equal(X.measure, Y.measure)


def test_spiral_standin_regimes():
    out = mmspace.spiral_curve(300, 0.1).samples
    inward = mmspace.spiral_curve(300, -0.1).samples
    center = np.array([1.0, 1.0])
    r_out = np.linalg.norm(out[:, :2] - center, axis=1)
    r_in = np.linalg.norm(inward[:, :2] - center, axis=1)
    assert r_out[-1] > r_out[0] and r_in[-1] < r_in[0]
