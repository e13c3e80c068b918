"""Geometry layer: points, metrics, samplers, wedges, arc crossings."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from onebit import (
    DegenerateGeodesicError,
    GeneratorTag,
    Geodesic,
    NotSeparatingError,
    PointSet,
    SparseSpec,
    UnitVector,
    geodesic_distance,
    geodesic_point,
    in_convex_sparse_set,
    in_sparse_set,
    in_wedge,
    pairwise_geodesic,
    sample_convex_sparse,
    sample_sparse_unit,
    sample_uniform_sphere,
    signs,
    sparse_net,
    substream,
    transversal_mask,
    transversal_separation,
    uniform_sphere_rows,
    wedge_mask,
)


def unit(*coords):
    return UnitVector.normalized(np.array(coords, dtype=float))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


# --- UnitVector and SparseSpec -------------------------------------------------


def test_unit_vector_rejects_non_unit():
    with pytest.raises(ValueError):
        UnitVector([1.0, 1.0])


def test_unit_vector_rejects_scalar_and_short():
    with pytest.raises(ValueError):
        UnitVector([1.0])
    with pytest.raises(ValueError):
        UnitVector(np.ones((2, 2)))


def test_normalized_projects_and_validates():
    v = UnitVector.normalized([3.0, 4.0])
    assert v.ambient == 2 and v.n == 1
    assert math.isclose(float(np.linalg.norm(v.coords)), 1.0, abs_tol=1e-15)
    with pytest.raises(ValueError):
        UnitVector.normalized([0.0, 0.0])


def test_unit_vector_coords_are_read_only():
    v = unit(1.0, 0.0)
    with pytest.raises(ValueError):
        v.coords[0] = 0.5


def test_sparse_spec_bounds():
    spec = SparseSpec(4, 2)
    assert spec.ambient == 5
    with pytest.raises(ValueError):
        SparseSpec(4, 0)
    with pytest.raises(ValueError):
        SparseSpec(4, 6)
    with pytest.raises(ValueError):
        SparseSpec(0, 1)


# --- metric --------------------------------------------------------------------


def test_distance_trivial_values():
    e1 = unit(1, 0, 0)
    e2 = unit(0, 1, 0)
    assert geodesic_distance(e1, e1) == 0.0
    assert geodesic_distance(e1, UnitVector(-e1.coords)) == 1.0
    assert math.isclose(geodesic_distance(e1, e2), 0.5, abs_tol=1e-15)


def test_distance_of_quarter_arc_point():
    # the midpoint of the e1..e2 arc sits at angle pi/4 from either end
    mid = unit(1, 1, 0)
    assert math.isclose(geodesic_distance(unit(1, 0, 0), mid), 0.25, abs_tol=1e-12)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_metric_axioms_on_random_triples(seed):
    rng = substream(seed, "metric-axioms")
    x, y, z = (sample_uniform_sphere(4, rng) for _ in range(3))
    dxy = geodesic_distance(x, y)
    dyx = geodesic_distance(y, x)
    assert dxy == dyx
    assert 0.0 <= dxy <= 1.0
    assert geodesic_distance(x, y) <= geodesic_distance(x, z) + geodesic_distance(z, y) + 1e-12


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_pairwise_matches_scalar_distance(seed):
    rng = substream(seed, "pairwise")
    pts = PointSet.uniform(3, 6, rng)
    mat = pts.pairwise_geodesic()
    assert np.all(np.diag(mat) == 0.0)
    for i in range(6):
        for j in range(6):
            if i == j:
                continue
            assert math.isclose(
                mat[i, j], geodesic_distance(pts.unit(i), pts.unit(j)), abs_tol=1e-12
            )


def test_pairwise_accepts_raw_rows():
    rows = np.eye(3)
    mat = pairwise_geodesic(rows)
    assert mat.shape == (3, 3)
    assert math.isclose(mat[0, 1], 0.5, abs_tol=1e-15)


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        geodesic_distance(unit(1, 0), unit(1, 0, 0))


# --- samplers ------------------------------------------------------------------


def test_uniform_rows_shape_and_norms():
    rng = substream(0, "rows")
    rows = uniform_sphere_rows(5, 100, rng)
    assert rows.shape == (100, 6)
    assert np.allclose(np.linalg.norm(rows, axis=1), 1.0, atol=1e-12)


def test_uniform_marginal_variance():
    # each coordinate of a uniform point has second moment 1/(n+1);
    # with n = 4 the estimator's standard error at this sample size is
    # about 4.8e-4, so the tolerance sits at roughly four sigmas
    rng = substream(7, "marginal")
    rows = uniform_sphere_rows(4, 200_000, rng)
    assert abs(float(np.mean(rows[:, 0] ** 2)) - 0.2) < 2e-3


def test_uniform_circle_angle_is_uniform():
    rng = substream(11, "circle")
    rows = uniform_sphere_rows(1, 20_000, rng)
    angles = np.arctan2(rows[:, 1], rows[:, 0])
    u = (angles + math.pi) / (2 * math.pi)
    assert stats.kstest(u, "uniform").pvalue > 1e-3


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_sparse_sampler_support(seed):
    rng = substream(seed, "sparse")
    spec = SparseSpec(9, 3)
    x = sample_sparse_unit(spec, rng)
    assert int(np.count_nonzero(x.coords)) == 3
    assert in_sparse_set(x, spec)
    assert math.isclose(float(np.linalg.norm(x.coords)), 1.0, abs_tol=1e-12)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_convex_sparse_sampler_membership(seed):
    rng = substream(seed, "convex")
    spec = SparseSpec(15, 3)
    x = sample_convex_sparse(spec, rng)
    assert in_convex_sparse_set(x, spec)
    assert math.isclose(float(np.linalg.norm(x.coords)), 1.0, abs_tol=1e-12)


def test_convex_sparse_s1_is_one_sparse():
    rng = substream(3, "convex-s1")
    for _ in range(20):
        x = sample_convex_sparse(SparseSpec(7, 1), rng)
        assert int(np.count_nonzero(x.coords)) == 1


def test_sparse_membership_dimension_check():
    with pytest.raises(ValueError):
        in_sparse_set(unit(1, 0, 0), SparseSpec(4, 2))


# --- point sets ----------------------------------------------------------------


def test_point_set_validation_and_tags():
    rng = substream(5, "ps")
    ps = PointSet.uniform(3, 10, rng)
    assert len(ps) == 10 and ps.ambient == 4 and ps.n == 3
    assert ps.generator is GeneratorTag.UNIFORM
    sp = PointSet.sparse(SparseSpec(6, 2), 5, rng)
    assert sp.generator is GeneratorTag.SPARSE
    assert all(np.count_nonzero(sp.points[i]) == 2 for i in range(5))
    with pytest.raises(ValueError):
        PointSet(np.ones((3, 4)))


def test_point_set_subset_preserves_rows():
    rng = substream(6, "subset")
    ps = PointSet.uniform(2, 8, rng)
    sub = ps.subset([1, 3])
    assert np.array_equal(sub.points[0], ps.points[1])
    assert np.array_equal(sub.points[1], ps.points[3])


def test_sparse_net_has_close_companions():
    rng = substream(9, "net")
    spec = SparseSpec(20, 3)
    net = sparse_net(spec, 60, rng, close_pairs=8, close_scale=0.05)
    assert len(net) == 68
    for i in range(len(net)):
        assert int(np.count_nonzero(net.points[i])) <= 3
    dist = net.pairwise_geodesic()
    np.fill_diagonal(dist, 2.0)
    assert float(dist.min()) < 0.1


def test_sparse_net_zero_companions_is_plain_sample():
    rng = substream(9, "net0")
    net = sparse_net(SparseSpec(20, 3), 60, rng, close_pairs=0)
    assert len(net) == 60


# --- signs and wedges ----------------------------------------------------------


def test_sign_of_zero_is_positive():
    out = signs(np.array([0.0, -0.0, 1.5, -2.0]))
    assert out.dtype == np.int8
    assert out.tolist() == [1, 1, 1, -1]


def test_wedge_explicit_cases():
    x, y = unit(1, 0, 0), unit(0, 1, 0)
    assert in_wedge(unit(1, -1, 0), x, y)
    assert not in_wedge(unit(1, 1, 0), x, y)
    # tangent hyperplane: zero inner product counts as +, so no separation
    assert not in_wedge(unit(0, 0, 1), x, y)
    assert in_wedge(unit(0, -1, 0.0001), x, y)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_wedge_mask_matches_scalar(seed):
    rng = substream(seed, "wedge")
    x = sample_uniform_sphere(3, rng)
    y = sample_uniform_sphere(3, rng)
    thetas = uniform_sphere_rows(3, 64, rng)
    mask = wedge_mask(thetas, x.coords, y.coords)
    for i in range(64):
        assert mask[i] == in_wedge(UnitVector(thetas[i]), x, y)


def test_wedge_frequency_estimates_distance():
    rng = substream(2024, "crofton-smoke")
    x = sample_uniform_sphere(3, rng)
    y = sample_uniform_sphere(3, rng)
    d = geodesic_distance(x, y)
    freq = float(wedge_mask(uniform_sphere_rows(3, 200_000, rng), x.coords, y.coords).mean())
    assert abs(freq - d) < 4.0 * math.sqrt(d * (1 - d) / 200_000)


# --- geodesics -----------------------------------------------------------------


def test_geodesic_angle_and_length():
    geo = Geodesic(unit(1, 0, 0), unit(0, 1, 0))
    assert math.isclose(geo.angle, math.pi / 2, abs_tol=1e-15)
    assert math.isclose(geo.length, 0.5, abs_tol=1e-15)


def test_geodesic_degenerate_endpoints():
    x = unit(1, 0, 0)
    with pytest.raises(DegenerateGeodesicError):
        Geodesic(x, x)
    with pytest.raises(DegenerateGeodesicError):
        Geodesic(x, UnitVector(-x.coords))


def test_geodesic_point_endpoints_and_midpoint():
    x, y = unit(1, 0, 0), unit(0, 1, 0)
    geo = Geodesic(x, y)
    assert np.allclose(geodesic_point(geo, 0.0).coords, x.coords, atol=1e-15)
    assert np.allclose(geodesic_point(geo, 1.0).coords, y.coords, atol=1e-15)
    mid = geodesic_point(geo, 0.5)
    assert np.allclose(mid.coords, np.array([1.0, 1.0, 0.0]) / math.sqrt(2), atol=1e-14)
    with pytest.raises(ValueError):
        geodesic_point(geo, 1.5)


@given(seeds, st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=40, deadline=None)
def test_geodesic_point_constant_speed(seed, t):
    rng = substream(seed, "speed")
    x = sample_uniform_sphere(3, rng)
    y = sample_uniform_sphere(3, rng)
    geo = Geodesic(x, y)
    z = geodesic_point(geo, t)
    # arccos amplifies unit roundoff to ~1e-8 near the endpoints
    assert math.isclose(geodesic_distance(x, z), t * geo.length, abs_tol=1e-7)
    assert math.isclose(geodesic_distance(z, y), (1.0 - t) * geo.length, abs_tol=1e-7)


# --- transversal crossings -----------------------------------------------------
#
# analytic cases on the quarter arc e1..e2: the in-plane normal at the
# midpoint crosses perpendicularly at arc fraction 1/2, and tilting it out
# of the plane by a known amount dials the crossing angle exactly.


def _mid_normal(c):
    # unit normal hitting the e1..e2 arc at its midpoint with sin(angle) = c
    base = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)
    out = c * base + math.sqrt(1.0 - c * c) * np.array([0.0, 0.0, 1.0])
    return UnitVector.normalized(out)


def test_transversal_perpendicular_mid_crossing():
    x, y = unit(1, 0, 0), unit(0, 1, 0)
    assert transversal_separation(_mid_normal(1.0), x, y)


def test_transversal_shallow_angle_rejected():
    x, y = unit(1, 0, 0), unit(0, 1, 0)
    assert not transversal_separation(_mid_normal(math.sin(math.radians(30))), x, y)
    assert transversal_separation(_mid_normal(math.sin(math.radians(60))), x, y)


def test_transversal_near_endpoint_rejected():
    x, y = unit(1, 0, 0), unit(0, 1, 0)
    a = math.pi / 2
    t_star = 0.1  # crossing at 10% of the arc: closer than a quarter of d
    theta = UnitVector.normalized([-math.sin(t_star * a), math.cos(t_star * a), 0.0])
    assert in_wedge(theta, x, y)
    assert not transversal_separation(theta, x, y)


def test_transversal_requires_wedge_membership():
    x, y = unit(1, 0, 0), unit(0, 1, 0)
    with pytest.raises(NotSeparatingError):
        transversal_separation(unit(1, 1, 0), x, y)


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_transversal_mask_matches_scalar(seed):
    rng = substream(seed, "transversal")
    x = sample_uniform_sphere(3, rng)
    y = sample_uniform_sphere(3, rng)
    thetas = uniform_sphere_rows(3, 80, rng)
    mask = transversal_mask(thetas, x, y)
    wedge = wedge_mask(thetas, x.coords, y.coords)
    for i in range(80):
        if wedge[i]:
            assert mask[i] == transversal_separation(UnitVector(thetas[i]), x, y)
        else:
            assert not mask[i]


def test_transversal_mask_all_outside_wedge():
    x, y = unit(1, 0, 0.0), unit(0, 1, 0.0)
    thetas = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    thetas /= np.linalg.norm(thetas, axis=1, keepdims=True)
    assert not transversal_mask(thetas, x, y).any()
