import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hullmetry.errors import DegenerateInput, NonOrientable
from hullmetry.geometry import (
    Ball,
    PointCloud,
    beta_ratio,
    hull_contains,
    load_body,
    load_cloud,
    min_enclosing_ball,
    polytope_from_facets,
    quickhull,
    triangulate_boundary,
    triangulate_facets,
    unit_ball_volume,
    volume_det,
    volume_projected,
    volume_ratio_poly,
)
from hullmetry.fixtures import lshape, star2d, unit_cube, unit_square

from oracles import extreme_points, shoelace

L_VERTS = np.array(lshape()["vertices"])
L_FACETS = lshape()["facets"]
SQ = np.array(unit_square()["vertices"])


def lshape_poly():
    return polytope_from_facets(L_VERTS, L_FACETS)


# ---------------------------------------------------------------------------
# quickhull
# ---------------------------------------------------------------------------


def test_quickhull_drops_interior_point():
    pts = np.vstack([SQ, [[0.5, 0.5]]])
    hull = quickhull(pts)
    assert sorted(map(tuple, hull.vertices.tolist())) == sorted(map(tuple, SQ.tolist()))


def test_quickhull_lshape_matches_bruteforce_extreme_points():
    hull = quickhull(L_VERTS)
    expected = sorted(map(tuple, L_VERTS[extreme_points(L_VERTS)].tolist()))
    assert sorted(map(tuple, hull.vertices.tolist())) == expected
    # pentagon: the reflex corner (1,1) is gone
    assert len(hull.vertices) == 5
    assert (1.0, 1.0) not in map(tuple, hull.vertices.tolist())


def test_quickhull_collinear_raises():
    with pytest.raises(DegenerateInput):
        quickhull(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))


def test_quickhull_idempotent_on_fixtures():
    for verts in (SQ, L_VERTS, np.array(unit_cube()["vertices"]), np.array(star2d()["vertices"])):
        hull = quickhull(verts)
        again = quickhull(hull.vertices)
        assert sorted(map(tuple, hull.vertices.tolist())) == sorted(
            map(tuple, again.vertices.tolist())
        )


def test_quickhull_contains_inputs():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        pts = rng.standard_normal((30, n))
        hull = quickhull(pts)
        assert hull_contains(hull, pts).all()


def test_quickhull_volume_monotone_under_subsets():
    rng = np.random.default_rng(11)
    pts = rng.standard_normal((25, 3))
    big = volume_det(quickhull(pts).boundary)
    small = volume_det(quickhull(pts[:10]).boundary)
    assert big >= small - 1e-12


def test_quickhull_agrees_with_qhull_reference():
    from scipy.spatial import ConvexHull as QHull

    rng = np.random.default_rng(41)
    for n in (2, 3, 4, 5):
        for _ in range(4):
            pts = rng.standard_normal((n + 12, n))
            ours = quickhull(pts)
            ref = QHull(pts)
            assert volume_det(ours.boundary) == pytest.approx(ref.volume, rel=1e-9)
            assert sorted(map(tuple, ours.vertices.tolist())) == sorted(
                map(tuple, pts[ref.vertices].tolist())
            )


def test_quickhull_handles_duplicates_and_cocircular_points():
    ang = 2 * np.pi * np.arange(12) / 12
    circ = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    pts = np.vstack([circ, circ[:4], [[0.0, 0.0]]])
    hull = quickhull(pts)
    assert len(hull.vertices) == 12
    assert volume_det(hull.boundary) == pytest.approx(12 * 0.5 * math.sin(2 * np.pi / 12))


def test_quickhull_grid_with_coplanar_facets():
    grid = np.array([[x, y, z] for x in range(3) for y in range(3) for z in range(3)], float)
    hull = quickhull(grid)
    assert volume_det(hull.boundary) == pytest.approx(8.0, rel=1e-12)
    assert hull_contains(hull, grid).all()
    # only the 8 corners are extreme, face/edge midpoints are not vertices
    assert len(hull.vertices) == 8


# ---------------------------------------------------------------------------
# boundary triangulation
# ---------------------------------------------------------------------------


def test_triangulate_square_gives_four_edges():
    b = triangulate_facets(SQ, unit_square()["facets"], 2)
    assert b.n_simplices == 4


def test_triangulate_cube_gives_twelve_triangles():
    doc = unit_cube()
    b = triangulate_facets(np.array(doc["vertices"]), doc["facets"], 3)
    assert b.n_simplices == 12
    assert volume_det(b) == pytest.approx(1.0, abs=1e-12)


def test_triangulate_tetrahedron_outward():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    b = triangulate_facets(verts, [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], 3)
    assert b.n_simplices == 4
    centroid = verts.mean(axis=0)
    for simp in b.simplices:
        assert np.linalg.det(verts[simp] - centroid) > 0


def test_triangulate_open_boundary_rejected():
    with pytest.raises(NonOrientable):
        triangulate_facets(SQ, [[0, 1], [1, 2], [2, 3]], 2)


def test_triangulate_boundary_of_polytope():
    poly = lshape_poly()
    b = triangulate_boundary(poly)
    assert b.n_simplices == 6


# ---------------------------------------------------------------------------
# volume formulas
# ---------------------------------------------------------------------------


def test_volume_unit_square():
    poly = polytope_from_facets(SQ, unit_square()["facets"])
    assert volume_det(poly.boundary) == pytest.approx(1.0, abs=1e-12)
    assert volume_projected(poly.boundary) == pytest.approx(1.0, abs=1e-12)


def test_volume_standard_simplex():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    hull = quickhull(verts)
    assert volume_det(hull.boundary) == pytest.approx(1 / 6, abs=1e-12)


def test_volume_lshape_matches_shoelace():
    poly = lshape_poly()
    assert volume_det(poly.boundary) == pytest.approx(shoelace(L_VERTS), abs=1e-12)
    assert volume_det(poly.boundary) == pytest.approx(3.0, abs=1e-12)
    assert volume_projected(poly.boundary) == pytest.approx(3.0, abs=1e-12)


def test_volume_formulas_agree_on_random_polytopes():
    rng = np.random.default_rng(17)
    for n in (2, 3, 4):
        for _ in range(5):
            hull = quickhull(rng.standard_normal((n + 8, n)))
            vd = volume_det(hull.boundary)
            vp = volume_projected(hull.boundary)
            assert abs(vd - vp) <= 1e-9 * abs(vd)


def test_volume_translation_rotation_invariance():
    rng = np.random.default_rng(23)
    pts = rng.standard_normal((15, 3))
    base = volume_det(quickhull(pts).boundary)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    moved = pts @ q.T + np.array([5.0, -3.0, 11.0])
    rotated = volume_det(quickhull(moved).boundary)
    assert rotated == pytest.approx(base, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_volume_formula_equality_property(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    hull = quickhull(rng.uniform(-1, 1, (n + 6, n)))
    vd = volume_det(hull.boundary)
    vp = volume_projected(hull.boundary)
    assert abs(vd - vp) <= 1e-9 * max(abs(vd), 1e-30)


# ---------------------------------------------------------------------------
# minimum enclosing ball
# ---------------------------------------------------------------------------


def test_meb_single_point():
    ball = min_enclosing_ball(np.array([[2.0, 3.0]]))
    assert ball.radius == 0.0
    assert np.allclose(ball.center, [2.0, 3.0])


def test_meb_two_points():
    ball = min_enclosing_ball(np.array([[0.0, 0.0], [0.0, 4.0]]))
    assert ball.radius == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(ball.center, [0.0, 2.0])


def test_meb_unit_square():
    ball = min_enclosing_ball(SQ)
    assert np.allclose(ball.center, [0.5, 0.5], atol=1e-9)
    assert ball.radius == pytest.approx(math.sqrt(2) / 2, abs=1e-9)


def test_meb_simplex_not_circumsphere():
    # circumcenter of {0, e1, e2, e3} lies outside the simplex; the true
    # minimum ball is supported by the three basis vectors only
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    ball = min_enclosing_ball(verts)
    assert ball.radius == pytest.approx(math.sqrt(6) / 3, abs=1e-9)


def test_meb_contains_all_and_support_certifies():
    rng = np.random.default_rng(5)
    for n in (2, 3, 5):
        pts = rng.standard_normal((40, n))
        ball = min_enclosing_ball(pts)
        d = np.linalg.norm(pts - ball.center, axis=1)
        assert (d <= ball.radius + 1e-9).all()
        assert ball.support is not None and len(ball.support) <= n + 1
        sup_d = np.linalg.norm(ball.support - ball.center, axis=1)
        assert np.allclose(sup_d, ball.radius, atol=1e-7)
        again = min_enclosing_ball(ball.support)
        assert again.radius == pytest.approx(ball.radius, rel=1e-9)
        # no strictly smaller ball covers the support set
        assert not Ball(again.center, (1 - 1e-6) * ball.radius).contains(ball.support).all()


def test_meb_high_dimension_contains_all():
    pts = np.eye(16)
    ball = min_enclosing_ball(pts)
    d = np.linalg.norm(pts - ball.center, axis=1)
    assert (d <= ball.radius + 1e-9).all()
    # optimum is sqrt(15)/4; the iterative path should be close
    assert ball.radius <= math.sqrt(15) / 4 * 1.05


# ---------------------------------------------------------------------------
# ratios
# ---------------------------------------------------------------------------


def test_beta_unit_square():
    poly = polytope_from_facets(SQ, unit_square()["facets"])
    assert beta_ratio(poly) == pytest.approx(math.pi / 2, rel=1e-9)


def test_beta_lshape():
    poly = lshape_poly()
    assert beta_ratio(poly) == pytest.approx(math.pi * 2.0 / 3.0, rel=1e-9)


def test_beta_of_finely_sampled_ball_is_one():
    ang = 2 * np.pi * np.arange(512) / 512
    poly = quickhull(np.stack([np.cos(ang), np.sin(ang)], axis=1))
    assert beta_ratio(poly) == pytest.approx(1.0, rel=1e-3)


def test_volume_ratio_poly_convex_is_one():
    for doc in (unit_square(), unit_cube()):
        poly = polytope_from_facets(np.array(doc["vertices"]), doc["facets"])
        assert volume_ratio_poly(poly) == pytest.approx(1.0, rel=1e-12)


def test_volume_ratio_poly_lshape():
    assert volume_ratio_poly(lshape_poly()) == pytest.approx(3.5 / 3.0, rel=1e-9)


def test_volume_ratio_poly_star_matches_shoelace():
    doc = star2d()
    verts = np.array(doc["vertices"])
    poly = polytope_from_facets(verts, doc["facets"])
    hv = quickhull(verts).vertices
    order = np.argsort(np.arctan2(hv[:, 1] - verts[:, 1].mean(), hv[:, 0] - verts[:, 0].mean()))
    hull_area = shoelace(hv[order])
    assert volume_ratio_poly(poly) == pytest.approx(hull_area / shoelace(verts), rel=1e-9)
    assert volume_ratio_poly(poly) > 1.0


def test_unit_ball_volume_values():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert unit_ball_volume(2, 0.5) == pytest.approx(math.pi / 4)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def test_load_body_roundtrip(tmp_path):
    path = tmp_path / "l.json"
    path.write_text(json.dumps(lshape()))
    poly = load_body(path)
    assert volume_det(poly.boundary) == pytest.approx(3.0, abs=1e-12)


def test_load_cloud_checks_dim(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"dim": 3, "points": [[0.0, 1.0]]}))
    with pytest.raises(ValueError):
        load_cloud(path)


def test_point_cloud_diameter():
    cloud = PointCloud(np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert cloud.diameter() == pytest.approx(5.0)
