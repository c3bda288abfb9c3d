import math

import numpy as np
import pytest

from hullmetry.errors import DegenerateInput, DimensionMismatch, NonpositiveScale, ParamOutOfRange
from hullmetry.geometry import polytope_from_facets
from hullmetry.fixtures import lshape, unit_square
from hullmetry.minkowski import (
    BodyApprox,
    body_beta,
    check_reverse_bm,
    convexification_gap,
    empirical_general_ratio,
    minkowski_average,
    minkowski_sum,
    scale_body,
    volume_ratio_general_bound,
)

from oracles import polygon_contains, shoelace

L_DOC = lshape()
L_VERTS = np.array(L_DOC["vertices"])


def lshape_body(axis_cells=100):
    poly = polytope_from_facets(L_VERTS, L_DOC["facets"])
    return BodyApprox.from_polytope(poly, axis_cells=axis_cells)


def square_body():
    return BodyApprox.convex_hull_of(unit_square()["vertices"])


# ---------------------------------------------------------------------------
# sums and scaling
# ---------------------------------------------------------------------------


def test_sum_square_with_itself_doubles():
    s2 = minkowski_sum(square_body(), square_body())
    assert s2.volume() == pytest.approx(4.0, abs=1e-12)
    assert sorted(map(tuple, s2.vertices.tolist())) == [
        (0.0, 0.0), (0.0, 2.0), (2.0, 0.0), (2.0, 2.0)]


def test_sum_of_orthogonal_segments_is_square():
    a = BodyApprox.convex_hull_of([[0.0, 0.0], [1.0, 0.0]])
    b = BodyApprox.convex_hull_of([[0.0, 0.0], [0.0, 1.0]])
    sq = minkowski_sum(a, b)
    assert sq.volume() == pytest.approx(1.0, abs=1e-12)


def test_sum_dimension_mismatch():
    a = BodyApprox.convex_hull_of([[0.0, 0.0], [1.0, 0.0]])
    b = BodyApprox.convex_hull_of([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    with pytest.raises(DimensionMismatch):
        minkowski_sum(a, b)


def test_sum_commutative_and_associative_volumes():
    tri = BodyApprox.convex_hull_of([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    sq = square_body()
    seg = BodyApprox.convex_hull_of([[0.0, 0.0], [0.5, 0.25]])
    ab = minkowski_sum(tri, sq).volume()
    ba = minkowski_sum(sq, tri).volume()
    assert ab == pytest.approx(ba, rel=1e-12)
    abc1 = minkowski_sum(minkowski_sum(tri, sq), seg).volume()
    abc2 = minkowski_sum(tri, minkowski_sum(sq, seg)).volume()
    assert abc1 == pytest.approx(abc2, rel=1e-12)


def test_sum_commutative_on_grid_path():
    lb = lshape_body(axis_cells=60)
    sq = square_body()
    ab = minkowski_sum(lb, sq)
    ba = minkowski_sum(sq, lb)
    assert ab.volume() == pytest.approx(ba.volume(), rel=1e-9)
    from hullmetry.sampling import hausdorff_distance

    res = max(ab.grid.h, ba.grid.h)
    assert hausdorff_distance(ab.grid.cell_centers(), ba.grid.cell_centers()) <= res


def test_forward_brunn_minkowski_on_convex_bodies():
    tri = BodyApprox.convex_hull_of([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    sq = square_body()
    n = 2
    lhs = minkowski_sum(tri, sq).volume() ** (1 / n)
    rhs = tri.volume() ** (1 / n) + sq.volume() ** (1 / n)
    assert lhs >= rhs - 1e-12


def test_scale_body_volume_law():
    sq = square_body()
    assert scale_body(sq, 2.0).volume() == pytest.approx(4.0, abs=1e-12)
    assert scale_body(sq, 1.0).volume() == pytest.approx(1.0, abs=1e-12)
    lb = lshape_body()
    half = scale_body(lb, 0.5)
    assert half.volume() == pytest.approx(0.75, abs=1e-12)
    assert half.volume() == pytest.approx(shoelace(L_VERTS * 0.5), abs=1e-12)


def test_scale_body_rejects_nonpositive():
    with pytest.raises(NonpositiveScale):
        scale_body(square_body(), 0.0)
    with pytest.raises(NonpositiveScale):
        scale_body(square_body(), -1.0)


# ---------------------------------------------------------------------------
# Minkowski averages
# ---------------------------------------------------------------------------


def test_average_of_convex_is_fixed_point():
    sq = square_body()
    for k in (1, 2, 5):
        assert minkowski_average(sq, k).volume() == pytest.approx(1.0, abs=1e-12)


def test_average_k1_is_identity():
    lb = lshape_body()
    assert minkowski_average(lb, 1) is lb


def test_average_rejects_bad_k():
    with pytest.raises(ParamOutOfRange):
        minkowski_average(square_body(), 0)


def test_lshape_average2_volume_between_body_and_hull():
    a2 = minkowski_average(lshape_body(), 2)
    vol = a2.volume()
    assert 3.0 < vol < 3.5


def test_lshape_sum_with_itself_is_scaled_average():
    lb = lshape_body(axis_cells=60)
    summed = minkowski_sum(lb, lb)
    avg2 = minkowski_average(lb, 2)
    # A + A = 2 A(2), so volumes relate by 2^n
    assert summed.volume() == pytest.approx(4 * avg2.volume(), rel=1e-9)


def test_lshape_average2_matches_bruteforce_membership():
    # oracle: x is in (A + A)/2 iff some a in A has 2x - a in A, with A the
    # analytic L-shape; area from counting on a fixed grid
    h = 0.05
    xs = np.arange(0.0, 2.0, h) + h / 2
    grid = np.array([[x, y] for x in xs for y in xs])

    def in_l(p):
        return polygon_contains(L_VERTS, p)

    a_pts = np.array([p for p in grid if in_l(p)])
    count = 0
    for x in grid:
        refl = 2 * x - a_pts
        if any(in_l(r) for r in refl):
            count += 1
    oracle_area = count * h * h

    a2 = minkowski_average(lshape_body(), 2)
    assert a2.volume() == pytest.approx(oracle_area, rel=0.04)


def test_two_point_average_is_uniform_grid():
    tp = BodyApprox.from_points([[0.0, 0.0], [1.0, 0.0]])
    for k in (2, 4, 7):
        avg = minkowski_average(tp, k)
        got = sorted(round(p[0], 9) for p in avg.points.tolist())
        assert got == [round(j / k, 9) for j in range(k + 1)]


def test_average_volume_nondecreasing_and_below_hull():
    traces = convexification_gap(lshape_body(), 6)
    vols = [t.vol_Ak for t in traces]
    tol = 0.05
    assert all(b >= a - tol for a, b in zip(vols, vols[1:]))
    assert all(v <= 3.5 + tol for v in vols)
    assert all(t.vol_Ak <= t.bound_value + 1e-9 for t in traces)


# ---------------------------------------------------------------------------
# convexification gaps
# ---------------------------------------------------------------------------


def test_convex_body_has_zero_gap():
    traces = convexification_gap(square_body(), 4)
    for t in traces:
        assert t.hausdorff_to_hull <= 0.02


def test_two_point_gap_is_half_spacing():
    tp = BodyApprox.from_points([[0.0, 0.0], [1.0, 0.0]])
    traces = convexification_gap(tp, 8)
    for t in traces:
        assert t.hausdorff_to_hull == pytest.approx(1 / (2 * t.k), abs=0.01)


def test_lshape_gap_sequence_decreases():
    traces = convexification_gap(lshape_body(), 8)
    gaps = [t.hausdorff_to_hull for t in traces]
    h = lshape_body().natural_spacing()
    assert all(b <= a + h / 2 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] <= gaps[0]


# ---------------------------------------------------------------------------
# reverse Brunn-Minkowski
# ---------------------------------------------------------------------------


def test_revbm_unit_square_exact():
    sq = square_body()
    rep = check_reverse_bm(sq, sq, 1.0, 1.0, 1)
    assert rep.lhs_vol == pytest.approx(4.0, abs=1e-12)
    assert rep.rhs_terms[0] == pytest.approx(math.pi / 2, rel=1e-12)
    assert rep.empirical_C1 == pytest.approx(4 / math.pi, abs=1e-9)


def test_revbm_ball_ratio_two():
    ang = 2 * np.pi * np.arange(256) / 256
    ball = BodyApprox.convex_hull_of(np.stack([np.cos(ang), np.sin(ang)], axis=1))
    rep = check_reverse_bm(ball, ball, 1.0, 1.0, 1)
    # ball + ball = 2 ball and beta = 1, so the constant is 2^(n-1) = 2
    assert rep.empirical_C1 == pytest.approx(2.0, rel=0.01)
    assert rep.beta_A == pytest.approx(1.0, rel=0.01)


def test_revbm_large_m_exponent_limit():
    sq = square_body()
    rep = check_reverse_bm(sq, sq, 1.0, 1.0, 64)
    # every volume^(1/m) tends to 1, so the ratio tends to 4^(1/64)/2ish
    expected = 4.0 ** (1 / 64) / (2 * (math.pi / 2) ** (1 / 64))
    assert rep.empirical_C1 == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("m", [1, 2])
def test_revbm_algebraic_identity_convex_equal_bodies(s, m):
    sq = square_body()
    rep = check_reverse_bm(sq, sq, s, s, m)
    n = 2
    vol, beta = 1.0, math.pi / 2
    expected = (2 * s) ** (n / m) * vol ** (1 / m) / (2 * s * (beta * vol) ** (1 / m))
    assert rep.empirical_C1 == pytest.approx(expected, rel=1e-9)


def test_revbm_rejects_degenerate_and_bad_params():
    seg = BodyApprox.convex_hull_of([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(DegenerateInput):
        check_reverse_bm(seg, seg, 1.0, 1.0, 1)
    sq = square_body()
    with pytest.raises(ParamOutOfRange):
        check_reverse_bm(sq, sq, -1.0, 1.0, 1)


def test_revbm_fixture_suite_constant_bounded():
    worst = 0.0
    bodies = [square_body(), lshape_body(axis_cells=60)]
    for body in bodies:
        for s in (0.5, 1.0, 2.0):
            for t in (0.5, 1.0, 2.0):
                for m in (1, 2):
                    rep = check_reverse_bm(body, body, s, t, m)
                    worst = max(worst, rep.empirical_C1)
    assert math.isfinite(worst) and worst <= 10.0


# ---------------------------------------------------------------------------
# general volume-ratio bound
# ---------------------------------------------------------------------------


def test_bound_formula_values():
    assert volume_ratio_general_bound(2, 2.0) == pytest.approx(2.0, abs=1e-12)
    assert volume_ratio_general_bound(3, 2.0) == pytest.approx(10 / 3, abs=1e-12)
    for c2 in (1.5, 3.0, 7.0):
        assert volume_ratio_general_bound(2, c2) == pytest.approx(c2, abs=1e-12)


def test_bound_formula_c2_limit_and_errors():
    assert volume_ratio_general_bound(5, 1.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ParamOutOfRange):
        volume_ratio_general_bound(1, 2.0)
    with pytest.raises(ParamOutOfRange):
        volume_ratio_general_bound(3, 0.5)


def test_bound_at_least_one():
    for k in (2, 3, 5, 8):
        for c2 in (1.0 + 1e-9, 1.2, 2.0, 4.0):
            assert volume_ratio_general_bound(k, c2) >= 1.0 - 1e-12


def test_general_ratio_convex_is_one():
    rep = empirical_general_ratio(square_body(), 4)
    assert rep.ratio == pytest.approx(1.0, rel=1e-9)
    assert rep.holds


def test_general_ratio_lshape():
    rep = empirical_general_ratio(lshape_body(), 8)
    assert rep.ratio == pytest.approx(3.5 / 3, rel=1e-9)
    assert rep.holds
    assert rep.bound >= rep.ratio


def test_general_ratio_cshape_grid_oracle():
    # annulus-like C-shape: square ring with a slit
    outer, inner, slit = 2.0, 1.0, 0.4
    verts = np.array(
        [
            [-outer, -outer], [outer, -outer], [outer, outer], [slit / 2, outer],
            [slit / 2, inner], [inner, inner], [inner, -inner], [-inner, -inner],
            [-inner, inner], [-slit / 2, inner], [-slit / 2, outer], [-outer, outer],
        ]
    )
    facets = [[i, (i + 1) % len(verts)] for i in range(len(verts))]
    poly = polytope_from_facets(verts, facets)
    body = BodyApprox.from_polytope(poly, axis_cells=100)

    h = 0.02
    xs = np.arange(-outer, outer, h) + h / 2
    count = sum(polygon_contains(verts, (x, y)) for x in xs for y in xs)
    area_oracle = count * h * h
    hull_area = shoelace(np.array([[-2, -2], [2, -2], [2, 2], [-2, 2]]))

    rep = empirical_general_ratio(body, 6)
    assert rep.ratio == pytest.approx(hull_area / area_oracle, rel=0.02)


def test_body_beta_matches_geometry():
    assert body_beta(square_body()) == pytest.approx(math.pi / 2, rel=1e-9)
