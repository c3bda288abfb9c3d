"""Covering numbers: greedy and exact covers, packing certificates, volume sandwich.

Convention throughout: closed balls, centers restricted to the covered set.
Greedy tie-breaks go to the lowest index so every result is reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import ParamOutOfRange, TooLarge
from .geometry import (
    Polytope,
    PointCloud,
    unit_ball_volume,
    volume_det,
    volume_ratio_poly,
    _as_points,
)
from . import sampling

EXACT_COVER_CAP = 24


@dataclass
class CoveringReport:
    epsilon: float
    n_greedy: int
    n_packing: int
    n_exact: int | None = None
    vol_lower: float | None = None
    vol_upper: float | None = None
    centers: np.ndarray | None = field(default=None, repr=False)

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "n_greedy": self.n_greedy,
            "n_packing": self.n_packing,
            "n_exact": self.n_exact,
            "vol_lower": self.vol_lower,
            "vol_upper": self.vol_upper,
        }

    @staticmethod
    def csv_header() -> str:
        return "epsilon,n_greedy,n_packing,n_exact,vol_lower,vol_upper"

    def to_csv_row(self) -> str:
        cells = [
            repr(self.epsilon),
            str(self.n_greedy),
            str(self.n_packing),
            "" if self.n_exact is None else str(self.n_exact),
            "" if self.vol_lower is None else repr(self.vol_lower),
            "" if self.vol_upper is None else repr(self.vol_upper),
        ]
        return ",".join(cells)


def _points_of(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    return _as_points(cloud)


def greedy_cover(cloud, epsilon: float) -> CoveringReport:
    """Farthest-point greedy cover; an upper bound on the covering number."""
    if epsilon <= 0:
        raise ParamOutOfRange("epsilon must be positive")
    pts = _points_of(cloud)
    n = len(pts)
    mind = np.full(n, np.inf)
    centers: list[int] = []
    while True:
        far = int(np.argmax(mind))  # argmax takes the lowest index on ties
        if mind[far] <= epsilon:
            break
        centers.append(far)
        d = np.linalg.norm(pts - pts[far], axis=1)
        mind = np.minimum(mind, d)
    report = CoveringReport(
        epsilon=float(epsilon),
        n_greedy=len(centers),
        n_packing=packing_number(pts, epsilon),
        centers=pts[centers],
    )
    return report


def exact_cover_small(cloud, epsilon: float) -> int:
    """Minimum number of closed epsilon-balls centered at cloud points covering it.

    Exhaustive branch-and-bound set cover; capped at 24 points.
    """
    if epsilon <= 0:
        raise ParamOutOfRange("epsilon must be positive")
    pts = _points_of(cloud)
    n = len(pts)
    if n > EXACT_COVER_CAP:
        raise TooLarge(f"exact cover capped at {EXACT_COVER_CAP} points, got {n}")
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    masks = []
    for i in range(n):
        mask = 0
        for j in range(n):
            if dist[i, j] <= epsilon:
                mask |= 1 << j
        masks.append(mask)
    full = (1 << n) - 1

    # drop dominated candidate balls (strict subsets of another ball)
    order = sorted(range(n), key=lambda i: (-bin(masks[i]).count("1"), i))
    kept = []
    for i in order:
        if not any(masks[i] | masks[j] == masks[j] and masks[i] != masks[j] for j in kept):
            if masks[i] not in (masks[j] for j in kept):
                kept.append(i)
    cand = [masks[i] for i in kept]

    best = greedy_cover(pts, epsilon).n_greedy
    max_size = max(bin(m).count("1") for m in cand)

    def dfs(covered: int, used: int):
        nonlocal best
        if covered == full:
            best = min(best, used)
            return
        remaining = bin(full & ~covered).count("1")
        if used + math.ceil(remaining / max_size) >= best:
            return
        # branch on the lowest uncovered point
        low = (full & ~covered) & -(full & ~covered)
        for m in cand:
            if m & low:
                dfs(covered | m, used + 1)

    dfs(0, 0)
    return best


def packing_number(cloud, epsilon: float) -> int:
    """Size of the greedy maximal epsilon-separated subset (pairwise distance > eps)."""
    if epsilon <= 0:
        raise ParamOutOfRange("epsilon must be positive")
    pts = _points_of(cloud)
    chosen: list[int] = []
    mind = np.full(len(pts), np.inf)
    for i in range(len(pts)):
        if mind[i] > epsilon:
            chosen.append(i)
            mind = np.minimum(mind, np.linalg.norm(pts - pts[i], axis=1))
    return len(chosen)


def inradius(poly: Polytope) -> float:
    """Chebyshev radius of a convex polytope via linear programming."""
    n = poly.dim
    centroid = poly.vertices.mean(axis=0)
    rows, rhs = [], []
    for simp in poly.boundary.simplices:
        base = poly.vertices[simp[0]]
        mat = poly.vertices[simp[1:]] - base
        normal = np.empty(n)
        for i in range(n):
            normal[i] = (-1) ** i * np.linalg.det(np.delete(mat, i, axis=1))
        nn = np.linalg.norm(normal)
        if nn == 0:
            continue
        normal /= nn
        if normal @ centroid > normal @ base:
            normal = -normal
        rows.append(np.append(normal, 1.0))
        rhs.append(normal @ base)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if not res.success:
        return 0.0
    return float(res.x[-1])


def volume_cover_bounds(poly: Polytope, epsilon: float):
    """(lower, upper) volume sandwich for the covering number of a convex body.

    lower = (1/eps)^n Vol(A)/Vol(B); upper = (3/eps)^n Vol(A)/Vol(B) with B the
    unit euclidean ball. The upper form needs eps B to fit inside A (checked by
    the Chebyshev inradius); when it does not, upper is None.
    """
    if epsilon <= 0:
        raise ParamOutOfRange("epsilon must be positive")
    n = poly.dim
    vol_a = volume_det(poly.boundary)
    vol_b = unit_ball_volume(n)
    lower = (1.0 / epsilon) ** n * vol_a / vol_b
    if inradius(poly) + 1e-12 < epsilon:
        return lower, None
    upper = (3.0 / epsilon) ** n * vol_a / vol_b
    return lower, upper


def middle_cover_form(poly: Polytope, epsilon: float) -> float:
    """Vol(A + (eps/2) B) / Vol((eps/2) B), the middle term of the sandwich."""
    from .minkowski import BodyApprox, minkowski_sum

    n = poly.dim
    ngon = _ball_polytope(n, epsilon / 2.0)
    body = BodyApprox.from_polytope(poly)
    summed = minkowski_sum(body, BodyApprox.convex_hull_of(ngon))
    return summed.volume() / unit_ball_volume(n, epsilon / 2.0)


def _ball_polytope(n: int, radius: float, segments: int = 64) -> np.ndarray:
    if n == 2:
        ang = 2 * np.pi * np.arange(segments) / segments
        return radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = np.random.default_rng(0xBA11)
    pts = rng.standard_normal((segments * 8, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return radius * pts


@dataclass(frozen=True)
class HullCoverCertificate:
    epsilon: float
    n_hull: int
    n_body: int
    ratio_R: float
    dim: int
    bound: float
    slack: float
    holds: bool


def check_hull_cover_ratio(T, epsilon: float, mode: str = "poly", R: float | None = None,
                           k_h: int = 8) -> HullCoverCertificate:
    """Certify N(T_h, eps) <= R * 3^n * N(T, eps) on deterministic samples.

    T may be a Polytope (sampled at eps/4 together with its hull) or a
    PointCloud (used as-is, hull sampled at eps/4). R defaults to the
    polyhedral volume ratio in poly mode, to the closed-form general bound
    in general mode, and to 1 for volume-degenerate inputs.
    """
    if epsilon <= 0:
        raise ParamOutOfRange("epsilon must be positive")
    if mode not in ("poly", "general"):
        raise ParamOutOfRange(f"unknown mode {mode!r}")
    h = epsilon / 4.0
    if isinstance(T, Polytope):
        body_pts, _ = sampling.sample_polytope(T, h=h)
        hull_source = T.vertices
        if R is None:
            if mode == "poly":
                R = volume_ratio_poly(T)
            else:
                from .minkowski import BodyApprox, empirical_general_ratio

                R = empirical_general_ratio(BodyApprox.from_polytope(T), k_h).bound
        dim = T.dim
    else:
        pts = _points_of(T)
        body_pts = pts
        hull_source = pts
        dim = pts.shape[1]
        if R is None:
            R = 1.0
    hull_pts, _ = sampling.sample_hull(hull_source, h=h)
    n_body = greedy_cover(body_pts, epsilon).n_greedy
    n_hull = greedy_cover(hull_pts, epsilon).n_greedy
    bound = R * 3.0**dim * n_body
    slack = bound - n_hull
    return HullCoverCertificate(
        epsilon=float(epsilon),
        n_hull=n_hull,
        n_body=n_body,
        ratio_R=float(R),
        dim=dim,
        bound=float(bound),
        slack=float(slack),
        holds=bool(slack >= 0.0),
    )
