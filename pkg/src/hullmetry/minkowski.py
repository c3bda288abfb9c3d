"""Minkowski sums, scaled averages A(k), convexification traces, reverse-BM checks.

Bodies come in three flavors: exact convex vertex sets, solid (possibly
nonconvex) polytopes rasterized to occupancy grids when summed, and finite
point sets handled by direct enumeration. All paths are deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DegenerateInput, DimensionMismatch, NonpositiveScale, ParamOutOfRange, TooLarge
from .geometry import (
    Polytope,
    min_enclosing_ball,
    quickhull,
    unit_ball_volume,
    volume_det,
    volume_ratio_poly,
    _as_points,
)
from . import sampling

POINTS_CAP = 250_000


@dataclass(frozen=True)
class GridBody:
    """Occupancy-grid body: cell (i,...) has center origin + (i + 1/2) h."""

    origin: np.ndarray
    h: float
    occ: np.ndarray

    @property
    def dim(self) -> int:
        return self.occ.ndim

    def cell_centers(self) -> np.ndarray:
        idx = np.argwhere(self.occ)
        return self.origin + (idx + 0.5) * self.h

    def volume(self) -> float:
        return float(self.occ.sum()) * self.h**self.dim


@dataclass(frozen=True)
class BodyApprox:
    """A compact body, carried exactly (convex / finite) or as a solid to rasterize."""

    kind: str  # "convex" | "solid" | "grid" | "points"
    dim: int
    vertices: np.ndarray | None = None  # convex: extreme points
    poly: Polytope | None = None  # solid
    grid: GridBody | None = None
    points: np.ndarray | None = None  # finite set
    axis_cells: int = sampling.DEFAULT_AXIS_CELLS

    @staticmethod
    def convex_hull_of(points, axis_cells: int | None = None) -> "BodyApprox":
        pts = _as_points(points)
        return BodyApprox(
            "convex", pts.shape[1], vertices=pts,
            axis_cells=axis_cells or sampling.DEFAULT_AXIS_CELLS,
        )

    @staticmethod
    def from_polytope(poly: Polytope, axis_cells: int | None = None) -> "BodyApprox":
        if volume_ratio_poly(poly) <= 1.0 + 1e-9:
            return BodyApprox(
                "convex", poly.dim, vertices=poly.vertices, poly=poly,
                axis_cells=axis_cells or sampling.DEFAULT_AXIS_CELLS,
            )
        return BodyApprox(
            "solid", poly.dim, poly=poly,
            axis_cells=axis_cells or sampling.DEFAULT_AXIS_CELLS,
        )

    @staticmethod
    def from_points(points) -> "BodyApprox":
        pts = _as_points(points)
        return BodyApprox("points", pts.shape[1], points=pts)

    @staticmethod
    def from_grid(grid: GridBody) -> "BodyApprox":
        return BodyApprox("grid", grid.dim, grid=grid)

    def volume(self) -> float:
        if self.kind == "points":
            return 0.0
        if self.kind == "grid":
            return self.grid.volume()
        if self.kind == "solid":
            return volume_det(self.poly.boundary)
        # convex: may be lower-dimensional
        _, _, rank = sampling.affine_basis(self.vertices)
        if rank < self.dim:
            return 0.0
        hull = self.poly if self.poly is not None else quickhull(self.vertices)
        return volume_det(hull.boundary)

    def hull_points(self) -> np.ndarray:
        if self.kind == "convex":
            return self.vertices
        if self.kind == "solid":
            return self.poly.vertices
        if self.kind == "points":
            return self.points
        return self.grid.cell_centers()

    def sample(self, h: float | None = None):
        """(points, spacing) sample of the body for distance computations."""
        if self.kind == "points":
            return self.points, 0.0
        if self.kind == "grid":
            return self.grid.cell_centers(), self.grid.h
        poly = self.poly if self.poly is not None else quickhull(self.vertices)
        return sampling.sample_polytope(poly, h=h, axis_cells=self.axis_cells)

    def natural_spacing(self) -> float:
        if self.kind == "grid":
            return self.grid.h
        pts = self.hull_points()
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return sampling.grid_spacing(lo, hi, self.axis_cells)


def _rasterize(body: BodyApprox, h: float) -> GridBody:
    if body.kind == "grid":
        if abs(body.grid.h - h) <= 1e-12 * h:
            return body.grid
        pts = body.grid.cell_centers()
        return _grid_from_points(pts, h, body.dim)
    if body.kind == "points":
        return _grid_from_points(body.points, h, body.dim)
    poly = body.poly if body.poly is not None else quickhull(body.vertices)
    lo = poly.vertices.min(axis=0)
    hi = poly.vertices.max(axis=0)
    shape = tuple(max(int(math.ceil((b - a) / h - 1e-9)), 1) for a, b in zip(lo, hi))
    axes = [lo[i] + (np.arange(shape[i]) + 0.5) * h for i in range(len(shape))]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=1)
    occ = sampling.membership(poly, centers).reshape(shape)
    return GridBody(lo, h, occ)


def _grid_from_points(pts: np.ndarray, h: float, dim: int) -> GridBody:
    lo = pts.min(axis=0)
    idx = np.floor((pts - lo) / h + 1e-12).astype(int)
    shape = tuple(idx.max(axis=0) + 1)
    occ = np.zeros(shape, dtype=bool)
    occ[tuple(idx.T)] = True
    return GridBody(lo, h, occ)


def _dilate(a: GridBody, b: GridBody) -> GridBody:
    if abs(a.h - b.h) > 1e-12 * max(a.h, b.h):
        raise ValueError("grid dilation requires equal spacings")
    conv = fftconvolve(a.occ.astype(float), b.occ.astype(float))
    occ = conv > 0.5
    origin = a.origin + b.origin + a.h / 2.0
    return GridBody(origin, a.h, occ)


def _dedupe_points(pts: np.ndarray) -> np.ndarray:
    snapped = np.round(pts, decimals=9)
    _, idx = np.unique(snapped, axis=0, return_index=True)
    return pts[np.sort(idx)]


def minkowski_sum(A: BodyApprox, B: BodyApprox) -> BodyApprox:
    """A plus B pointwise. Convex pairs stay exact; otherwise grid dilation."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")
    if A.kind == "convex" and B.kind == "convex":
        sums = (A.vertices[:, None, :] + B.vertices[None, :, :]).reshape(-1, A.dim)
        sums = _dedupe_points(sums)
        _, _, rank = sampling.affine_basis(sums)
        if rank == A.dim and len(sums) > A.dim + 1:
            sums = quickhull(sums).vertices
        return BodyApprox("convex", A.dim, vertices=sums, axis_cells=A.axis_cells)
    if A.kind == "points" and B.kind == "points":
        if len(A.points) * len(B.points) > POINTS_CAP:
            raise TooLarge("pairwise sum of point sets exceeds the cap")
        sums = (A.points[:, None, :] + B.points[None, :, :]).reshape(-1, A.dim)
        return BodyApprox.from_points(_dedupe_points(sums))
    h = max(A.natural_spacing(), B.natural_spacing())
    return BodyApprox.from_grid(_dilate(_rasterize(A, h), _rasterize(B, h)))


def scale_body(A: BodyApprox, s: float) -> BodyApprox:
    if s <= 0:
        raise NonpositiveScale(f"scale factor must be positive, got {s}")
    if A.kind == "convex":
        return BodyApprox("convex", A.dim, vertices=A.vertices * s, axis_cells=A.axis_cells)
    if A.kind == "points":
        return BodyApprox.from_points(A.points * s)
    if A.kind == "grid":
        g = A.grid
        return BodyApprox.from_grid(GridBody(g.origin * s, g.h * s, g.occ))
    poly = A.poly
    from .geometry import SimplicialBoundary

    scaled = Polytope(
        poly.vertices * s,
        SimplicialBoundary(poly.vertices * s, poly.boundary.simplices, poly.dim),
        poly.dim,
        facets=poly.facets,
    )
    return BodyApprox("solid", A.dim, poly=scaled, axis_cells=A.axis_cells)


def minkowski_average(A: BodyApprox, k: int) -> BodyApprox:
    """(1/k) times the k-fold Minkowski sum of A with itself."""
    if k < 1:
        raise ParamOutOfRange("k must be >= 1")
    if k == 1 or A.kind == "convex":
        return A
    acc = A
    for _ in range(k - 1):
        acc = minkowski_sum(acc, A)
    return scale_body(acc, 1.0 / k)


def _average_sequence(A: BodyApprox, k_max: int):
    """Yields (k, A(k)) reusing the running k-fold sum."""
    yield 1, A
    if A.kind == "convex":
        for k in range(2, k_max + 1):
            yield k, A
        return
    acc = A
    for k in range(2, k_max + 1):
        acc = minkowski_sum(acc, A)
        yield k, scale_body(acc, 1.0 / k)


def body_beta(A: BodyApprox) -> float:
    """Circumscribed-ball volume over body volume, from the minimum enclosing ball."""
    vol = A.volume()
    if vol <= 0:
        raise DegenerateInput("beta undefined for a volume-zero body")
    ball = min_enclosing_ball(A.hull_points())
    return unit_ball_volume(A.dim, ball.radius) / vol


@dataclass(frozen=True)
class ConvexificationTrace:
    k: int
    vol_Ak: float
    hausdorff_to_hull: float
    bound_value: float


def convexification_gap(A: BodyApprox, k_max: int, hausdorff_h: float | None = None):
    """Hausdorff gap of A(k) to the hull and the volume trace for k = 1..k_max.

    Distances are taken brute-force between samples decimated to a common
    comparison resolution, so the gaps of successive k are comparable.
    """
    if k_max < 1:
        raise ParamOutOfRange("k_max must be >= 1")
    hull_pts = A.hull_points()
    if A.kind == "points":
        fine = min(1.0 / (16.0 * k_max), 0.01) * max(
            1.0, float(np.linalg.norm(hull_pts.max(axis=0) - hull_pts.min(axis=0)))
        )
        hull_sample, _ = sampling.sample_hull(hull_pts, h=fine)
        h_cmp = 0.0
    else:
        h_cmp = hausdorff_h or A.natural_spacing()
        hull_sample, _ = sampling.sample_hull(hull_pts, h=h_cmp)

    vols, gaps, betas = [], [], []
    ball_vol = None
    if A.kind not in ("points",):
        # A(k) has the same convex hull as A, hence the same circumscribed ball
        ball = min_enclosing_ball(hull_pts)
        ball_vol = unit_ball_volume(A.dim, ball.radius)
    for k, Ak in _average_sequence(A, k_max):
        if A.kind == "points":
            pts = Ak.points
        else:
            pts, h_k = Ak.sample()
            if h_k and h_k < h_cmp:
                pts = _decimate(pts, h_cmp)
        vols.append(Ak.volume() if A.kind != "points" else 0.0)
        gaps.append(sampling.hausdorff_distance(pts, hull_sample))
        if ball_vol is not None:
            betas.append(ball_vol / max(vols[-1], 1e-300))

    c2 = max(measured_c2(vols, betas), 1.0) if betas else 1.0
    base_vol = vols[0] if vols else 0.0
    traces = []
    for i, k in enumerate(range(1, k_max + 1)):
        bound = volume_ratio_general_bound(k, c2) if k >= 2 else 1.0
        traces.append(ConvexificationTrace(k, vols[i], gaps[i], bound * base_vol))
    return traces


def _decimate(pts: np.ndarray, h: float) -> np.ndarray:
    lo = pts.min(axis=0)
    idx = np.floor((pts - lo) / h).astype(int)
    _, keep = np.unique(idx, axis=0, return_index=True)
    return lo + (idx[np.sort(keep)] + 0.5) * h


def measured_c2(vols: list[float], betas: list[float]) -> float:
    """Empirical C2 from a trace: max per-step C1 times the largest beta."""
    if not vols:
        return 1.0
    c1 = 0.0
    for k in range(2, len(vols) + 1):
        denom = (k - 1) / k * betas[k - 2] * vols[k - 2] + 1.0 / k * betas[0] * vols[0]
        if denom > 0:
            c1 = max(c1, vols[k - 1] / denom)
    if c1 == 0.0:
        c1 = 1.0 / max(betas[0], 1.0)
    return c1 * max(betas)


@dataclass(frozen=True)
class RevBMReport:
    lhs_vol: float
    rhs_terms: tuple[float, float]
    empirical_C1: float
    s: float
    t: float
    m: int
    beta_A: float
    beta_B: float


def check_reverse_bm(A: BodyApprox, B: BodyApprox, s: float, t: float, m: int) -> RevBMReport:
    """Empirical constant for the circumscribed-ball reverse Brunn-Minkowski form.

    Linear positioning maps are fixed to the identity; the harness keeps the
    running maximum of the reported constant across a scenario suite.
    """
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")
    if s <= 0 or t <= 0 or m < 1:
        raise ParamOutOfRange("need s, t > 0 and m >= 1")
    vol_A, vol_B = A.volume(), B.volume()
    if vol_A <= 0 or vol_B <= 0:
        raise DegenerateInput("reverse-BM check needs bodies with interior")
    beta_A, beta_B = body_beta(A), body_beta(B)
    lhs_vol = minkowski_sum(scale_body(A, s), scale_body(B, t)).volume()
    term_a = s * (beta_A * vol_A) ** (1.0 / m)
    term_b = t * (beta_B * vol_B) ** (1.0 / m)
    c1 = lhs_vol ** (1.0 / m) / (term_a + term_b)
    return RevBMReport(lhs_vol, (term_a, term_b), c1, s, t, m, beta_A, beta_B)


def volume_ratio_general_bound(k_h: int, C2: float) -> float:
    """Closed-form upper bound on Vol(A(k_h))/Vol(A) driven by the constant C2.

    The C2 = 1 pole is removable; the limit value is returned there.
    """
    if k_h < 2:
        raise ParamOutOfRange("k_h must be >= 2")
    if C2 < 1.0:
        raise ParamOutOfRange("C2 must be >= 1")
    if abs(C2 - 1.0) <= 1e-12:
        return (2.0 + (k_h - 2.0)) / k_h
    return 2.0 * C2 ** (k_h - 1) / k_h + C2 * (C2 ** (k_h - 2) - 1.0) / (k_h * (C2 - 1.0))


@dataclass(frozen=True)
class GeneralRatioReport:
    ratio: float
    k_h: int
    c2_hat: float
    bound: float
    holds: bool


def empirical_general_ratio(A: BodyApprox, k_h: int) -> GeneralRatioReport:
    """Vol(hull(A))/Vol(A) checked against the closed-form bound at measured C2."""
    if k_h < 1:
        raise ParamOutOfRange("k_h must be >= 1")
    vol_A = A.volume()
    if vol_A <= 0:
        raise DegenerateInput("volume ratio needs a body with interior")
    hull = quickhull(A.hull_points())
    ratio = volume_det(hull.boundary) / vol_A

    ball = min_enclosing_ball(A.hull_points())
    ball_vol = unit_ball_volume(A.dim, ball.radius)
    vols, betas = [], []
    for _, Ak in _average_sequence(A, max(k_h, 2)):
        v = Ak.volume()
        vols.append(v)
        betas.append(ball_vol / max(v, 1e-300))
    c2 = max(measured_c2(vols, betas), 1.0)
    bound = volume_ratio_general_bound(max(k_h, 2), c2)
    # grid volumes carry sampling error; allow it in the certification margin
    slack_tol = 1e-9 if A.kind == "convex" else 0.05
    return GeneralRatioReport(ratio, k_h, c2, bound, ratio <= bound * (1 + slack_tol))
