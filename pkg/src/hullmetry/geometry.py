"""Oriented polytopes, Quickhull, boundary-determinant volumes, and enclosing balls.

A polytope is carried as a vertex array plus a closed, outward-oriented
simplicial boundary. Both boundary volume formulas (the signed-determinant
sum and the projected-coordinate sum) are implemented independently so they
can cross-check each other.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateInput, NonOrientable, Unsupported

# Geometric predicate tolerance, absolute on diameter-1 rescaled inputs.
TAU_GEOM = 1e-9
# Relative tolerance for volume comparisons.
TAU_VOL = 1e-9

MAX_HULL_DIM = 8


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("expected a 2-d array of point coordinates")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return pts


def _scale_of(pts: np.ndarray) -> float:
    """Bounding-box diagonal, used to turn the normalized tolerance absolute."""
    if len(pts) == 0:
        return 1.0
    span = pts.max(axis=0) - pts.min(axis=0)
    return float(max(np.linalg.norm(span), 1.0))


@dataclass(frozen=True)
class PointCloud:
    """Finite point set with a metric; the desk-scale stand-in for a space T."""

    points: np.ndarray
    metric: str = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))
        if len(self.points) == 0:
            raise ValueError("point cloud must be non-empty")
        if self.metric != "euclidean":
            raise Unsupported(f"metric {self.metric!r} not implemented")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    def diameter(self) -> float:
        return float(np.max(pairwise_distances(self.points))) if len(self) > 1 else 0.0


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


@dataclass(frozen=True)
class SimplicialBoundary:
    """Closed outward-oriented set of (n-1)-simplices bounding a polytope.

    ``simplices[f]`` holds the n ordered vertex indices of one oriented
    simplex; coordinates live in ``points``.
    """

    points: np.ndarray
    simplices: np.ndarray
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))
        object.__setattr__(self, "simplices", np.asarray(self.simplices, dtype=int))

    @property
    def n_simplices(self) -> int:
        return len(self.simplices)

    def simplex_coords(self) -> np.ndarray:
        """(F, n, n) array: coordinates of each simplex's vertices as rows."""
        return self.points[self.simplices]


@dataclass(frozen=True)
class Polytope:
    """Vertex list plus oriented simplicial boundary in dimension n."""

    vertices: np.ndarray
    boundary: SimplicialBoundary
    dim: int
    facets: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", _as_points(self.vertices))

    def volume(self) -> float:
        return volume_det(self.boundary)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    support: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        d = np.linalg.norm(np.atleast_2d(points) - self.center, axis=1)
        return d <= self.radius + tol


def unit_ball_volume(n: int, radius: float = 1.0) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * radius**n


# ---------------------------------------------------------------------------
# Quickhull
# ---------------------------------------------------------------------------


def _facet_normal(pts: np.ndarray, verts: tuple, interior: np.ndarray):
    """Unit normal of the hyperplane through ``verts`` pointing away from ``interior``."""
    base = pts[verts[0]]
    rows = pts[list(verts[1:])] - base
    # generalized cross product via cofactor expansion
    d = pts.shape[1]
    normal = np.empty(d)
    for i in range(d):
        minor = np.delete(rows, i, axis=1)
        normal[i] = (-1) ** i * np.linalg.det(minor)
    norm = np.linalg.norm(normal)
    if norm == 0.0:
        return None, 0.0
    normal /= norm
    offset = float(normal @ base)
    if normal @ interior > offset:
        normal = -normal
        offset = -offset
    return normal, offset


class _Facet:
    __slots__ = ("verts", "normal", "offset", "outside", "alive")

    def __init__(self, verts, normal, offset):
        self.verts = verts
        self.normal = normal
        self.offset = offset
        self.outside: list[int] = []
        self.alive = True


def _initial_simplex(pts: np.ndarray, tau: float) -> list[int]:
    n = pts.shape[1]
    chosen = [int(np.argmin(pts[:, 0]))]
    # farthest point from the growing affine subspace, ties by lowest index
    basis = np.zeros((0, n))
    origin = pts[chosen[0]]
    for _ in range(n):
        rel = pts - origin
        if len(basis):
            rel = rel - rel @ basis.T @ basis
        dist = np.linalg.norm(rel, axis=1)
        far = int(np.argmax(dist))
        if dist[far] <= tau:
            raise DegenerateInput("points are affinely dependent; hull has empty interior")
        chosen.append(far)
        vec = rel[far] / dist[far]
        basis = np.vstack([basis, vec])
    return chosen


def quickhull(cloud: PointCloud | np.ndarray) -> Polytope:
    """Convex hull with consistently oriented simplicial boundary.

    Points within the predicate tolerance of a facet hyperplane count as on
    it; ties in farthest-point selection break toward the lowest index, so
    the construction is deterministic.
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else _as_points(cloud)
    n = pts.shape[1]
    if n < 2:
        raise Unsupported("hull computation needs ambient dimension >= 2")
    if n > MAX_HULL_DIM:
        raise Unsupported(f"hull computation capped at dimension {MAX_HULL_DIM}")
    if len(pts) < n + 1:
        raise DegenerateInput("need at least n+1 points in R^n")
    tau = TAU_GEOM * _scale_of(pts)

    init = _initial_simplex(pts, tau)
    interior = pts[init].mean(axis=0)

    facets: list[_Facet] = []
    for omit in range(n + 1):
        verts = tuple(init[i] for i in range(n + 1) if i != omit)
        normal, offset = _facet_normal(pts, verts, interior)
        if normal is None:
            raise DegenerateInput("initial simplex facet is degenerate")
        facets.append(_Facet(verts, normal, offset))

    in_simplex = set(init)
    for idx in range(len(pts)):
        if idx in in_simplex:
            continue
        for f in facets:
            if f.normal @ pts[idx] - f.offset > tau:
                f.outside.append(idx)
                break

    cursor = 0
    while True:
        # first live facet (by creation order) with outside points
        pick = None
        for fid in range(cursor, len(facets)):
            f = facets[fid]
            if f.alive and f.outside:
                pick = fid
                break
            if f.alive and not f.outside and fid == cursor:
                cursor += 1
        if pick is None:
            break
        f = facets[pick]
        dists = np.array([f.normal @ pts[i] - f.offset for i in f.outside])
        far_pos = int(np.argmax(dists))
        apex = f.outside[far_pos]

        # ridge adjacency over live facets
        ridge_map: dict[tuple, list[int]] = {}
        for fid, g in enumerate(facets):
            if not g.alive:
                continue
            for omit in range(n):
                ridge = tuple(sorted(g.verts[:omit] + g.verts[omit + 1 :]))
                ridge_map.setdefault(ridge, []).append(fid)

        apex_pt = pts[apex]
        visible = {pick}
        stack = [pick]
        while stack:
            fid = stack.pop()
            g = facets[fid]
            for omit in range(n):
                ridge = tuple(sorted(g.verts[:omit] + g.verts[omit + 1 :]))
                for nb in ridge_map[ridge]:
                    if nb in visible:
                        continue
                    h = facets[nb]
                    if h.normal @ apex_pt - h.offset > tau:
                        visible.add(nb)
                        stack.append(nb)

        horizon = []
        for ridge, members in ridge_map.items():
            vis = [m for m in members if m in visible]
            if len(vis) == 1 and len(members) == 2:
                horizon.append(ridge)
        horizon.sort()

        orphan: list[int] = []
        for fid in visible:
            orphan.extend(facets[fid].outside)
            facets[fid].alive = False
            facets[fid].outside = []
        orphan = sorted(set(orphan) - {apex})

        new_ids = []
        for ridge in horizon:
            verts = tuple(ridge) + (apex,)
            normal, offset = _facet_normal(pts, verts, interior)
            if normal is None:
                continue
            facets.append(_Facet(verts, normal, offset))
            new_ids.append(len(facets) - 1)

        for idx in orphan:
            for fid in new_ids:
                g = facets[fid]
                if g.normal @ pts[idx] - g.offset > tau:
                    g.outside.append(idx)
                    break

    live = [f for f in facets if f.alive]
    hull_idx = sorted({v for f in live for v in f.verts})
    remap = {old: new for new, old in enumerate(hull_idx)}
    vertices = pts[hull_idx]
    centroid = vertices.mean(axis=0)
    simplices = []
    for f in live:
        simp = [remap[v] for v in f.verts]
        coords = vertices[simp]
        if np.linalg.det(coords - centroid) < 0:
            simp[0], simp[1] = simp[1], simp[0]
        simplices.append(simp)
    simplices_arr = np.array(sorted(simplices), dtype=int)
    boundary = SimplicialBoundary(vertices, simplices_arr, n)
    facet_tuples = tuple(tuple(s) for s in simplices_arr.tolist())
    return Polytope(vertices, boundary, n, facets=facet_tuples)


def hull_contains(poly: Polytope, points: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Membership in a convex hull via its facet halfspaces."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if tol is None:
        tol = TAU_GEOM * _scale_of(poly.vertices)
    inside = np.ones(len(pts), dtype=bool)
    for simp in poly.boundary.simplices:
        base = poly.vertices[simp[0]]
        rows = poly.vertices[simp[1:]] - base
        n = poly.dim
        normal = np.empty(n)
        for i in range(n):
            normal[i] = (-1) ** i * np.linalg.det(np.delete(rows, i, axis=1))
        nn = np.linalg.norm(normal)
        if nn == 0:
            continue
        normal /= nn
        centroid = poly.vertices.mean(axis=0)
        if normal @ centroid > normal @ base:
            normal = -normal
        inside &= pts @ normal - normal @ base <= tol
    return inside


# ---------------------------------------------------------------------------
# Boundary triangulation of vertex+facet input
# ---------------------------------------------------------------------------


def _perm_parity(seq) -> int:
    seq = list(seq)
    parity = 1
    order = sorted(range(len(seq)), key=lambda i: seq[i])
    seen = [False] * len(seq)
    for i in range(len(seq)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def _ridge_signature(simplex) -> list[tuple[tuple, int]]:
    """(sorted ridge, induced orientation sign) for each (n-2)-face."""
    out = []
    for omit in range(len(simplex)):
        ridge = simplex[:omit] + simplex[omit + 1 :]
        sign = (-1) ** omit * _perm_parity(ridge)
        out.append((tuple(sorted(ridge)), sign))
    return out


def triangulate_facets(vertices, facets, dim: int) -> SimplicialBoundary:
    """Fan-triangulate facet polygons into a closed outward-oriented boundary.

    Each facet is fanned from its lowest-index vertex. Facets may come with
    arbitrary orientations; they are made globally consistent by propagation
    and flipped outward so the enclosed volume is positive.
    """
    pts = _as_points(vertices)
    n = pts.shape[1]
    if n != dim:
        raise ValueError("vertex dimension disagrees with declared dim")
    tris: list[list[int]] = []
    for facet in facets:
        facet = list(facet)
        if len(facet) < n:
            raise ValueError("facet has too few vertices")
        if len(facet) == n:
            tris.append(facet)
            continue
        if n != 3:
            raise Unsupported("polygonal facets only supported in dimension 3")
        k = facet.index(min(facet))
        cyc = facet[k:] + facet[:k]
        for j in range(1, len(cyc) - 1):
            tris.append([cyc[0], cyc[j], cyc[j + 1]])

    # orient consistently by BFS over shared ridges
    ridge_owners: dict[tuple, list[tuple[int, int]]] = {}
    for t_idx, tri in enumerate(tris):
        for ridge, sign in _ridge_signature(tri):
            ridge_owners.setdefault(ridge, []).append((t_idx, sign))
    for ridge, owners in ridge_owners.items():
        if len(owners) != 2:
            raise NonOrientable(f"boundary not closed: ridge {ridge} in {len(owners)} simplices")

    flip = [None] * len(tris)
    for start in range(len(tris)):
        if flip[start] is not None:
            continue
        flip[start] = False
        stack = [start]
        while stack:
            t_idx = stack.pop()
            for ridge, sign in _ridge_signature(tris[t_idx]):
                eff = -sign if flip[t_idx] else sign
                for other, osign in ridge_owners[ridge]:
                    if other == t_idx:
                        continue
                    want_flip = osign == eff  # opposite induced orientations required
                    if flip[other] is None:
                        flip[other] = want_flip
                        stack.append(other)
                    elif flip[other] != want_flip:
                        raise NonOrientable("facet orientations cannot be made consistent")

    oriented = []
    for t_idx, tri in enumerate(tris):
        tri = list(tri)
        if flip[t_idx]:
            tri[0], tri[1] = tri[1], tri[0]
        oriented.append(tri)

    boundary = SimplicialBoundary(pts, np.array(oriented, dtype=int), n)
    vol = _signed_volume(boundary)
    scale = _scale_of(pts)
    if abs(vol) <= TAU_GEOM * scale**n:
        raise DegenerateInput("boundary encloses no volume")
    if vol < 0:
        flipped = boundary.simplices.copy()
        flipped[:, [0, 1]] = flipped[:, [1, 0]]
        boundary = SimplicialBoundary(pts, flipped, n)
    return boundary


def triangulate_boundary(poly: Polytope) -> SimplicialBoundary:
    """Oriented simplices fanning each facet of ``poly``."""
    if poly.facets:
        return triangulate_facets(poly.vertices, poly.facets, poly.dim)
    return poly.boundary


def polytope_from_facets(vertices, facets, dim: int | None = None) -> Polytope:
    pts = _as_points(vertices)
    if dim is None:
        dim = pts.shape[1]
    boundary = triangulate_facets(pts, facets, dim)
    return Polytope(pts, boundary, dim, facets=tuple(tuple(f) for f in facets))


# ---------------------------------------------------------------------------
# Volume formulas
# ---------------------------------------------------------------------------


def _signed_volume(boundary: SimplicialBoundary) -> float:
    coords = boundary.simplex_coords()
    n = boundary.dim
    dets = np.linalg.det(np.swapaxes(coords, 1, 2))
    return float(dets.sum() / math.factorial(n))


def volume_det(boundary: SimplicialBoundary) -> float:
    """Sum over boundary simplices of det(v_1,...,v_n)/n! (vertices as columns)."""
    return _signed_volume(boundary)


def volume_projected(boundary: SimplicialBoundary) -> float:
    """Second boundary formula: project out the last coordinate, weight by its mean.

    Sign factor (-1)^(n-1); agrees with :func:`volume_det` on every closed
    outward-oriented boundary, which the tests assert.
    """
    coords = boundary.simplex_coords()  # (F, n, n)
    n = boundary.dim
    mean_last = coords[:, :, -1].mean(axis=1)
    mats = np.empty((len(coords), n, n))
    mats[:, 0, :] = 1.0
    mats[:, 1:, :] = np.swapaxes(coords[:, :, :-1], 1, 2)
    dets = np.linalg.det(mats)
    total = float((mean_last * dets).sum() / math.factorial(n - 1))
    return (-1) ** (n - 1) * total


# ---------------------------------------------------------------------------
# Minimum enclosing ball
# ---------------------------------------------------------------------------

_WELZL_DIM_CAP = 10


def _circumball(support: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Smallest ball with every support point on its sphere."""
    k = len(support)
    p0 = support[0]
    if k == 1:
        return p0.copy(), 0.0
    Q = np.array([p - p0 for p in support[1:]])
    gram = 2.0 * Q @ Q.T
    rhs = np.einsum("ij,ij->i", Q, Q)
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = p0 + lam @ Q
    radius = float(max(np.linalg.norm(p - center) for p in support))
    return center, radius


def _welzl(points: np.ndarray, order: list[int], tau: float) -> tuple[np.ndarray, float, list[int]]:
    dim = points.shape[1]

    def solve(active: list[int], boundary: list[int]):
        if len(boundary) == dim + 1 or not active:
            if not boundary:
                return None, -1.0, []
            c, r = _circumball([points[i] for i in boundary])
            return c, r, list(boundary)
        c, r, sup = solve([], boundary)
        for pos, idx in enumerate(active):
            if c is None or np.linalg.norm(points[idx] - c) > r + tau:
                c, r, sup = solve(active[:pos], boundary + [idx])
        return c, r, sup

    return solve(order, [])


def _badoiu_clarkson(points: np.ndarray, iterations: int = 2000) -> tuple[np.ndarray, float]:
    center = points.mean(axis=0)
    for t in range(iterations):
        d = np.linalg.norm(points - center, axis=1)
        far = int(np.argmax(d))
        center = center + (points[far] - center) / (t + 2)
    radius = float(np.max(np.linalg.norm(points - center, axis=1)))
    return center, radius


def min_enclosing_ball(cloud: PointCloud | np.ndarray) -> Ball:
    """Smallest ball containing all points.

    Exact Welzl recursion up to dimension 10; beyond that an iterative
    refinement whose reported radius always covers every point.
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else _as_points(cloud)
    tau = TAU_GEOM * _scale_of(pts)
    uniq, first_idx = np.unique(pts, axis=0, return_index=True)
    uniq = pts[np.sort(first_idx)]
    if len(uniq) == 1:
        return Ball(uniq[0], 0.0, support=uniq[:1])
    if pts.shape[1] > _WELZL_DIM_CAP:
        center, radius = _badoiu_clarkson(uniq)
        return Ball(center, radius, support=None)
    rng = np.random.default_rng(0x5EED)
    order = list(rng.permutation(len(uniq)))
    center, radius, sup = _welzl(uniq, order, tau)
    # report the radius that certifiably covers everything
    radius = max(radius, float(np.max(np.linalg.norm(pts - center, axis=1))))
    return Ball(center, radius, support=uniq[sup])


# ---------------------------------------------------------------------------
# Ratios
# ---------------------------------------------------------------------------


def beta_ratio(poly: Polytope) -> float:
    """Volume of the circumscribed (minimum enclosing) ball over the body volume."""
    vol = volume_det(poly.boundary)
    if vol <= 0:
        raise DegenerateInput("polytope volume is zero")
    ball = min_enclosing_ball(poly.vertices)
    return unit_ball_volume(poly.dim, ball.radius) / vol


def volume_ratio_poly(poly: Polytope) -> float:
    """Vol(hull of vertices) / Vol(body); 1 exactly when the body is convex."""
    vol = volume_det(poly.boundary)
    if vol <= 0:
        raise DegenerateInput("polytope volume is zero")
    hull = quickhull(poly.vertices)
    return volume_det(hull.boundary) / vol


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def load_body(source) -> Polytope:
    """Polytope from {"dim": n, "vertices": [[...]], "facets": [[i,...],...]}."""
    doc = _load_doc(source)
    dim = int(doc["dim"])
    vertices = np.asarray(doc["vertices"], dtype=float)
    facets = doc.get("facets")
    if facets:
        return polytope_from_facets(vertices, facets, dim)
    return quickhull(vertices)


def load_cloud(source) -> PointCloud:
    """PointCloud from {"dim": n, "points": [[...]]}."""
    doc = _load_doc(source)
    pts = np.asarray(doc["points"], dtype=float)
    if pts.shape[1] != int(doc["dim"]):
        raise ValueError("declared dim disagrees with point coordinates")
    return PointCloud(pts, metric=doc.get("metric", "euclidean"))


def _load_doc(source):
    if isinstance(source, dict):
        return source
    text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
    return json.loads(text)
