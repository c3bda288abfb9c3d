"""Independent oracles used to freeze expected values.

Everything here is deliberately written from scratch with brute-force
methods, so it shares no code path with the package under test.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np


def shoelace(vertices) -> float:
    """Signed-area magnitude of a simple polygon given in boundary order."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return abs(float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))) / 2.0


def polygon_contains(vertices, point, tol=1e-12) -> bool:
    """Even-odd point-in-polygon test with boundary points counted inside."""
    v = np.asarray(vertices, dtype=float)
    x, y = float(point[0]), float(point[1])
    n = len(v)
    inside = False
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        # on-segment check
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cross) <= tol * max(1.0, abs(x2 - x1) + abs(y2 - y1)):
            if min(x1, x2) - tol <= x <= max(x1, x2) + tol and min(y1, y2) - tol <= y <= max(y1, y2) + tol:
                return True
        if (y1 > y) != (y2 > y):
            x_int = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x_int > x:
                inside = not inside
    return inside


def extreme_points(points) -> list[int]:
    """Indices of points that are not convex combinations of the others.

    A point is interior iff it lies in the hull of some (n+1)-subset of the
    rest (Caratheodory); solved per subset by a least-squares feasibility
    check. Exhaustive, so keep inputs tiny.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[1]
    out = []
    for i in range(len(pts)):
        others = [j for j in range(len(pts)) if j != i]
        inside = False
        for subset in combinations(others, min(n + 1, len(others))):
            if _in_simplex(pts[i], pts[list(subset)]):
                inside = True
                break
        if not inside:
            out.append(i)
    return out


def _in_simplex(p, verts) -> bool:
    k = len(verts)
    A = np.vstack([verts.T, np.ones(k)])
    b = np.append(p, 1.0)
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ coef - b) > 1e-9:
        return False
    return bool(np.all(coef >= -1e-9))


def exhaustive_set_cover(points, epsilon) -> int:
    """Smallest number of closed eps-balls centered at points covering them.

    Pure subset enumeration by increasing size; exponential, for tiny inputs.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    covers = []
    for i in range(n):
        covers.append({j for j in range(n) if np.linalg.norm(pts[i] - pts[j]) <= epsilon})
    everything = set(range(n))
    for size in range(1, n + 1):
        for combo in combinations(range(n), size):
            union = set()
            for i in combo:
                union |= covers[i]
            if union == everything:
                return size
    return n


def all_partitions(items):
    """Every partition of a list, as a list of tuples."""
    items = list(items)
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(head,) + part[i]] + part[i + 1 :]
        yield [(head,)] + part


def gamma_by_enumeration(points, alpha) -> float:
    """Chaining functional by direct enumeration of admissible chains (n <= 5).

    Enumerates P1 (at most 4 cells) and P2 refining P1 (at most 16 cells,
    which for n <= 5 is no constraint), finishing with singletons; the
    infimum over admissible sequences is attained on such chains.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    assert n <= 5

    def diam(cell):
        if len(cell) < 2:
            return 0.0
        return max(
            float(np.linalg.norm(pts[a] - pts[b])) for a in cell for b in cell if a < b
        )

    def refinements(partition):
        options = [list(all_partitions(list(cell))) for cell in partition]

        def rec(i, acc):
            if i == len(options):
                yield acc
                return
            for opt in options[i]:
                yield from rec(i + 1, acc + opt)

        yield from rec(0, [])

    best = math.inf
    root = [tuple(range(n))]
    w1 = 2 ** (1 / alpha)
    w2 = 2 ** (2 / alpha)
    for p1 in all_partitions(list(range(n))):
        if len(p1) > 4:
            continue
        for p2 in refinements(p1):
            # cardinality limit 16 at level 2 never binds for n <= 5, and level 3
            # (limit 256) finishes with singletons contributing nothing
            value = 0.0
            for t in range(n):
                c1 = next(c for c in p1 if t in c)
                c2 = next(c for c in p2 if t in c)
                total = diam(tuple(range(n))) + w1 * diam(c1) + w2 * diam(c2)
                value = max(value, total)
            best = min(best, value)
    return best


def antiderivative_log_squared(x) -> float:
    """Antiderivative of (ln t)^2 evaluated at x > 0: x (ln^2 x - 2 ln x + 2)."""
    lx = math.log(x)
    return x * (lx * lx - 2 * lx + 2)


def halfnormal_mean() -> float:
    return math.sqrt(2.0 / math.pi)


def max_two_gaussians_mean() -> float:
    return 1.0 / math.sqrt(math.pi)


def positive_part_gaussian_mean() -> float:
    return 1.0 / math.sqrt(2.0 * math.pi)
