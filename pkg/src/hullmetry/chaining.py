"""Chaining functionals over admissible partition sequences, entropy integrals,
Monte Carlo Gaussian suprema, and the hull-comparison certificates.

An admissible sequence is a chain of refining partitions with partition m
holding at most N_m cells, N_0 = 1 and N_m = 2^(2^m) for m >= 1. The
functional is inf over sequences of sup_t sum_m 2^(m/alpha) diam(cell_m(t)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParamOutOfRange, TooLarge
from .geometry import PointCloud, _as_points
from .covering import greedy_cover
from . import sampling

EXACT_CAP = 5
GREEDY_CAP = 4096


def cardinality_limit(m: int) -> int:
    return 1 if m == 0 else 2 ** (2**m)


@dataclass(frozen=True)
class AdmissibleSequence:
    """Chain of refining partitions, each stored as a tuple of index tuples."""

    partitions: tuple

    def validate(self, n_points: int) -> bool:
        prev = None
        for m, part in enumerate(self.partitions):
            cells = [frozenset(c) for c in part]
            if len(cells) > cardinality_limit(m):
                return False
            covered = set().union(*cells) if cells else set()
            if covered != set(range(n_points)):
                return False
            if sum(len(c) for c in cells) != n_points:
                return False
            if prev is not None:
                for cell in cells:
                    if not any(cell <= p for p in prev):
                        return False
            prev = cells
        return True


@dataclass(frozen=True)
class GammaEstimate:
    alpha: float
    value: float
    method: str  # "exact" | "greedy" | "entropy_integral"
    witness: AdmissibleSequence | None = None


@dataclass(frozen=True)
class SupEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int


def _points_of(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    return _as_points(cloud)


def _diam(pts: np.ndarray, idx) -> float:
    sub = pts[list(idx)]
    if len(sub) < 2:
        return 0.0
    d = np.linalg.norm(sub[:, None, :] - sub[None, :, :], axis=-1)
    return float(d.max())


def _set_partitions(items: list):
    """All partitions of items, each a list of tuples; deterministic order."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1 :]
        yield [(first,)] + part


def _refinements(partition: list, max_cells: int):
    """Strict refinements of a partition with at most max_cells cells."""
    per_cell = [list(_set_partitions(list(cell))) for cell in partition]

    def rec(i, acc):
        if len(acc) > max_cells:
            return
        if i == len(per_cell):
            if len(acc) > len(partition):
                yield [tuple(sorted(c)) for c in acc]
            return
        for opt in per_cell[i]:
            yield from rec(i + 1, acc + opt)

    yield from rec(0, [])


def gamma_exact_small(cloud, alpha: float) -> GammaEstimate:
    """Exact infimum over admissible sequences, by exhaustion; capped at 5 points.

    Only chains of strict refinements are enumerated: keeping a partition
    unchanged for one level is always dominated by refining it, so the
    restriction loses nothing.
    """
    pts = _points_of(cloud)
    n = len(pts)
    if n > EXACT_CAP:
        raise TooLarge(f"exact search capped at {EXACT_CAP} points, got {n}")
    if alpha <= 0:
        raise ParamOutOfRange("alpha must be positive")
    if n == 1:
        seq = AdmissibleSequence((((0,),),))
        return GammaEstimate(alpha, 0.0, "exact", seq)

    root = [tuple(range(n))]
    best_value = math.inf
    best_chain = None

    def chain_value(chain) -> float:
        worst = 0.0
        for t in range(n):
            total = 0.0
            for m, part in enumerate(chain):
                cell = next(c for c in part if t in c)
                total += 2 ** (m / alpha) * _diam(pts, cell)
            worst = max(worst, total)
        return worst

    def extend(chain):
        nonlocal best_value, best_chain
        last = chain[-1]
        if all(len(c) == 1 for c in last):
            value = chain_value(chain)
            if value < best_value:
                best_value = value
                best_chain = chain
            return
        m = len(chain)
        for ref in _refinements(last, cardinality_limit(m)):
            extend(chain + [ref])

    extend([root])
    witness = AdmissibleSequence(tuple(tuple(p) for p in best_chain))
    return GammaEstimate(alpha, best_value, "exact", witness)


def gamma_greedy(cloud, alpha: float) -> GammaEstimate:
    """Upper bound on the chaining functional from farthest-point hierarchical splits.

    At each level the largest-diameter cell splits at its two farthest points
    until the level's cardinality budget is filled; all ties break toward the
    lowest index, so the bound is deterministic.
    """
    pts = _points_of(cloud)
    n = len(pts)
    if n > GREEDY_CAP:
        raise TooLarge(f"greedy construction capped at {GREEDY_CAP} points, got {n}")
    if alpha <= 0:
        raise ParamOutOfRange("alpha must be positive")

    cells = [np.arange(n)]
    diams = [_cell_diam(pts, cells[0])]
    totals = np.zeros(n)
    partitions = [tuple((tuple(cells[0].tolist()),))]
    m = 0
    while True:
        for ci, cell in enumerate(cells):
            if diams[ci][0] > 0:
                totals[cell] += 2 ** (m / alpha) * diams[ci][0]
        if all(d[0] <= 0.0 for d in diams):
            break
        m += 1
        budget = cardinality_limit(m)
        while len(cells) < budget:
            pick = _widest_cell(cells, diams)
            if pick < 0:
                break
            cell = cells[pick]
            _, ia, ib = diams[pick]
            a, b = pts[cell[ia]], pts[cell[ib]]
            da = np.linalg.norm(pts[cell] - a, axis=1)
            db = np.linalg.norm(pts[cell] - b, axis=1)
            mask = da <= db
            left, right = cell[mask], cell[~mask]
            cells[pick] = left
            diams[pick] = _cell_diam(pts, left)
            cells.append(right)
            diams.append(_cell_diam(pts, right))
        order = sorted(range(len(cells)), key=lambda ci: int(cells[ci].min()))
        cells = [cells[ci] for ci in order]
        diams = [diams[ci] for ci in order]
        partitions.append(tuple(tuple(sorted(c.tolist())) for c in cells))

    witness = AdmissibleSequence(tuple(partitions))
    return GammaEstimate(alpha, float(totals.max()), "greedy", witness)


def _widest_cell(cells, diams) -> int:
    """Index of the largest-diameter splittable cell; ties go to the lowest min index."""
    pick = -1
    for ci in range(len(cells)):
        d = diams[ci][0]
        if d <= 0.0:
            continue
        if pick < 0 or d > diams[pick][0] + 1e-15:
            pick = ci
        elif abs(d - diams[pick][0]) <= 1e-15 and cells[ci].min() < cells[pick].min():
            pick = ci
    return pick


def _cell_diam(pts: np.ndarray, cell: np.ndarray):
    """(diameter, argmax_i, argmax_j) within a cell; row-major first maximum."""
    k = len(cell)
    if k < 2:
        return (0.0, 0, 0)
    sub = pts[cell]
    best = (0.0, 0, 0)
    chunk = 512
    for start in range(0, k, chunk):
        block = sub[start : start + chunk]
        d = np.linalg.norm(block[:, None, :] - sub[None, :, :], axis=-1)
        flat = int(np.argmax(d))
        i, j = divmod(flat, k)
        val = float(d[i, j])
        if val > best[0]:
            best = (val, start + i, j)
    return best


def entropy_integral(cloud, alpha: float) -> GammaEstimate:
    """Upper Riemann sum of (log N(cloud, eps))^(1/alpha) on a geometric grid.

    Grid ratio 2^(-1/4) from the diameter down to the smallest interpoint
    gap; natural logarithms; the constant tail below the smallest gap is
    added in closed form. N = 1 contributes nothing.
    """
    pts = np.unique(_points_of(cloud), axis=0)
    if alpha <= 0:
        raise ParamOutOfRange("alpha must be positive")
    n = len(pts)
    if n == 1:
        return GammaEstimate(alpha, 0.0, "entropy_integral")
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    diam = float(d.max())
    off = d[np.triu_indices(n, k=1)]
    positive = off[off > 0]
    if diam <= 0 or len(positive) == 0:
        return GammaEstimate(alpha, 0.0, "entropy_integral")
    min_gap = float(positive.min())

    ratio = 2 ** (-0.25)
    grid = [diam]
    while grid[-1] * ratio > min_gap * (1 + 1e-12):
        grid.append(grid[-1] * ratio)
    if grid[-1] > min_gap * (1 + 1e-12):
        grid.append(min_gap)

    def f(eps: float) -> float:
        cover = greedy_cover(pts, eps).n_greedy
        return math.log(cover) ** (1.0 / alpha) if cover > 1 else 0.0

    total = 0.0
    for hi, lo in zip(grid, grid[1:]):
        total += (hi - lo) * f(lo)
    # below the smallest gap every point needs its own ball
    total += grid[-1] * math.log(n) ** (1.0 / alpha)
    return GammaEstimate(alpha, total, "entropy_integral")


MC_CHUNK = 4096


def gaussian_sup_mc(cloud, trials: int, seed: int) -> SupEstimate:
    """Monte Carlo estimate of E sup over the cloud of the canonical Gaussian process.

    Per-trial Gaussians come from fixed-size seed-derived chunks, so the
    estimate is independent of any execution partitioning.
    """
    pts = _points_of(cloud)
    if trials < 1:
        raise ParamOutOfRange("trials must be >= 1")
    n = pts.shape[1]
    ss = np.random.SeedSequence(int(seed))
    n_chunks = (trials + MC_CHUNK - 1) // MC_CHUNK
    children = ss.spawn(n_chunks)
    sups = np.empty(trials)
    done = 0
    for child in children:
        take = min(MC_CHUNK, trials - done)
        g = np.random.default_rng(child).standard_normal((take, n))
        sups[done : done + take] = (g @ pts.T).max(axis=1)
        done += take
    mean = float(sups.mean())
    std_error = float(sups.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SupEstimate(mean, std_error, trials, int(seed))


def l_constant(R: float, n: int, alpha: float) -> float:
    """(log(R 3^n)/log 2 + 1)^(1/alpha), both logarithms natural."""
    if R < 1.0 or n < 1 or alpha <= 0:
        raise ParamOutOfRange("need R >= 1, n >= 1, alpha > 0")
    return (math.log(R * 3.0**n) / math.log(2.0) + 1.0) ** (1.0 / alpha)


@dataclass(frozen=True)
class GammaRatioReport:
    gamma_T: float
    gamma_Th: float
    L_bound: float
    holds: bool
    alpha: float
    R: float
    dim: int
    slack: float


GAMMA_SAMPLE_TOL = 1e-9


def certify_hull_gamma(T, alpha: float, mode: str = "poly", R: float | None = None,
                       axis_cells: int = 24) -> GammaRatioReport:
    """Certify gamma_alpha(T_h) <= L * gamma_alpha(T) on deterministic samples.

    T may be a PointCloud (used as-is) or a BodyApprox / Polytope (sampled).
    Both sides are discretized at one resolution: the body's sampling grid,
    or for finite clouds the cloud's own nearest-neighbor spacing. R defaults
    per mode as in the covering certificate.
    """
    from .geometry import Polytope, volume_ratio_poly
    from .minkowski import BodyApprox, empirical_general_ratio

    if mode not in ("poly", "general"):
        raise ParamOutOfRange(f"unknown mode {mode!r}")
    hull_h = None
    if isinstance(T, Polytope):
        T = BodyApprox.from_polytope(T)
    if isinstance(T, BodyApprox) and T.kind != "points":
        poly = T.poly if T.poly is not None else None
        if poly is None:
            from .geometry import quickhull

            poly = quickhull(T.vertices)
        pts_T, hull_h = sampling.sample_polytope(poly, axis_cells=axis_cells)
        if R is None:
            if mode == "poly":
                R = volume_ratio_poly(poly)
            else:
                R = empirical_general_ratio(T, 8).bound
        hull_source = T.hull_points()
        dim = T.dim
    else:
        pts_T = T.points if isinstance(T, BodyApprox) else _points_of(T)
        hull_source = pts_T
        dim = pts_T.shape[1]
        hull_h = _nearest_neighbor_gap(pts_T)
        if R is None:
            R = 1.0

    h = hull_h
    while True:
        hull_pts, _ = sampling.sample_hull(hull_source, h=h)
        if len(hull_pts) <= GREEDY_CAP:
            break
        h = (h or 1.0) * 2.0
    if len(pts_T) > GREEDY_CAP:
        raise TooLarge("body sample exceeds the greedy gamma cap; coarsen axis_cells")

    g_T = gamma_greedy(pts_T, alpha).value
    g_Th = gamma_greedy(hull_pts, alpha).value
    L = l_constant(max(R, 1.0), dim, alpha)
    slack = L * g_T - g_Th
    return GammaRatioReport(
        gamma_T=g_T,
        gamma_Th=g_Th,
        L_bound=L,
        holds=bool(slack >= -GAMMA_SAMPLE_TOL),
        alpha=alpha,
        R=float(max(R, 1.0)),
        dim=dim,
        slack=float(slack),
    )


def _nearest_neighbor_gap(pts: np.ndarray) -> float:
    """Smallest positive nearest-neighbor distance; the cloud's own resolution."""
    if len(pts) < 2:
        return 1.0
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    off = d[np.triu_indices(len(pts), k=1)]
    positive = off[off > 0]
    return float(positive.min()) if len(positive) else 1.0


@dataclass(frozen=True)
class TwoSidedReport:
    gamma2: float
    esup: float
    esup_std_error: float
    l_hat: float
    trials: int
    seed: int
    degenerate: bool = False


def certify_mm_two_sided(cloud, trials: int, seed: int) -> TwoSidedReport:
    """Empirical constant of the two-sided comparison between the chaining
    functional and the Gaussian supremum: max(gamma2/Esup, Esup/gamma2).

    Singleton clouds are degenerate (both sides vanish) and are flagged
    rather than scored.
    """
    pts = _points_of(cloud)
    if len(pts) < 2 or float(np.linalg.norm(pts - pts[0], axis=1).max()) == 0.0:
        return TwoSidedReport(0.0, 0.0, 0.0, float("nan"), trials, int(seed), degenerate=True)
    gamma = gamma_greedy(pts, 2.0).value
    sup = gaussian_sup_mc(pts, trials, seed)
    if sup.mean <= 0 or gamma <= 0:
        l_hat = float("inf")
    else:
        l_hat = max(gamma / sup.mean, sup.mean / gamma)
    return TwoSidedReport(gamma, sup.mean, sup.std_error, float(l_hat), trials, int(seed))
