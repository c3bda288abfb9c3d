"""Desk-scale certification lab for hulls, covering numbers, and chaining functionals."""

from .geometry import (
    Ball,
    PointCloud,
    Polytope,
    SimplicialBoundary,
    beta_ratio,
    load_body,
    load_cloud,
    min_enclosing_ball,
    polytope_from_facets,
    quickhull,
    triangulate_boundary,
    volume_det,
    volume_projected,
    volume_ratio_poly,
)
from .minkowski import (
    BodyApprox,
    check_reverse_bm,
    convexification_gap,
    empirical_general_ratio,
    minkowski_average,
    minkowski_sum,
    scale_body,
    volume_ratio_general_bound,
)
from .covering import (
    CoveringReport,
    check_hull_cover_ratio,
    exact_cover_small,
    greedy_cover,
    packing_number,
    volume_cover_bounds,
)
from .chaining import (
    certify_hull_gamma,
    certify_mm_two_sided,
    entropy_integral,
    gamma_exact_small,
    gamma_greedy,
    gaussian_sup_mc,
    l_constant,
)
from .profiles import EntropyProfile, hull_profile, integral_exists, l_existence_report, ratio_bound
from .harness import run_suite

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BodyApprox",
    "CoveringReport",
    "EntropyProfile",
    "PointCloud",
    "Polytope",
    "SimplicialBoundary",
    "beta_ratio",
    "certify_hull_gamma",
    "certify_mm_two_sided",
    "check_hull_cover_ratio",
    "check_reverse_bm",
    "convexification_gap",
    "empirical_general_ratio",
    "entropy_integral",
    "exact_cover_small",
    "gamma_exact_small",
    "gamma_greedy",
    "gaussian_sup_mc",
    "greedy_cover",
    "hull_profile",
    "integral_exists",
    "l_constant",
    "l_existence_report",
    "load_body",
    "load_cloud",
    "min_enclosing_ball",
    "minkowski_average",
    "minkowski_sum",
    "packing_number",
    "polytope_from_facets",
    "quickhull",
    "ratio_bound",
    "run_suite",
    "scale_body",
    "triangulate_boundary",
    "volume_cover_bounds",
    "volume_det",
    "volume_projected",
    "volume_ratio_general_bound",
    "volume_ratio_poly",
]
