"""Entropy-growth regimes, hull-profile transformation, ratio functions, and the
numerical integrability criterion deciding whether the comparison constant exists.

Profiles describe log N(T, eps) asymptotics as eps^(-chi) |log eps|^psi. Only
the three regimes with stated transformations are implemented; anything else
is rejected rather than extrapolated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParamOutOfRange, Unsupported

_EXACT = 1e-12


@dataclass(frozen=True)
class EntropyProfile:
    chi: float
    psi: float
    form: str = "plain"  # "plain" | "loglog"

    def __post_init__(self):
        if self.chi < 2.0 - _EXACT:
            raise ParamOutOfRange("profiles require chi >= 2")
        if self.form not in ("plain", "loglog"):
            raise ParamOutOfRange(f"unknown profile form {self.form!r}")


def hull_profile(p: EntropyProfile) -> EntropyProfile:
    """Entropy profile of the convex hull under the three stated regimes."""
    if p.form != "plain":
        raise Unsupported("hull transformation applies to plain profiles only")
    if p.chi > 2.0 + _EXACT:
        return EntropyProfile(p.chi, p.psi, "plain")
    if p.psi > -2.0 + _EXACT:
        return EntropyProfile(2.0, p.psi + 2.0, "plain")
    if abs(p.psi + 3.0) <= _EXACT:
        return EntropyProfile(2.0, 2.0 + p.psi, "loglog")
    raise Unsupported(f"no stated hull profile for chi=2, psi={p.psi}")


@dataclass(frozen=True)
class RatioFunction:
    """Upper bound f(eps) on log N(T_h, eps) / log N(T, eps) over (0, delta]."""

    kind: str  # "constant" | "logsq" | "log3_over_loglog"
    constant: float = 1.0
    constant_label: str = ""

    def __call__(self, eps: float) -> float:
        if eps <= 0:
            raise ParamOutOfRange("ratio functions live on positive eps")
        if self.kind == "constant":
            return self.constant
        log_eps = abs(math.log(eps))
        if self.kind == "logsq":
            return self.constant * log_eps**2
        if self.kind == "log3_over_loglog":
            if log_eps == 0.0:
                return 0.0
            denom = abs(math.log(log_eps))
            if denom == 0.0:
                return math.inf
            return self.constant * log_eps**3 / denom
        raise Unsupported(f"unknown ratio kind {self.kind!r}")

    def singular_points(self) -> tuple[float, ...]:
        """Interior points where the function blows up."""
        if self.kind == "log3_over_loglog":
            return (math.exp(-1.0), math.e)
        return ()


def ratio_bound(p: EntropyProfile) -> RatioFunction:
    """The stated covering-ratio bound for a profile's regime."""
    if p.form != "plain":
        raise Unsupported("ratio bounds are stated for plain input profiles")
    if p.chi > 2.0 + _EXACT:
        return RatioFunction("constant", 1.0, "C3")
    if p.psi > -2.0 + _EXACT:
        return RatioFunction("logsq", 1.0, "C4")
    if abs(p.psi + 3.0) <= _EXACT:
        return RatioFunction("log3_over_loglog", 1.0, "C5")
    raise Unsupported(f"no stated ratio bound for chi=2, psi={p.psi}")


@dataclass(frozen=True)
class IntegrabilityVerdict:
    converges: bool
    value: float | None
    reason: str | None  # "endpoint" | "interior singularity at eps=..."
    singularity: float | None
    quadrature_trace: list = field(default_factory=list, compare=False)


def _simpson(f, a: float, b: float, panels: int = 32) -> float:
    if b <= a:
        return 0.0
    h = (b - a) / (2 * panels)
    total = f(a) + f(b)
    for i in range(1, 2 * panels):
        x = a + i * h
        total += (4.0 if i % 2 else 2.0) * f(x)
    return total * h / 3.0


REFINE_CAP = 60
CONVERGENCE_RTOL = 1e-4
DIVERGENCE_STREAK = 6


def integral_exists(f: RatioFunction, delta: float, refine_cap: int = REFINE_CAP) -> IntegrabilityVerdict:
    """Decide numerically whether the improper integral of f over (0, delta] exists.

    Shrinking geometric shells probe the eps -> 0 endpoint; any interior
    blow-up point of f inside the domain is probed by symmetric shrinking
    windows. Divergence needs sustained non-decaying mass, convergence needs
    two successive refinements agreeing to 1e-4 relative.
    """
    if delta <= 0:
        raise ParamOutOfRange("delta must be positive")
    trace: list = []

    for point in f.singular_points():
        if point >= delta - 1e-15 and not math.isclose(point, delta, rel_tol=1e-12):
            continue
        if point <= 0:
            continue
        masses = []
        w0 = min(point / 2.0, abs(delta - point) / 2.0 if delta > point else point / 2.0, 0.2)
        if w0 <= 0:
            w0 = point / 4.0
        for j in range(12):
            w_hi = w0 * 2.0**-j
            w_lo = w_hi / 2.0
            mass = 0.0
            lo_a, lo_b = point - w_hi, point - w_lo
            if lo_b > 0:
                mass += _simpson(f, max(lo_a, 1e-300), lo_b)
            hi_a, hi_b = point + w_lo, point + w_hi
            if hi_a < delta:
                mass += _simpson(f, hi_a, min(hi_b, delta))
            masses.append(mass)
            trace.append({"probe": "window", "point": point, "width": w_hi, "mass": mass})
        streak = sum(
            1 for a, b in zip(masses[-(DIVERGENCE_STREAK + 1):], masses[-DIVERGENCE_STREAK:])
            if b > 0.75 * a and b > 1e-9
        )
        if streak >= DIVERGENCE_STREAK - 1:
            return IntegrabilityVerdict(
                converges=False,
                value=None,
                reason=f"interior singularity at eps={point!r}",
                singularity=point,
                quadrature_trace=trace,
            )

    # endpoint refinement: shells [delta 2^-(j+1), delta 2^-j]
    total = 0.0
    agree = 0
    growth = 0
    prev_shell = None
    for j in range(refine_cap):
        a = delta * 2.0 ** -(j + 1)
        b = delta * 2.0**-j
        shell = _simpson(f, a, b)
        total += shell
        trace.append({"probe": "shell", "eta": a, "shell": shell, "partial": total})
        if total > 0 and shell <= CONVERGENCE_RTOL * total:
            agree += 1
            if agree >= 2:
                # complete the geometrically decaying tail below eta
                if prev_shell and 0.0 < shell < 0.95 * prev_shell:
                    r = shell / prev_shell
                    total += shell * r / (1.0 - r)
                return IntegrabilityVerdict(True, total, None, None, trace)
        else:
            agree = 0
        if prev_shell is not None and shell >= prev_shell * 0.999 and shell > 1e-12:
            growth += 1
            if growth >= DIVERGENCE_STREAK:
                return IntegrabilityVerdict(False, None, "endpoint", 0.0, trace)
        else:
            growth = 0
        prev_shell = shell
    # refinements exhausted without settling: call it divergent at the endpoint
    return IntegrabilityVerdict(False, None, "endpoint", 0.0, trace)


@dataclass(frozen=True)
class LExistenceReport:
    profile: EntropyProfile
    hull: EntropyProfile
    ratio: RatioFunction
    verdict: IntegrabilityVerdict
    L_exists: bool


def l_existence_report(p: EntropyProfile, delta: float, C: float = 1.0) -> LExistenceReport:
    """Chain the hull transformation, ratio bound, and integrability criterion."""
    hull = hull_profile(p)
    ratio = ratio_bound(p)
    if C != 1.0:
        ratio = RatioFunction(ratio.kind, C * ratio.constant, ratio.constant_label)
    verdict = integral_exists(ratio, delta)
    return LExistenceReport(p, hull, ratio, verdict, verdict.converges)
