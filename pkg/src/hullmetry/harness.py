"""Scenario-driven certification harness.

Runs every scenario x check of a suite, collects CertificationRecords, and
writes results.json / results.csv plus plot-ready CSV data. results.json is
byte-deterministic for a fixed suite and master seed; wall-clock timings go
to results.csv only.
"""
from __future__ import annotations

import json
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import HullmetryError
from .geometry import (
    TAU_VOL,
    load_body,
    load_cloud,
    quickhull,
    triangulate_boundary,
    volume_det,
    volume_projected,
    volume_ratio_poly,
)
from .minkowski import BodyApprox, check_reverse_bm, convexification_gap
from .covering import CoveringReport, check_hull_cover_ratio, greedy_cover, volume_cover_bounds
from .chaining import certify_hull_gamma, certify_mm_two_sided
from .profiles import EntropyProfile, l_existence_report
from . import sampling

VALID_CHECKS = {
    "body": {"volume_xcheck", "ratio_poly", "revbm", "convexify", "cover_ratio", "gamma_hull"},
    "cloud": {"convexify", "cover_ratio", "gamma_hull", "mm_two_sided"},
    "profile": {"l_existence"},
}


class SuiteError(HullmetryError):
    """The suite file does not parse or fails validation."""


@dataclass
class CertificationRecord:
    """One scenario x check outcome. holds is slack-driven: holds iff
    slack >= -TAU_VOL, with any discretization tolerance of the check
    already absorbed into slack."""

    scenario: str
    check: str
    lhs: float
    rhs: float
    slack: float
    constants: dict
    runtime_ms: float = 0.0

    @property
    def holds(self) -> bool:
        return bool(self.slack >= -TAU_VOL)

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "check": self.check,
            "holds": self.holds,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "slack": _jsonable(self.slack),
            "constants": {k: _jsonable(v) for k, v in self.constants.items()},
        }


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


@dataclass
class Scenario:
    id: str
    kind: str
    payload: dict
    checks: list
    params: dict = field(default_factory=dict)

    @staticmethod
    def from_dict(doc: dict) -> "Scenario":
        try:
            scen = Scenario(
                id=str(doc["id"]),
                kind=str(doc["kind"]),
                payload=dict(doc["payload"]),
                checks=list(doc["checks"]),
                params=dict(doc.get("params", {})),
            )
        except (KeyError, TypeError) as exc:
            raise SuiteError(f"malformed scenario: {exc}") from exc
        if scen.kind not in VALID_CHECKS:
            raise SuiteError(f"scenario {scen.id}: unknown kind {scen.kind!r}")
        bad = [c for c in scen.checks if c not in VALID_CHECKS[scen.kind]]
        if bad:
            raise SuiteError(f"scenario {scen.id}: checks {bad} invalid for kind {scen.kind!r}")
        return scen


def derive_seed(master: int, scenario_id: str, check: str) -> int:
    tag = zlib.crc32(f"{scenario_id}:{check}".encode())
    return int(np.random.SeedSequence([int(master), tag]).generate_state(1)[0])


def _finite(x) -> float:
    x = float(x)
    return x if math.isfinite(x) else float("nan")


# ---------------------------------------------------------------------------
# Checks. Each returns (record, artifacts) with artifacts = {filename: text}.
# ---------------------------------------------------------------------------


def _check_volume_xcheck(scen: Scenario, seed: int):
    body = load_body(scen.payload)
    boundary = triangulate_boundary(body)
    vd = volume_det(boundary)
    vp = volume_projected(boundary)
    rel = abs(vd - vp) / max(abs(vd), 1e-300)
    rec = CertificationRecord(
        scen.id, "volume_xcheck", vd, vp, -rel,
        {"vol_det": vd, "vol_projected": vp, "rel_diff": rel},
    )
    return rec, {}


def _check_ratio_poly(scen: Scenario, seed: int):
    body = load_body(scen.payload)
    R = volume_ratio_poly(body)
    hull = quickhull(body.vertices)
    rehull = quickhull(hull.vertices)
    idempotent = sorted(map(tuple, hull.vertices.tolist())) == sorted(
        map(tuple, rehull.vertices.tolist())
    )
    from .geometry import hull_contains

    contained = bool(np.all(hull_contains(hull, body.vertices)))
    slack = (R - 1.0) if (idempotent and contained) else -1.0
    rec = CertificationRecord(
        scen.id, "ratio_poly", R, 1.0, slack,
        {"R": R, "idempotent": bool(idempotent), "contained": contained},
    )
    return rec, {}


def _check_revbm(scen: Scenario, seed: int):
    body = load_body(scen.payload)
    approx = BodyApprox.from_polytope(body, axis_cells=scen.params.get("axis_cells"))
    cap = float(scen.params.get("c1_cap", 10.0))
    worst = -math.inf
    beta_a = beta_b = float("nan")
    cases = 0
    for s in scen.params.get("s_values", [1.0]):
        for t in scen.params.get("t_values", [1.0]):
            for m in scen.params.get("m_values", [1]):
                rep = check_reverse_bm(approx, approx, float(s), float(t), int(m))
                cases += 1
                if rep.empirical_C1 > worst:
                    worst = rep.empirical_C1
                    beta_a, beta_b = rep.beta_A, rep.beta_B
    slack = cap - worst if math.isfinite(worst) else -1.0
    rec = CertificationRecord(
        scen.id, "revbm", _finite(worst), cap, slack,
        {"empirical_C1": _finite(worst), "beta_A": beta_a, "beta_B": beta_b, "cases": cases},
    )
    return rec, {}


def _check_convexify(scen: Scenario, seed: int):
    if scen.kind == "cloud":
        cloud = load_cloud(scen.payload)
        approx = BodyApprox.from_points(cloud.points)
        tol = 1e-9
    else:
        body = load_body(scen.payload)
        approx = BodyApprox.from_polytope(body, axis_cells=scen.params.get("axis_cells"))
        tol = approx.natural_spacing() / 2.0 if approx.kind != "convex" else 1e-9
    k_max = int(scen.params.get("k_max", 8))
    traces = convexification_gap(approx, k_max)
    gaps = [t.hausdorff_to_hull for t in traces]
    margins = [a - b + tol for a, b in zip(gaps, gaps[1:])]
    slack = min(margins + [gaps[0] - gaps[-1] + tol]) if margins else tol
    monotone = all(m >= -TAU_VOL for m in margins)
    rec = CertificationRecord(
        scen.id, "convexify", gaps[-1], gaps[0], slack,
        {"k_max": k_max, "gap_first": gaps[0], "gap_last": gaps[-1], "monotone": bool(monotone)},
    )
    rows = ["k,vol,gap,bound"]
    rows += [f"{t.k},{t.vol_Ak!r},{t.hausdorff_to_hull!r},{t.bound_value!r}" for t in traces]
    twocol = ["k,gap"] + [f"{t.k},{t.hausdorff_to_hull!r}" for t in traces]
    return rec, {
        f"convexify_{scen.id}.csv": "\n".join(rows) + "\n",
        f"plot_gap_vs_k_{scen.id}.csv": "\n".join(twocol) + "\n",
    }


def _check_cover_ratio(scen: Scenario, seed: int):
    epsilons = [float(e) for e in scen.params.get("epsilons", [0.2, 0.4, 0.8])]
    if scen.kind == "cloud":
        target = load_cloud(scen.payload)
        sample_for_report = target.points
        convex_poly = None
    else:
        target = load_body(scen.payload)
        convex_poly = target if volume_ratio_poly(target) <= 1.0 + 1e-9 else None
        sample_for_report = None
    mode = scen.params.get("mode", "poly")
    worst_slack = math.inf
    worst = None
    report_rows = [CoveringReport.csv_header()]
    plot_rows = ["epsilon,n_greedy"]
    for eps in epsilons:
        cert = check_hull_cover_ratio(target, eps, mode)
        if cert.slack < worst_slack:
            worst_slack = cert.slack
            worst = cert
        pts = sample_for_report
        if pts is None:
            pts, _ = sampling.sample_polytope(target, h=eps / 4.0)
        rep = greedy_cover(pts, eps)
        if convex_poly is not None:
            rep.vol_lower, rep.vol_upper = volume_cover_bounds(convex_poly, eps)
        report_rows.append(rep.to_csv_row())
        plot_rows.append(f"{eps!r},{rep.n_greedy}")
    rec = CertificationRecord(
        scen.id, "cover_ratio", float(worst.n_hull), worst.bound, worst.slack,
        {"R": worst.ratio_R, "dim": worst.dim, "epsilon_worst": worst.epsilon,
         "epsilons": len(epsilons)},
    )
    return rec, {
        f"cover_{scen.id}.csv": "\n".join(report_rows) + "\n",
        f"plot_n_vs_eps_{scen.id}.csv": "\n".join(plot_rows) + "\n",
    }


def _check_gamma_hull(scen: Scenario, seed: int):
    alpha = float(scen.params.get("alpha", 2.0))
    cells = int(scen.params.get("gamma_cells", 24))
    if scen.kind == "cloud":
        target = load_cloud(scen.payload)
    else:
        target = load_body(scen.payload)
    rep_poly = certify_hull_gamma(target, alpha, "poly", axis_cells=cells)
    rep_gen = certify_hull_gamma(target, alpha, "general", axis_cells=cells)
    rec = CertificationRecord(
        scen.id, "gamma_hull", rep_poly.gamma_Th,
        rep_poly.L_bound * rep_poly.gamma_T, min(rep_poly.slack, rep_gen.slack),
        {
            "alpha": alpha,
            "gamma_T": rep_poly.gamma_T,
            "gamma_Th": rep_poly.gamma_Th,
            "R_poly": rep_poly.R,
            "L_poly": rep_poly.L_bound,
            "R_gen": rep_gen.R,
            "L_gen": rep_gen.L_bound,
        },
    )
    return rec, {}


def _check_mm_two_sided(scen: Scenario, seed: int):
    cloud = load_cloud(scen.payload)
    trials = int(scen.params.get("trials", 20000))
    cap = float(scen.params.get("l_hat_cap", 100.0))
    rep = certify_mm_two_sided(cloud, trials, seed)
    if rep.degenerate:
        rec = CertificationRecord(
            scen.id, "mm_two_sided", 0.0, cap, cap,
            {"degenerate": True, "trials": trials},
        )
        return rec, {}
    slack = cap - rep.l_hat if math.isfinite(rep.l_hat) else -1.0
    rec = CertificationRecord(
        scen.id, "mm_two_sided", _finite(rep.l_hat), cap, slack,
        {
            "gamma2": rep.gamma2,
            "esup": rep.esup,
            "esup_std_error": rep.esup_std_error,
            "L_hat": _finite(rep.l_hat),
            "trials": trials,
            "size": len(cloud.points),
        },
    )
    return rec, {}


def _check_l_existence(scen: Scenario, seed: int):
    doc = scen.payload
    profile = EntropyProfile(float(doc["chi"]), float(doc["psi"]))
    delta = float(doc.get("delta", 1.0))
    C = float(doc.get("C", 1.0))
    rep = l_existence_report(profile, delta, C)
    expect = scen.params.get("expect_l_exists")
    holds = True if expect is None else (bool(expect) == rep.L_exists)
    verdict = rep.verdict
    rec = CertificationRecord(
        scen.id, "l_existence",
        1.0 if rep.L_exists else 0.0,
        -1.0 if expect is None else (1.0 if expect else 0.0),
        0.0 if holds else -1.0,
        {
            "chi": profile.chi,
            "psi": profile.psi,
            "delta": delta,
            "L_exists": rep.L_exists,
            "value": _finite(verdict.value) if verdict.value is not None else float("nan"),
            "singularity": verdict.singularity if verdict.singularity is not None else float("nan"),
            "ratio_kind": rep.ratio.kind,
        },
    )
    verdict_doc = {
        "profile": {"chi": profile.chi, "psi": profile.psi, "form": profile.form},
        "hull_profile": {"chi": rep.hull.chi, "psi": rep.hull.psi, "form": rep.hull.form},
        "ratio": {"kind": rep.ratio.kind, "constant_label": rep.ratio.constant_label,
                  "constant": rep.ratio.constant},
        "converges": verdict.converges,
        "value": verdict.value,
        "reason": verdict.reason,
        "quadrature_trace": verdict.quadrature_trace,
    }
    text = json.dumps(verdict_doc, indent=2, sort_keys=True) + "\n"
    return rec, {f"verdict_{scen.id}.json": text}


CHECK_RUNNERS = {
    "volume_xcheck": _check_volume_xcheck,
    "ratio_poly": _check_ratio_poly,
    "revbm": _check_revbm,
    "convexify": _check_convexify,
    "cover_ratio": _check_cover_ratio,
    "gamma_hull": _check_gamma_hull,
    "mm_two_sided": _check_mm_two_sided,
    "l_existence": _check_l_existence,
}


def run_scenario(doc: dict, master_seed: int):
    """All checks of one scenario; returns (records, artifacts)."""
    scen = Scenario.from_dict(doc)
    records = []
    artifacts: dict[str, str] = {}
    for check in scen.checks:
        seed = derive_seed(master_seed, scen.id, check)
        t0 = time.perf_counter()
        rec, files = CHECK_RUNNERS[check](scen, seed)
        rec.runtime_ms = (time.perf_counter() - t0) * 1000.0
        records.append(rec)
        artifacts.update(files)
    return records, artifacts


def load_suite(suite_file) -> dict:
    try:
        doc = json.loads(Path(suite_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SuiteError(f"cannot parse suite file: {exc}") from exc
    if "scenarios" not in doc:
        raise SuiteError("suite file has no 'scenarios' list")
    ids = [s.get("id") for s in doc["scenarios"]]
    if len(ids) != len(set(ids)):
        raise SuiteError("scenario ids must be unique within a suite")
    for s in doc["scenarios"]:
        Scenario.from_dict(s)
    return doc


def run_suite(suite_file, out_dir, seed: int | None = None, jobs: int = 1) -> int:
    """Execute a suite and write reports; exit status 0 iff every check holds."""
    suite = load_suite(suite_file)
    master = int(seed if seed is not None else suite.get("seed", 0))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    scenario_docs = suite["scenarios"]
    all_records: list[CertificationRecord] = []
    artifacts: dict[str, str] = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_scenario, doc, master) for doc in scenario_docs]
            for fut in futures:
                records, files = fut.result()
                all_records.extend(records)
                artifacts.update(files)
    else:
        for doc in scenario_docs:
            records, files = run_scenario(doc, master)
            all_records.extend(records)
            artifacts.update(files)

    all_records.sort(key=lambda r: (r.scenario, r.check))

    results = [r.to_json_dict() for r in all_records]
    (out / "results.json").write_text(json.dumps(results, indent=2, sort_keys=True) + "\n")

    csv_lines = ["scenario,check,holds,lhs,rhs,slack,runtime_ms"]
    for r in all_records:
        csv_lines.append(
            f"{r.scenario},{r.check},{int(r.holds)},{r.lhs!r},{r.rhs!r},{r.slack!r},"
            f"{r.runtime_ms:.3f}"
        )
    (out / "results.csv").write_text("\n".join(csv_lines) + "\n")

    gamma_rows = ["scenario,alpha,gamma_T,gamma_Th,L_bound,esup,L_hat"]
    esups = {r.scenario: r.constants for r in all_records if r.check == "mm_two_sided"}
    size_rows = ["size,gamma"]
    for r in all_records:
        if r.check == "gamma_hull":
            extra = esups.get(r.scenario, {})
            gamma_rows.append(
                ",".join(
                    [
                        r.scenario,
                        repr(r.constants["alpha"]),
                        repr(r.constants["gamma_T"]),
                        repr(r.constants["gamma_Th"]),
                        repr(r.constants["L_poly"]),
                        repr(extra["esup"]) if "esup" in extra else "",
                        repr(extra["L_hat"]) if "L_hat" in extra else "",
                    ]
                )
            )
    for r in all_records:
        if r.check == "mm_two_sided" and "size" in r.constants:
            size_rows.append(f"{r.constants['size']},{r.constants['gamma2']!r}")
    (out / "gamma_summary.csv").write_text("\n".join(gamma_rows) + "\n")
    (out / "plot_gamma_vs_size.csv").write_text("\n".join(size_rows) + "\n")

    for name in sorted(artifacts):
        (out / name).write_text(artifacts[name])

    return 0 if all(r.holds for r in all_records) else 1
