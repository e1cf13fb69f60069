"""Self-checks bundled with the package (used by ``ffclusters verify``)."""
from __future__ import annotations

import time

import numpy as np

from .cluster import GEOMETRIES, catalog
from .errors import NumericError
from .fastforward import DEFAULT_STEPS, Schedule, evolve
from .groundstate import derivative, ground_state
from .operators import GOLDEN_GEOMETRIES, RegWeights, build_reg, golden_reg_matrix
from .regsolver import assemble, closed_form, regularization, solve

EXPECTED_RANK = {
    "triangle": 1, "chain3": 2, "pyramid": 2, "square": 3, "star": 3, "chain4": 5,
}

GOLDEN_TOL = 1e-15
CLOSED_FORM_TOL = 1e-9
NORMALIZATION_TOL = 1e-10
FIDELITY_TOL = 1e-6


def sweep_points(schedule: Schedule, n: int = 50, margin: float = 0.05) -> np.ndarray:
    """R values keeping both J and Bx above ``margin``."""
    lo = max(schedule.R0, margin)
    hi = min(schedule.R0 + schedule.vbar * schedule.Tff, schedule.B0 - margin)
    return np.linspace(lo, hi, n)


def check_golden(geometry, n_draws=100, seed=0, tables=None) -> dict:
    geo = catalog(geometry)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        w = tuple(rng.normal(size=len(geo.w_classes)))
        q = float(rng.normal()) if geo.q_included else 0.0
        weights = RegWeights(w, q)
        diff = build_reg(geo, weights) - golden_reg_matrix(geo, weights, tables)
        worst = max(worst, float(np.abs(diff).max()))
    return {"max_abs_diff": worst, "passed": bool(worst <= GOLDEN_TOL)}


def check_closed_form(geometry, schedule) -> dict:
    geo = catalog(geometry)
    worst = 0.0
    for R in sweep_points(schedule):
        gs = ground_state(geo, schedule.coupling(R), schedule.field(R))
        d = derivative(geo, schedule, R)
        x_svd = solve(assemble(geo, gs, d)).weights.as_vector(geo.q_included)
        x_cf = closed_form(geo, gs, d).weights.as_vector(geo.q_included)
        scale = np.maximum(np.abs(x_cf), 1e-300)
        worst = max(worst, float((np.abs(x_svd - x_cf) / scale).max()))
    return {"max_rel_diff": worst, "passed": bool(worst <= CLOSED_FORM_TOL)}


def check_rank(geometry, schedule) -> dict:
    geo = catalog(geometry)
    ranks = sorted({
        regularization(geo, schedule, R).rank for R in sweep_points(schedule, 7)
    })
    return {"ranks": ranks, "expected": EXPECTED_RANK[geometry],
            "passed": ranks == [EXPECTED_RANK[geometry]]}


def check_normalization(geometry, schedule) -> dict:
    """sum C_k^2 = 1 and sum C_k dC_k = 0 along the sweep."""
    geo = catalog(geometry)
    worst = 0.0
    for R in sweep_points(schedule, 11):
        C = ground_state(geo, schedule.coupling(R), schedule.field(R)).components
        dC = derivative(geo, schedule, R).dC_dR
        worst = max(worst, float(abs(C @ C - 1.0)), float(abs(C @ dC)))
    return {"max_violation": worst, "passed": bool(worst <= NORMALIZATION_TOL)}


def check_fidelity(geometry, schedule, steps=DEFAULT_STEPS) -> dict:
    geo = catalog(geometry)
    t0 = time.perf_counter()
    try:
        records = evolve(geo, schedule, steps=steps)
    except NumericError as exc:
        return {"error": str(exc), "passed": False}
    fid = min(r.fidelity for r in records)
    drift = max(abs(r.norm - 1.0) for r in records)
    return {
        "min_fidelity": float(fid),
        "max_norm_drift": float(drift),
        "seconds": time.perf_counter() - t0,
        "passed": bool(fid >= 1 - FIDELITY_TOL),
    }


def run_checks(
    geometries=GEOMETRIES,
    schedule: Schedule | None = None,
    steps: int = DEFAULT_STEPS,
    golden_tables: dict | None = None,
    fidelity: bool = True,
) -> dict:
    """Run every check for ``geometries``; ``report["passed"]`` is the verdict."""
    schedule = schedule or Schedule()
    report = {"geometries": {}}
    for g in geometries:
        entry = {
            "closed_form": check_closed_form(g, schedule),
            "rank": check_rank(g, schedule),
            "normalization": check_normalization(g, schedule),
        }
        if g in GOLDEN_GEOMETRIES:
            entry["golden"] = check_golden(g, tables=golden_tables)
        if fidelity:
            entry["fidelity"] = check_fidelity(g, schedule, steps)
        entry["passed"] = all(c["passed"] for c in entry.values())
        report["geometries"][g] = entry
    report["passed"] = all(e["passed"] for e in report["geometries"].values())
    return report
