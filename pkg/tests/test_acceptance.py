"""Acceptance suite: the seven exit criteria, each with its stated tolerance
and runtime budget.  One pass/fail line prints per criterion."""

import time

import numpy as np
import pytest

from finslerhom import (catalog, chartcurv, harness, homspace, liealg,
                        minkowski, riemann)
from finslerhom.chartcurv import ChartContext
from finslerhom.jets import JetSpace
from finslerhom.report import RunConfig

RNG_SEED = 20250809


def _report(name, passed, budget_s, elapsed, detail=""):
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {name}: {status} ({elapsed:.1f}s / budget {budget_s}s) {detail}")
    assert passed, f"{name} failed: {detail}"
    assert elapsed < budget_s, f"{name} exceeded runtime budget"


# -- criterion 1 ----------------------------------------------------------------

def _satisfying_metrics(rng):
    """Ten invariant data sets satisfying the Killing criterion by
    construction: block metrics with v spanning the distinguished line."""
    out = []
    specs = [(1, dict(n=1)), (1, dict(n=2)), (2, dict(n=1)), (3, dict(n=1)),
             (4, dict(n=1)), (6, dict(k=1, l=1)), (6, dict(k=2, l=1)),
             (7, dict()), (2, dict(n=2)), (6, dict(k=1, l=-1))]
    for cid, kw in specs:
        r = catalog.build_case(cid, **kw)
        scal = list(rng.uniform(0.5, 1.5, size=len(r.blocks)))
        eps = rng.uniform(0.05, 0.3)
        met = r.ab_metric(scal, minkowski.phi_randers(eps))
        out.append(met)
    return out


def _violating_metrics(rng):
    """Ten data sets violating the criterion: anisotropic su(2) metrics with
    v inside the sphere part, and S_{1,1} metrics with the dual vector mixed
    into the ad(h)-fixed root plane."""
    out = []
    su2 = catalog.build_case(1, n=1)
    for _ in range(5):
        d = np.sort(rng.uniform(0.5, 3.0, size=3))
        d[2] += 0.5  # keep the eigenvalues distinct
        inner = np.diag(d)
        v = np.zeros(3)
        v[1] = rng.uniform(0.6, 1.2)
        met = homspace.InvariantABMetric(su2.space, inner, v,
                                         minkowski.phi_randers(rng.uniform(0.1, 0.3)))
        out.append(met)
    aw = catalog.build_case(6, k=1, l=1)
    for _ in range(5):
        scal = list(rng.uniform(0.5, 1.5, size=4))
        inner = aw.block_inner(scal)
        v = np.zeros(7)
        v[0] = rng.uniform(0.5, 1.0)
        v[1] = rng.uniform(0.3, 0.8)  # component in the fixed root plane
        met = homspace.InvariantABMetric(aw.space, inner, v,
                                         minkowski.phi_randers(0.15))
        out.append(met)
    return out


def test_criterion_1_s_vanishing_equivalence():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED)
    sats = _satisfying_metrics(rng)
    viols = _violating_metrics(rng)
    ok = True
    detail = ""
    for tag, mets, expect in (("satisfying", sats, True), ("violating", viols, False)):
        for i, met in enumerate(mets):
            kv = bool(homspace.kvcl_check(met)[0])
            max_s = 0.0
            for _ in range(500):
                y = rng.standard_normal(met.space.dim)
                max_s = max(max_s, abs(homspace.s_curvature_hom(met, y)))
            vanishes = bool(max_s < 1e-8)
            if kv != expect or vanishes != expect:
                ok = False
                detail += f" [{tag}#{i}: kvcl={kv} maxS={max_s:.2e}]"
    _report("1 (vanishing-S / KVCL equivalence, 20 data sets)", ok, 10,
            time.time() - t0, detail)


# -- criterion 2 ----------------------------------------------------------------

def _chart_vs_hom(realization_metric, points, rng, radius=0.25):
    met = realization_metric
    chart = ChartContext(met.space)
    n = met.space.dim
    devs, scale = [], 0.0
    for _ in range(points):
        x = rng.standard_normal(n)
        x *= radius * rng.uniform(0.2, 1.0) / np.linalg.norm(x)
        y = rng.standard_normal(n)
        s_chart = chartcurv.s_curvature_chart(chart, met, x, y)
        s_hom = homspace.SCURV_CALIBRATION \
            * homspace.s_curvature_hom(met, chart.transport(x) @ y)
        devs.append(abs(s_chart - s_hom))
        scale = max(scale, abs(s_hom))
    return max(devs) / scale


def test_criterion_2_s_curvature_oracle_agreement():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 1)
    su2 = catalog.build_case(1, n=1)
    met_su2 = homspace.InvariantABMetric(
        su2.space, np.diag([3.0, 1.0, 2.0]), np.array([0.0, 1.0, 0.0]),
        minkowski.phi_randers(0.3))
    r1 = _chart_vs_hom(met_su2, 20, rng)
    aw = catalog.build_case(6, k=1, l=1)
    v = np.zeros(7)
    v[0], v[1] = 0.8, 0.5  # kvcl-violating so S is genuinely nonzero
    met_aw = homspace.InvariantABMetric(aw.space, aw.block_inner([1.0, 0.8, 1.2, 0.9]),
                                        v, minkowski.phi_randers(0.2))
    r2 = _chart_vs_hom(met_aw, 20, rng)
    ok = r1 < 1e-6 and r2 < 1e-6
    _report("2 (S-curvature chart vs closed form)", ok, 120, time.time() - t0,
            f"su2 rel={r1:.2e}, S11 rel={r2:.2e}")


# -- criterion 3 ----------------------------------------------------------------

def test_criterion_3_shen_localization():
    t0 = time.time()
    su2 = catalog.build_case(1, n=1)
    met1 = homspace.InvariantABMetric(su2.space, np.eye(3), np.array([0.0, 0, 1.0]),
                                      minkowski.phi_randers(0.2))
    worst1 = chartcurv.riemannian_localization_check(
        ChartContext(su2.space), met1, points=10, seed=RNG_SEED)
    aw = catalog.build_case(6, k=1, l=1)
    met2 = aw.randers_metric([1.0, 0.8, 1.2, 0.9], 0.1)
    worst2 = chartcurv.riemannian_localization_check(
        ChartContext(aw.space), met2, points=10, seed=RNG_SEED)
    ok = worst1 < 1e-6 and worst2 < 1e-6
    _report("3 (geodesic-field localization, 10 chart points each)", ok, 120,
            time.time() - t0, f"su2={worst1:.2e}, S11={worst2:.2e}")


# -- criterion 4 ----------------------------------------------------------------

def test_criterion_4_zero_flag_reproduction():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 2)
    worst = 0.0
    for builder in (lambda: catalog.build_case(6, k=1, l=-1),
                    lambda: catalog.build_case(7, torus=((1, -1, 0), (1, 0, 0)))):
        r = builder()
        for _ in range(3):
            scal = list(rng.uniform(0.6, 1.4, size=4))
            met = r.randers_metric(scal, rng.uniform(0.05, 0.2))
            kv, _ = homspace.kvcl_check(met)
            assert kv
            chart = ChartContext(r.space)
            vp = np.zeros(7)
            theta = rng.uniform(0, 2 * np.pi)
            vp[1], vp[2] = np.cos(theta), np.sin(theta)  # in g_{+-(e1-e2)}
            k_chart = chartcurv.flag_curvature(chart, met, np.zeros(7), r.v, vp)
            gv = homspace.localize_gv(met)
            k_pair = homspace.commuting_pair_sectional(gv, r.v, vp)
            worst = max(worst, abs(k_chart), abs(k_pair))
    _report("4 (zero flags on SU(3)/U(1) and U(3)/T^2)", worst < 1e-6, 300,
            time.time() - t0, f"max |K| = {worst:.2e}")


# -- criterion 5 ----------------------------------------------------------------

def test_criterion_5_riemannian_consistency():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 3)
    cases = [
        ("S3", catalog.build_case(1, n=1), [1.0, 1.0]),
        ("S5", catalog.build_case(1, n=2), [1.0, 1.0]),
        ("S11", catalog.build_case(6, k=1, l=1), [1.0, 0.8, 1.2, 0.9]),
    ]
    worst = 0.0
    quarter_worst = 0.0
    for name, r, scal in cases:
        met = r.ab_metric(scal, minkowski.phi_riemannian())
        chart = ChartContext(r.space)
        field = chartcurv.riemannian_metric_field(chart, met.inner)
        _, rt0 = riemann.christoffel_and_curvature(field, np.zeros(r.dim))
        for k in range(50):
            if k % 10 == 0 and k > 0:
                x = rng.standard_normal(r.dim)
                x *= 0.2 * rng.uniform(0.3, 1.0) / np.linalg.norm(x)
                _, rt = riemann.christoffel_and_curvature(field, x)
                a_x = np.array([[e.value for e in row] for row in field(
                    JetSpace.total_degree(r.dim, 2).seed(x))])
            else:
                x = np.zeros(r.dim)
                rt, a_x = rt0, met.inner
            y = rng.standard_normal(r.dim)
            w = rng.standard_normal(r.dim)
            kf = chartcurv.flag_curvature(chart, met, x, y, w)
            kr = riemann.sectional_curvature(rt, a_x, y, w)
            worst = max(worst, abs(kf - kr) / max(abs(kr), 1e-12))
            if name == "S3":
                quarter_worst = max(quarter_worst, abs(kf - 0.25))
    ok = worst < 1e-7 and quarter_worst < 1e-8
    _report("5 (Riemannian pipeline agreement + S^3 quarter)", ok, 300,
            time.time() - t0,
            f"max rel dev = {worst:.2e}, S3 |K-1/4| = {quarter_worst:.2e}")


# -- criterion 6 ----------------------------------------------------------------

def test_criterion_6_positive_case_certification():
    t0 = time.time()
    specs = [
        ("case1 n=1", {"space": {"case": 1, "n": 1}}),
        ("case1 n=2", {"space": {"case": 1, "n": 2}}),
        ("case3 n=1", {"space": {"case": 3, "n": 1}}),
        ("case6 (1,1)", {"space": {"case": 6, "k": 1, "l": 1}}),
        ("case7 torus", {"space": {"case": 7, "torus": [[1, 1, -2], [1, 0, 0]]}}),
    ]
    ok = True
    details = []
    for name, d in specs:
        d = dict(d)
        d["scan"] = {"flag_samples": 2000, "refine_iters": 15, "tol": 1e-8,
                     "s_rays": 400}
        d["seed"] = RNG_SEED + 4
        cfg = RunConfig.from_dict(d)
        best, rep = harness.cmd_search_metric(cfg)
        good = (best is not None and best["min_sectional"] > 0.0
                and best["min_flag_after_perturbation"] > 0.0
                and best["max_abs_s"] < 1e-8)
        ok = ok and good
        if best is None:
            details.append(f"{name}: not found")
        else:
            details.append(
                f"{name}: blocks={np.round(best['blocks'], 3).tolist()} "
                f"minK={best['min_sectional']:.4f} "
                f"minK_t={best['min_flag_after_perturbation']:.4f} "
                f"maxS={best['max_abs_s']:.1e}")
    _report("6 (positive-case certification)", ok, 1800, time.time() - t0,
            "; ".join(details))


# -- criterion 7 ----------------------------------------------------------------

def test_criterion_7_structural_classification():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 5)
    admissible = [(1, dict(n=1)), (1, dict(n=2)), (2, dict(n=1)), (2, dict(n=2)),
                  (3, dict(n=1)), (4, dict(n=1)), (6, dict(k=1, l=1)),
                  (6, dict(k=2, l=1)), (7, dict())]
    ok = True
    detail = ""
    for cid, kw in admissible:
        r = catalog.build_case(cid, **kw)
        assert r.admissible
        scal = list(rng.uniform(0.7, 1.3, size=len(r.blocks)))
        met = r.randers_metric(scal, 0.05)
        ks = homspace.k_subalgebra(met)  # closure + invariance, raises on failure
        if ks.ideal_dim > 1:
            ok = False
            detail += f" [case {cid}: ideal dim {ks.ideal_dim}]"
        alg = r.space.algebra
        h_rows = r.space.split.h_basis
        ideal_h = liealg.maximal_ideal_in(alg, h_rows) if h_rows.size \
            else np.zeros((0, alg.dim))
        if ideal_h.shape[0]:
            ok = False
            detail += f" [case {cid}: h contains an ideal]"
        rk_g = liealg.rank(alg)
        rk_h = liealg.rank(alg, subspace=h_rows) if h_rows.size else 0
        if not rk_g <= rk_h + 1:
            ok = False
            detail += f" [case {cid}: rank {rk_g} > {rk_h}+1]"
        _, var = homspace.submersion_ratio(met, samples=100, seed=RNG_SEED)
        if not var < 1e-8:
            ok = False
            detail += f" [case {cid}: submersion variance {var:.2e}]"
    # negative controls exclude exactly as the case list prescribes
    for cid in (5, 8, 9, 10):
        try:
            catalog.build_case(cid)
            ok = False
            detail += f" [case {cid} unexpectedly buildable]"
        except liealg.UnsupportedAlgebraError:
            pass
    if catalog.build_case(6, k=1, l=-1).admissible:
        ok = False
        detail += " [case 6 (1,-1) not excluded]"
    if catalog.build_case(7, torus=((1, -1, 0), (1, 0, -1))).admissible:
        ok = False
        detail += " [case 7 in SU(3) not excluded]"
    _report("7 (structural classification checks)", ok, 60, time.time() - t0,
            detail or "all admissible cases pass; controls excluded")
