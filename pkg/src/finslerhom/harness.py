"""Orchestration behind the CLI: catalog listing, per-case verification,
metric search, oracle cross-checks and flag scans.

Positivity verdicts are sampled statements: every report carries the budget
that produced them.  Curvature scans run at the origin coset only, which the
transport-invariance cross-checks justify for invariant metrics.
"""

from __future__ import annotations

import csv
import os
import time

import numpy as np

from . import catalog as cat
from . import chartcurv, homspace, liealg, minkowski, plots, riemann
from .flags import MinimizerConfig, minimize_over_flags, sample_flags
from .report import CurvatureReport, RunConfig


class StructuralRejection(RuntimeError):
    """Case rejected before any numerics (catalog exclusion or bad config)."""


# -- construction from config --------------------------------------------------

def build_realization(cfg):
    sp = cfg.space
    torus = tuple(tuple(t) for t in sp.torus) if sp.torus else None
    try:
        return cat.build_case(sp.case, n=sp.n, k=sp.k, l=sp.l, torus=torus)
    except liealg.UnsupportedAlgebraError as e:
        raise StructuralRejection(str(e)) from e


def build_metric(cfg, realization):
    blocks = list(cfg.metric.blocks)[: len(realization.blocks)]
    if len(blocks) < len(realization.blocks):
        blocks = blocks + [1.0] * (len(realization.blocks) - len(blocks))
    inner = realization.block_inner(blocks)
    if cfg.metric.v == "m0":
        v = realization.v
    else:
        v = np.asarray(cfg.metric.v, dtype=float)
    phi = cfg.phi_function()
    return homspace.InvariantABMetric(realization.space, inner, v, phi)


# -- scans ---------------------------------------------------------------------

def s_scan(metric, rays, seed):
    """max |S| over random rays of the closed-form homogeneous S-curvature."""
    rng = np.random.default_rng(seed)
    n = metric.space.dim
    worst = 0.0
    vals = np.empty(rays)
    for i in range(rays):
        y = rng.standard_normal(n)
        y /= np.linalg.norm(y)
        vals[i] = homspace.s_curvature_hom(metric, y)
        worst = max(worst, abs(vals[i]))
    return worst, vals


def pole_flag_scan(chart, metric, poles, seed, refine_iters=20):
    """Minimum flag curvature at the origin: quasi-random poles, exact edge
    minimization per pole, then coordinate-descent refinement of the worst
    pole.  Returns (min K, pole, edge, all sampled minima)."""
    n = chart.dim
    ys, _ = sample_flags(n, poles, seed)
    vals = np.empty(len(ys))
    edges = []
    for i, y in enumerate(ys):
        vals[i], w = chartcurv.min_flag_curvature_at_pole(chart, metric, y)
        edges.append(w)
    best = int(np.argmin(vals))
    val, y = float(vals[best]), ys[best].copy()
    w = edges[best]
    step = 0.2
    for _ in range(refine_iters):
        improved = False
        for k in range(n):
            for sgn in (1.0, -1.0):
                cand = y.copy()
                cand[k] += sgn * step
                cand /= np.linalg.norm(cand)
                trial, tw = chartcurv.min_flag_curvature_at_pole(chart, metric, cand)
                if trial < val - 1e-16:
                    val, y, w = trial, cand, tw
                    improved = True
                    break
        if not improved:
            step *= 0.5
            if step < 1e-6:
                break
    return val, y, w, vals


def riemannian_tensor(realization, inner):
    """Curvature tensor of an invariant Riemannian metric at the origin."""
    chart = chartcurv.ChartContext(realization.space)
    field = chartcurv.riemannian_metric_field(chart, inner)
    _, rt = riemann.christoffel_and_curvature(field, np.zeros(realization.dim))
    return rt


# -- commands -------------------------------------------------------------------

def cmd_catalog():
    """The ten classification cases with admissibility and exclusions."""
    return [c.to_dict() for c in cat.catalog()]


def cmd_verify_case(cfg):
    """Structural checks, the S-curvature criterion, and curvature scans for
    one configured case; returns a CurvatureReport."""
    t0 = time.time()
    realization = build_realization(cfg)
    if not realization.admissible:
        if realization.case_id == 7 or not cfg.negative_control:
            raise StructuralRejection(
                f"{realization.label}: catalog exclusion"
                + ("" if cfg.negative_control else
                   " (pass negative_control to run zero-flag controls)"))
    metric = build_metric(cfg, realization)
    rep = CurvatureReport(case=realization.label, config=cfg.to_dict())
    rep.add_check("admissible", realization.admissible,
                  negative_control=cfg.negative_control)

    # structural layer
    ks = None
    try:
        ks = homspace.k_subalgebra(metric)
        rep.add_check("k_closure_and_invariance", True,
                      closure_defect=ks.closure_defect,
                      invariance_defect=ks.invariance_defect)
    except liealg.StructuralError as e:
        rep.add_check("k_closure_and_invariance", False, error=str(e))

    alg = realization.space.algebra
    h_rows = realization.space.split.h_basis
    ideal_h = liealg.maximal_ideal_in(alg, h_rows) if h_rows.size else np.zeros((0, alg.dim))
    g_eff = _orth_complement_rows(ideal_h, alg.dim)
    h_eff = _rows_minus(h_rows, ideal_h)
    rk_g = liealg.rank(alg, subspace=g_eff)
    rk_h = liealg.rank(alg, subspace=h_eff) if h_eff.shape[0] else 0
    rep.add_check("rank_inequality", rk_g <= rk_h + 1, rk_g=rk_g, rk_h=rk_h)

    if ks is not None:
        rep.add_check("maximal_ideal_dim", ks.ideal_dim <= 1, dim=ks.ideal_dim)

    ok, witness = homspace.kvcl_check(metric)
    rep.add_check("kvcl", ok, witness=None if ok else witness[0])

    if not metric.is_riemannian():
        pr = homspace.vanishing_s_equivalence(metric, samples=cfg.scan.s_rays,
                                              seed=cfg.seed)
        rep.add_check("s_vanishing_equivalence", pr["equivalent"],
                      max_abs_s=pr["max_abs_s"], kvcl=pr["kvcl"])
    else:
        rep.add_check("s_vanishing_equivalence", True, skipped="Riemannian metric")

    if ks is not None:
        mean, var = homspace.submersion_ratio(metric, samples=100, seed=cfg.seed)
        rep.add_check("submersion_ratio_constant", var < 1e-8,
                      ratio=mean, variance=var)

    worst_s, s_vals = s_scan(metric, cfg.scan.s_rays, cfg.seed)
    rep.s_curvature = {"max_abs": worst_s, "rays": cfg.scan.s_rays}
    rep.add_check("vanishing_s_curvature", worst_s < cfg.scan.tol, max_abs=worst_s)

    chart = chartcurv.ChartContext(realization.space)
    poles = max(8, cfg.scan.flag_samples // 25)
    kmin, y, w, sampled = pole_flag_scan(chart, metric, poles, cfg.seed,
                                         cfg.scan.refine_iters)
    rep.flag_scan = {"min": kmin, "argmin_y": y, "argmin_w": w,
                     "poles": poles,
                     "note": f"{poles} poles, exact edge minimum per pole"}
    # a refined minimum at round-off scale is a flat plane, not positivity
    rep.add_check("positive_flag_curvature", kmin > cfg.scan.tol, min=kmin,
                  qualified_by_budget=f"{poles} poles at the origin, "
                                      f"threshold {cfg.scan.tol}")

    rep.finalize(time.time() - t0)
    if cfg.out:
        write_outputs(cfg.out, rep, flag_samples=sampled, s_samples=s_vals)
    return rep


def _orth_complement_rows(rows, dim):
    if rows.size == 0:
        return np.eye(dim)
    _, s, vt = np.linalg.svd(rows)
    rank = int(np.sum(s > 1e-10))
    return vt[rank:]


def _rows_minus(rows, drop):
    """Orthonormal basis of rows' span minus drop's span."""
    if rows.size == 0:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    if drop.size == 0:
        return rows
    proj = rows - (rows @ drop.T) @ drop
    q, r = np.linalg.qr(proj.T)
    keep = np.abs(np.diag(r)) > 1e-10
    return q.T[keep]


def cmd_search_metric(cfg):
    """Grid-plus-refinement over block scalars for positive sectional
    curvature, then a Randers perturbation with vanishing S-curvature."""
    t0 = time.time()
    realization = build_realization(cfg)
    if not realization.admissible:
        raise StructuralRejection(f"{realization.label}: catalog exclusion")
    nblocks = len(realization.blocks)
    grid = [0.2, 0.35, 0.5, 0.7, 0.85, 1.0]
    candidates = _block_grid(nblocks, grid)
    sampled = []
    n = realization.dim
    mc = MinimizerConfig(samples=min(cfg.scan.flag_samples, 4096),
                         refine_iters=cfg.scan.refine_iters, seed=cfg.seed)
    for scal in candidates:
        inner = realization.block_inner(scal)
        rt = riemannian_tensor(realization, inner)
        kmin, _ = riemann.min_sectional_scan(rt, inner, cfg.scan.flag_samples,
                                             seed=cfg.seed)
        sampled.append((kmin, scal, rt, inner))
    sampled.sort(key=lambda t: -t[0])
    best = None
    for kmin, scal, rt, inner in sampled[:3]:
        if kmin <= cfg.scan.tol:
            continue

        def obj(y, w, _rt=rt, _g=inner):
            return riemann.sectional_curvature(_rt, _g, y, w)

        refined, flag = minimize_over_flags(obj, n, mc)
        if best is None or refined > best["min_sectional"]:
            best = {"blocks": list(scal), "min_sectional": refined,
                    "sampled_min": kmin, "argmin_flag": [flag[0], flag[1]]}
    rep = CurvatureReport(case=realization.label, config=cfg.to_dict())
    if best is None or best["min_sectional"] <= cfg.scan.tol:
        rep.add_check("positive_riemannian_candidate", False,
                      budget=f"{len(candidates)} grid points x "
                             f"{cfg.scan.flag_samples} flags",
                      note="not found within budget; no nonexistence claim")
        rep.finalize(time.time() - t0)
        return None, rep
    rep.add_check("positive_riemannian_candidate", True,
                  blocks=best["blocks"], min_sectional=best["min_sectional"],
                  budget=f"{len(candidates)} grid points x "
                         f"{cfg.scan.flag_samples} flags + refinement")

    # Randers perturbation of the winning metric
    inner = realization.block_inner(best["blocks"])
    alpha = homspace.RiemannianHomMetric(realization.space, inner)
    v = realization.v
    b = float(np.sqrt(v @ inner @ v))
    t_pert = 0.05 / b
    finsler = homspace.randers_perturb(alpha, v, t_pert)
    worst_s, s_vals = s_scan(finsler, cfg.scan.s_rays, cfg.seed)
    chart = chartcurv.ChartContext(realization.space)
    poles = max(8, min(cfg.scan.flag_samples, 2000) // 25)
    kmin_f, y, w, flag_vals = pole_flag_scan(chart, finsler, poles, cfg.seed,
                                             cfg.scan.refine_iters)
    best.update({"randers_t": t_pert, "min_flag_after_perturbation": kmin_f,
                 "max_abs_s": worst_s})
    rep.add_check("randers_perturbation_positive", kmin_f > cfg.scan.tol,
                  t=t_pert, min_flag=kmin_f,
                  qualified_by_budget=f"{poles} poles at the origin, "
                                      f"threshold {cfg.scan.tol}")
    rep.add_check("randers_perturbation_vanishing_s", worst_s < cfg.scan.tol,
                  max_abs_s=worst_s)
    rep.flag_scan = {"min": kmin_f, "argmin_y": y, "argmin_w": w, "poles": poles,
                     "note": "perturbed metric"}
    rep.s_curvature = {"max_abs": worst_s, "rays": cfg.scan.s_rays}
    rep.finalize(time.time() - t0)
    if cfg.out:
        write_outputs(cfg.out, rep, flag_samples=flag_vals, s_samples=s_vals)
    return best, rep


def _block_grid(nblocks, grid):
    """Scalar grids with the last block pinned to 1 (global scale is gauge)."""
    if nblocks == 1:
        return [[1.0]]
    out = [[]]
    for _ in range(nblocks - 1):
        out = [c + [g] for c in out for g in grid]
    return [c + [1.0] for c in out]


def cmd_crosscheck(cfg=None):
    """Run the oracle suites over the built-in case set; returns the table of
    max residuals (all should sit below 1e-6)."""
    cfg = cfg or RunConfig()
    enable = set(cfg.oracle.enable)
    res = {}
    if "hom_vs_chart" in enable:
        res["hom_vs_chart_su2"] = _hom_vs_chart_su2()
        res["hom_vs_chart_s11"] = _hom_vs_chart_s11()
    if "localization" in enable:
        res["localization_su2"] = _localization_su2()
        res["localization_s11"] = _localization_s11()
    if "commuting_pair" in enable:
        res["zero_flag_su3_u1"] = _zero_flag_residual(6)
        res["zero_flag_u3_t2"] = _zero_flag_residual(7)
    if "riemannian_pipeline" in enable:
        res["riemannian_pipeline"] = _riemannian_pipeline_residual()
        res["abelian_torus"] = _abelian_residual()
    return res


def _su2_testbed():
    r = cat.build_case(1, n=1)
    # cyclic basis (X1, X2, X3) = (m indices 1, 2, 0): diag(1,2,3) there
    inner = np.diag([3.0, 1.0, 2.0])
    v = np.array([0.0, 1.0, 0.0])
    met = homspace.InvariantABMetric(r.space, inner, v, minkowski.phi_randers(0.3))
    return r, chartcurv.ChartContext(r.space), met


def _s11_testbed():
    """S_{1,1} with a KVCL-violating dual vector (m0/m1 mixture is Ad(H)-fixed
    there) so the S-curvature is genuinely nonzero."""
    r = cat.build_case(6, k=1, l=1)
    inner = r.block_inner([1.0, 0.8, 1.2, 0.9])
    v = np.zeros(7)
    v[0] = 0.8
    v[1] = 0.5  # inside the ad(h)-fixed root plane
    met = homspace.InvariantABMetric(r.space, inner, v, minkowski.phi_randers(0.2))
    return r, chartcurv.ChartContext(r.space), met


def _hom_vs_chart_residual(chart, met, points, seed, radius=0.25):
    rng = np.random.default_rng(seed)
    n = chart.dim
    chart_vals = np.empty(points)
    hom_vals = np.empty(points)
    for i in range(points):
        x = radius * rng.uniform(0.2, 1.0) * _unit(rng, n)
        y = rng.standard_normal(n)
        chart_vals[i] = chartcurv.s_curvature_chart(chart, met, x, y)
        hom_vals[i] = homspace.s_curvature_hom(met, chart.transport(x) @ y)
    scale = max(np.max(np.abs(hom_vals)), 1e-300)
    return float(np.max(np.abs(chart_vals - hom_vals)) / scale)


def _hom_vs_chart_su2(points=8, seed=21):
    r, chart, met = _su2_testbed()
    return _hom_vs_chart_residual(chart, met, points, seed)


def _hom_vs_chart_s11(points=4, seed=22):
    r, chart, met = _s11_testbed()
    return _hom_vs_chart_residual(chart, met, points, seed)


def _localization_su2():
    r = cat.build_case(1, n=1)
    met = homspace.InvariantABMetric(r.space, np.eye(3), np.array([1.0, 0, 0]),
                                     minkowski.phi_randers(0.2))
    chart = chartcurv.ChartContext(r.space)
    return chartcurv.riemannian_localization_check(chart, met, points=6, seed=31)


def _localization_s11():
    r = cat.build_case(6, k=1, l=1)
    met = r.randers_metric([1.0, 0.8, 1.2, 0.9], 0.1)
    chart = chartcurv.ChartContext(r.space)
    return chartcurv.riemannian_localization_check(chart, met, points=4, seed=32)


def _zero_flag_residual(case_id):
    if case_id == 6:
        r = cat.build_case(6, k=1, l=-1)
    else:
        r = cat.build_case(7, torus=((1, -1, 0), (1, 0, 0)))
    met = r.randers_metric([1.0, 0.7, 1.3, 0.9], 0.1)
    chart = chartcurv.ChartContext(r.space)
    vp = np.zeros(7)
    vp[1] = 1.0
    k_chart = chartcurv.flag_curvature(chart, met, np.zeros(7), r.v, vp)
    k_pair = homspace.commuting_pair_sectional(homspace.localize_gv(met), r.v, vp)
    return float(max(abs(k_chart), abs(k_pair)))


def _riemannian_pipeline_residual(flags_per_space=6, seed=41):
    worst = 0.0
    cases = [cat.build_case(1, n=1), cat.build_case(1, n=2),
             cat.build_case(6, k=1, l=1)]
    rng = np.random.default_rng(seed)
    for r in cases:
        inner = realization_default_inner(r)
        met = homspace.InvariantABMetric(r.space, inner, r.v,
                                         minkowski.phi_riemannian())
        chart = chartcurv.ChartContext(r.space)
        rt = riemannian_tensor(r, inner)
        n = r.dim
        for _ in range(flags_per_space):
            y = _unit(rng, n)
            w = _unit(rng, n)
            if abs(y @ w) > 1.0 - 1e-6:
                continue
            k_f = chartcurv.flag_curvature(chart, met, np.zeros(n), y, w)
            k_r = riemann.sectional_curvature(rt, inner, y, w)
            worst = max(worst, abs(k_f - k_r) / max(abs(k_r), 1e-12))
    return worst


def realization_default_inner(r):
    scal = [1.0, 0.8, 1.1, 0.9][: len(r.blocks)]
    scal += [1.0] * (len(r.blocks) - len(scal))
    return r.block_inner(scal)


def _abelian_residual():
    alg = liealg.build_algebra("u", 1, abelian=2)
    h = liealg.Subalgebra(alg, np.zeros((0, 3)))
    split = liealg.reductive_split(alg, h)
    space = homspace.CosetSpace(alg, h, split, label="T^3")
    met = homspace.InvariantABMetric(space, np.eye(3), np.array([1.0, 0, 0]),
                                     minkowski.phi_randers(0.3))
    chart = chartcurv.ChartContext(space)
    x = np.array([0.2, -0.1, 0.3])
    y = np.array([0.4, 1.0, -0.3])
    w = np.array([1.0, 0.2, 0.1])
    rop = chartcurv.riemann_op(chart, met, x, y)
    worst = float(np.max(np.abs(rop.matrix)))
    worst = max(worst, abs(chartcurv.s_curvature_chart(chart, met, x, y)))
    gv, _, _ = chartcurv.spray_values(chart, met, x, y)
    worst = max(worst, float(np.max(np.abs(gv))))
    return worst


def _unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def cmd_scan(cfg):
    """Sample flag curvatures and S-curvature rays for one configured metric,
    writing CSV and figures when an output directory is set."""
    t0 = time.time()
    realization = build_realization(cfg)
    metric = build_metric(cfg, realization)
    chart = chartcurv.ChartContext(realization.space)
    poles = max(8, cfg.scan.flag_samples // 25)
    kmin, y, w, sampled = pole_flag_scan(chart, metric, poles, cfg.seed,
                                         cfg.scan.refine_iters)
    worst_s, s_vals = s_scan(metric, cfg.scan.s_rays, cfg.seed)
    rep = CurvatureReport(case=realization.label, config=cfg.to_dict())
    rep.flag_scan = {"min": kmin, "argmin_y": y, "argmin_w": w, "poles": poles,
                     "note": f"{poles} poles, exact edge minimum per pole"}
    rep.s_curvature = {"max_abs": worst_s, "rays": cfg.scan.s_rays}
    rep.add_check("scan_completed", True, poles=poles, rays=cfg.scan.s_rays)
    rep.finalize(time.time() - t0)
    if cfg.out:
        write_outputs(cfg.out, rep, flag_samples=sampled, s_samples=s_vals)
    return rep


def write_outputs(out_dir, rep, flag_samples=None, s_samples=None):
    """Report JSON + text, delimited sample tables, and figures."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as f:
        f.write(rep.to_json() + "\n")
    with open(os.path.join(out_dir, "report.txt"), "w") as f:
        f.write(rep.to_text() + "\n")
    if flag_samples is not None and len(flag_samples):
        path = os.path.join(out_dir, "flag_minima.csv")
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["sample", "min_flag_curvature"])
            for i, v in enumerate(np.asarray(flag_samples)):
                wr.writerow([i, repr(float(v))])
        plots.flag_curvature_figure(np.asarray(flag_samples),
                                    os.path.join(out_dir, "flag_curvature.png"),
                                    title=f"{rep.case}: per-pole minimum flag curvature")
    if s_samples is not None and len(s_samples):
        path = os.path.join(out_dir, "s_curvature.csv")
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["sample", "s_curvature"])
            for i, v in enumerate(np.asarray(s_samples)):
                wr.writerow([i, repr(float(v))])
        plots.s_curvature_figure(np.asarray(s_samples),
                                 os.path.join(out_dir, "s_curvature.png"),
                                 title=f"{rep.case}: |S| over sampled rays")
    if rep.residuals:
        plots.residual_figure(rep.residuals,
                              os.path.join(out_dir, "residuals.png"))
