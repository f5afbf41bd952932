"""Deterministic minimization of scalar objectives over the flag set.

A flag is a unit pole y together with a unit transverse edge w (not parallel
to y).  The search is quasi-random Sobol sampling over the product of the two
spheres followed by per-coordinate descent with a shrinking step; identical
seeds give identical results, including the reduction order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfinv
from scipy.stats import qmc


@dataclass(frozen=True)
class MinimizerConfig:
    samples: int = 2048
    refine_iters: int = 60
    tol: float = 1e-10
    seed: int = 0


def _to_sphere(u):
    z = np.sqrt(2.0) * erfinv(np.clip(2.0 * u - 1.0, -1 + 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(z, axis=-1, keepdims=True)
    return z / norms


def sample_flags(dimension, samples, seed):
    """Quasi-random flags (ys, ws) with ws not parallel to ys."""
    sob = qmc.Sobol(d=2 * dimension, scramble=True, seed=seed)
    m = int(np.ceil(np.log2(max(samples, 2))))
    pts = sob.random(2 ** m)[:samples]
    ys = _to_sphere(pts[:, :dimension])
    ws = _to_sphere(pts[:, dimension:])
    dots = np.einsum("si,si->s", ys, ws)
    bad = np.abs(dots) > 1.0 - 1e-8
    if np.any(bad):
        ws[bad] = np.roll(ws[bad], 1, axis=1)
    return ys, ws


def minimize_over_flags(objective, dimension, config=MinimizerConfig()):
    """Smallest sampled-and-refined objective value with its argmin flag.

    `objective(y, w)` must be defined for every flag; the refinement keeps
    flags non-degenerate.  Returns (value, (y, w)).
    """
    if dimension < 2:
        raise ValueError("flags need dimension >= 2 (no 2-planes otherwise)")
    ys, ws = sample_flags(dimension, config.samples, config.seed)
    vals = np.array([objective(y, w) for y, w in zip(ys, ws)])
    order = np.argsort(vals, kind="stable")
    best_val = float(vals[order[0]])
    best_flag = (ys[order[0]].copy(), ws[order[0]].copy())
    for idx in order[: min(4, len(order))]:
        val, flag = _refine(objective, ys[idx].copy(), ws[idx].copy(),
                            float(vals[idx]), config)
        if val < best_val:
            best_val, best_flag = val, flag
    return best_val, best_flag


def _refine(objective, y, w, val, config):
    n = y.shape[0]
    step = 0.25
    for _ in range(config.refine_iters):
        improved = False
        for which in (0, 1):
            for k in range(n):
                for sgn in (1.0, -1.0):
                    cand = (y if which == 0 else w).copy()
                    cand[k] += sgn * step
                    cand /= np.linalg.norm(cand)
                    if abs(np.dot(cand, w if which == 0 else y)) > 1.0 - 1e-8:
                        continue
                    trial = objective(cand, w) if which == 0 else objective(y, cand)
                    if trial < val - 1e-16:
                        val = trial
                        if which == 0:
                            y = cand
                        else:
                            w = cand
                        improved = True
                        break
        if not improved:
            step *= 0.5
            if step < config.tol:
                break
    return float(val), (y, w)
