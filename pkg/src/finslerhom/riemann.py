"""Independent Riemannian curvature pipeline from a metric component field.

Given a callable x -> metric matrix (jet-transparent), this computes
Christoffel symbols and the full curvature tensor by straight coordinate
differentiation.  It never touches the Finsler spray machinery, so it serves
as the cross-check oracle for the chart pipeline on Riemannian metrics and
for geodesic-field localization comparisons.
"""

from __future__ import annotations

import numpy as np

from .jets import JetSpace
from .linalg import lu_solve_generic


def christoffel_and_curvature(field, x0):
    """Christoffel symbols and curvature tensor of `field` at x0.

    `field(x_jets)` must return an (n, n) object array of jets (or floats)
    in the space of its arguments.  Returns (gamma, rtensor) with
    gamma[i,j,k] = Gamma^i_jk and rtensor[i,k,j,l] the coefficient of the
    curvature operator R(e_j, e_l)e_k in direction e_i.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.shape[0]
    space2 = JetSpace.total_degree(n, 2)
    xj = space2.seed(x0)
    a2 = np.asarray(field(xj), dtype=object)

    a1 = np.empty((n, n), dtype=object)
    da = np.empty((n, n, n), dtype=object)  # da[j][l,k] = order-1 jet of d_j a_lk
    for l in range(n):
        for k in range(n):
            a1[l, k] = a2[l, k].truncated(1)
            for j in range(n):
                da[j, l, k] = a2[l, k].partial_jet(j)

    eye = np.empty((n, n), dtype=object)
    sp1 = a1[0, 0].space
    for i in range(n):
        for j in range(n):
            eye[i, j] = sp1.const(1.0 if i == j else 0.0)
    ainv = lu_solve_generic(a1, eye)

    gamma_j = np.empty((n, n, n), dtype=object)  # order-1 jets of Gamma^i_jk
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                acc = sp1.const(0.0)
                for l in range(n):
                    acc = acc + ainv[i, l] * (da[j, l, k] + da[k, j, l] - da[l, j, k])
                acc = acc * 0.5
                gamma_j[i, j, k] = acc
                gamma_j[i, k, j] = acc

    gamma = np.empty((n, n, n))
    dgamma = np.empty((n, n, n, n))  # dgamma[m,i,j,k] = d_m Gamma^i_jk
    for i in range(n):
        for j in range(n):
            for k in range(n):
                gamma[i, j, k] = gamma_j[i, j, k].value
                for m in range(n):
                    dgamma[m, i, j, k] = gamma_j[i, j, k].d(m)

    # R(e_j, e_l) e_k = (d_j Gamma^i_lk - d_l Gamma^i_jk
    #                    + Gamma^i_jm Gamma^m_lk - Gamma^i_lm Gamma^m_jk) e_i
    rtensor = (np.einsum("jilk->ikjl", dgamma)
               - np.einsum("lijk->ikjl", dgamma)
               + np.einsum("ijm,mlk->ikjl", gamma, gamma)
               - np.einsum("ilm,mjk->ikjl", gamma, gamma))
    return gamma, rtensor


def jacobi_operator(rtensor, y):
    """Matrix of w -> R(w, y)y, acting on coordinate vectors."""
    return np.einsum("ikjl,k,l->ij", rtensor, y, y)


def sectional_curvature(rtensor, g, y, w):
    """Sectional curvature of the plane spanned by (y, w)."""
    ry = jacobi_operator(rtensor, y)
    num = w @ g @ ry @ w
    den = (y @ g @ y) * (w @ g @ w) - (y @ g @ w) ** 2
    return float(num / den)


def sectional_batch(rtensor, g, ys, ws):
    """Vectorized sectional curvatures for flag batches (rows of ys, ws)."""
    ry_w = np.einsum("ikjl,sk,sl,sj->si", rtensor, ys, ys, ws)
    num = np.einsum("si,ij,sj->s", ry_w, g, ws)
    yy = np.einsum("si,ij,sj->s", ys, g, ys)
    ww = np.einsum("si,ij,sj->s", ws, g, ws)
    yw = np.einsum("si,ij,sj->s", ys, g, ws)
    return num / (yy * ww - yw * yw)


def min_sectional_scan(rtensor, g, samples, seed=0):
    """Minimum sampled sectional curvature over `samples` random planes.

    Deterministic for a fixed seed; returns (min value, argmin pair).
    """
    n = g.shape[0]
    rng = np.random.default_rng(seed)
    ys = rng.standard_normal((samples, n))
    ws = rng.standard_normal((samples, n))
    ys /= np.linalg.norm(ys, axis=1, keepdims=True)
    ws -= ys * np.einsum("si,si->s", ws, ys)[:, None]
    good = np.linalg.norm(ws, axis=1) > 1e-8
    ys, ws = ys[good], ws[good]
    ws /= np.linalg.norm(ws, axis=1, keepdims=True)
    ks = sectional_batch(rtensor, g, ys, ws)
    idx = int(np.argmin(ks))
    return float(ks[idx]), (ys[idx], ws[idx])
