"""Invariant (alpha,beta)-metric data on a coset space G/H and the
Lie-algebraic curvature machinery that lives at the origin coset:

  * closed-form homogeneous S-curvature,
  * the Killing-vector-of-constant-length (KVCL) criterion and its
    equivalence with vanishing S-curvature,
  * the enlarged subalgebra k = h + Rv and the submersion norm onto v-perp,
  * the U-tensor and the commuting-pair sectional curvature formula,
  * localization of the Finsler metric along its geodesic field, and the
    Randers perturbation F_t = alpha + t*beta.

All tangent data lives in m-coordinates of the reductive split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import minkowski
from .liealg import (LieAlgebra, ReductiveSplit, StructuralError, Subalgebra,
                     ad_invariance_check, maximal_ideal_in)
from .minkowski import ABNormData, PhiFunction, q_delta_phi

# The closed-form homogeneous S-curvature is accepted against the
# definitional (chart) S-curvature up to one global constant, measured once
# on su(2)/diag(1,2,3)/randers and frozen here.  The measured value is 1
# once the quadratic bracket term carries coefficient 1 rather than the
# beta-length b (the two agree in the b = 1 normalization; the definitional
# oracle fixes the general-b bookkeeping).  See the chart cross-checks.
SCURV_CALIBRATION = 1.0


@dataclass
class CosetSpace:
    """A coset space G/H presented through its reductive split."""

    algebra: LieAlgebra
    h: Subalgebra
    split: ReductiveSplit
    catalog_id: int = None
    label: str = ""

    def __post_init__(self):
        m = self.split.m_basis
        n = m.shape[0]
        # structure data of m: full bracket split into m- and h-parts
        self.struct_m = np.zeros((n, n, n))
        for i in range(n):
            for j in range(i + 1, n):
                z = self.algebra.bracket(m[i], m[j])
                zm = self.split.pr_m(z)
                self.struct_m[i, j] = zm
                self.struct_m[j, i] = -zm

    @property
    def dim(self):
        return self.split.dim_m

    def bracket_m(self, u, w):
        return np.einsum("i,j,ijk->k", u, w, self.struct_m)

    def ad_m(self, u):
        """Matrix of y -> [u, y]_m on m-coordinates."""
        return np.einsum("i,ijk->kj", u, self.struct_m)


@dataclass
class InvariantABMetric:
    """G-invariant (alpha,beta)-metric: inner product on m, dual vector v,
    and the profile function phi.  Invariance and positivity are enforced
    at construction."""

    space: CosetSpace
    inner: np.ndarray
    v: np.ndarray
    phi: PhiFunction

    def __post_init__(self):
        self.inner = np.asarray(self.inner, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        n = self.space.dim
        if self.inner.shape != (n, n) or self.v.shape != (n,):
            raise ValueError("metric data does not match dim m")
        if not np.any(self.v):
            raise ValueError("v = 0 means beta = 0; use a Riemannian metric instead")
        ok, worst = ad_invariance_check(self.inner, self.space.split)
        if not ok:
            raise StructuralError(f"inner product is not Ad(H)-invariant: {worst}")
        for hv in self.space.split.h_basis:
            z = self.space.algebra.bracket(hv, self.space.split.m_to_g(self.v))
            if np.max(np.abs(z), initial=0.0) > 1e-12:
                raise StructuralError("v is not Ad(H)-fixed: [h, v] != 0")
        ok, witness = minkowski.positivity_check(self.phi, self.b)
        if not ok:
            raise minkowski.InadmissibleNormError(
                f"positivity criterion fails at s={witness[0]}: {witness[1]}", witness)

    @property
    def b(self):
        return float(np.sqrt(self.v @ self.inner @ self.v))

    def norm_data(self):
        return ABNormData(self.inner, self.v, self.phi)

    def eval(self, y):
        return minkowski.ab_eval(self.norm_data(), y)

    def alpha(self, y):
        return float(np.sqrt(y @ self.inner @ y))

    def beta(self, y):
        return float(self.v @ self.inner @ y)

    def is_riemannian(self):
        return minkowski.is_riemannian_phi(self.phi, self.b, self.space.dim)


@dataclass
class RiemannianHomMetric:
    """G-invariant Riemannian metric: an Ad(H)-invariant inner product on m."""

    space: CosetSpace
    inner: np.ndarray

    def __post_init__(self):
        self.inner = np.asarray(self.inner, dtype=float)
        ok, worst = ad_invariance_check(self.inner, self.space.split)
        if not ok:
            raise StructuralError(f"inner product is not Ad(H)-invariant: {worst}")
        self._inv = np.linalg.inv(self.inner)

    def norm_data(self):
        # any nonzero v works formally; Riemannian phi ignores beta.  A unit
        # vector keeps the positivity check happy.
        v = np.zeros(self.space.dim)
        v[0] = 1.0 / np.sqrt(self.inner[0, 0])
        return ABNormData(self.inner, v, minkowski.phi_riemannian())


def s_curvature_hom(metric, y):
    """Closed-form S-curvature at the origin coset in direction y.

    S(eH, y) = -kappa/alpha(y) * Phi/(2 Delta^2) *
               (-<[v,y]_m, y> - alpha(y) Q <[v,y]_m, v>)
    with (Q, Delta, Phi) at s = beta(y)/alpha(y) and kappa the frozen
    calibration constant.  The bracket terms are the invariant realizations
    of r_00 and -2 s_0; their coefficients are pinned by the definitional
    (chart) S-curvature, which is the ground truth for this formula.
    """
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ValueError("S-curvature is undefined at y = 0")
    a = metric.alpha(y)
    s = metric.beta(y) / a
    b = metric.b
    n = metric.space.dim
    q, _, _, delta, big_phi = q_delta_phi(metric.phi, s, b, n)
    br = metric.space.bracket_m(metric.v, y)
    g = metric.inner
    term = -(br @ g @ y) - a * q * (br @ g @ metric.v)
    return -SCURV_CALIBRATION / a * big_phi / (2.0 * delta * delta) * term


def kvcl_check(metric, tol=1e-10):
    """Is the dual field of beta a Killing field of constant length?

    Linear-algebraic test: the symmetrized matrix of y -> <[v,y]_m, y> must
    vanish and the functional y -> <[v,y]_m, v> must vanish.  Returns
    (ok, witness); on failure the witness is the worst quadratic-form
    eigendirection or the functional vector.
    """
    adv = metric.space.ad_m(metric.v)
    g = metric.inner
    quad = adv.T @ g  # (i,j) entry is <[v,e_i]_m, e_j>
    sym = 0.5 * (quad + quad.T)
    lin = adv.T @ g @ metric.v
    worst_quad = float(np.max(np.abs(sym)))
    worst_lin = float(np.max(np.abs(lin)))
    if bool(worst_quad <= tol and worst_lin <= tol):
        return True, None
    if worst_quad > worst_lin:
        w, vecs = np.linalg.eigh(sym)
        idx = int(np.argmax(np.abs(w)))
        return False, ("quadratic", vecs[:, idx], float(w[idx]))
    return False, ("linear", lin / np.linalg.norm(lin), worst_lin)


def vanishing_s_equivalence(metric, samples=500, seed=7, s_tol=1e-8):
    """Check that sampled vanishing of the S-curvature agrees with the KVCL
    criterion (the two characterize each other for non-Riemannian invariant
    metrics).  Returns a small report dict."""
    if metric.is_riemannian():
        raise ValueError("the equivalence is stated for non-Riemannian metrics")
    rng = np.random.default_rng(seed)
    n = metric.space.dim
    max_s = 0.0
    for _ in range(samples):
        y = rng.standard_normal(n)
        y /= np.linalg.norm(y)
        max_s = max(max_s, abs(s_curvature_hom(metric, y)))
    kv_ok, witness = kvcl_check(metric)
    return {
        "max_abs_s": max_s,
        "s_vanishes": bool(max_s < s_tol),
        "kvcl": bool(kv_ok),
        "kvcl_witness": None if witness is None else witness[0],
        "equivalent": bool((max_s < s_tol) == kv_ok),
    }


@dataclass
class KSubalgebraResult:
    k_rows: np.ndarray            # (dim_h + 1, dim_g), orthonormal
    p_rows: np.ndarray            # (dim_m - 1, dim_m) in m-coordinates
    closure_defect: float
    invariance_defect: float
    ideal_dim: int


def k_subalgebra(metric, tol=1e-10):
    """The subalgebra k = h + Rv and the ad(k)-invariant complement p.

    Verifies bracket-closure of k, [k, p] in p, and ad(k)-skewness of the
    inner product restricted to p.  Requires the KVCL criterion to hold.
    """
    ok, _ = kvcl_check(metric)
    if not ok:
        raise StructuralError("k-subalgebra structure requires the KVCL criterion")
    space = metric.space
    alg = space.algebra
    v_g = space.split.m_to_g(metric.v)
    v_g = v_g / np.linalg.norm(v_g)
    k_rows = np.vstack([space.split.h_basis, v_g]) if space.split.h_basis.size \
        else v_g[None, :]
    # closure: [k, k] stays in span(k)
    perp = np.eye(alg.dim) - k_rows.T @ np.linalg.pinv(k_rows.T)
    closure = 0.0
    for i in range(k_rows.shape[0]):
        for j in range(i + 1, k_rows.shape[0]):
            z = alg.bracket(k_rows[i], k_rows[j])
            closure = max(closure, float(np.max(np.abs(perp @ z), initial=0.0)))
    if closure > 1e-12:
        raise StructuralError(f"h + Rv is not closed under the bracket ({closure:.2e})")
    # p = v-perp inside m w.r.t. the metric inner product
    g = metric.inner
    vm = metric.v
    p_rows = _inner_orthogonal_complement(vm[None, :], g)
    # [k, p] in p: residual outside p = inner-component along v plus any
    # h-leakage of the bracket
    invariance = 0.0
    for row in p_rows:
        y_g = space.split.m_to_g(row)
        for kv in k_rows:
            z = alg.bracket(kv, y_g)
            zm = space.split.pr_m(z)
            coef = (vm @ g @ zm) / (vm @ g @ vm)
            h_leak = float(np.max(np.abs(space.split.pr_h(z)), initial=0.0))
            invariance = max(invariance, abs(coef), h_leak)
    if invariance > tol:
        raise StructuralError(f"[k, p] leaves p ({invariance:.2e})")
    # ad(v)|p skew w.r.t. inner
    adv = space.ad_m(metric.v)
    sk = p_rows @ g @ adv @ p_rows.T
    skew_defect = float(np.max(np.abs(sk + sk.T)))
    if skew_defect > tol:
        raise StructuralError(f"ad(v) is not skew on p ({skew_defect:.2e})")
    ideal = maximal_ideal_in(alg, k_rows)
    return KSubalgebraResult(
        k_rows=k_rows,
        p_rows=p_rows,
        closure_defect=closure,
        invariance_defect=max(invariance, skew_defect),
        ideal_dim=int(ideal.shape[0]),
    )


def _inner_orthogonal_complement(rows, g):
    """Orthonormal (standard) basis of the g-orthogonal complement of rows."""
    _, s, vt = np.linalg.svd(rows @ g)
    rank = int(np.sum(s > 1e-12 * s[0]))
    return vt[rank:]


def submersion_norm(metric, w):
    """Induced norm on p: F'(w) = min_t F(w + t v), by 1-d minimization.

    The norm F is convex on m, so the fiber minimum is well defined.
    """
    w = np.asarray(w, dtype=float)
    if not np.any(w):
        raise ValueError("w must be nonzero")
    data = metric.norm_data()

    def along(t):
        return minkowski.ab_eval(data, w + t * metric.v)

    # the minimizer satisfies |t| b <= (1 + M/m) alpha(w) with M/m the
    # ellipticity ratio of F vs alpha; 10 is safely above it for all families
    width = 10.0 * metric.alpha(w) / metric.b + 1.0
    res = minimize_scalar(along, bounds=(-width, width), method="bounded",
                          options={"xatol": 1e-12})
    if not res.success:
        raise ArithmeticError("fiber minimization did not converge")
    return float(res.fun)


def submersion_ratio(metric, samples=100, seed=3):
    """F'(w) / alpha|_p(w) over random w in p; returns (mean, variance)."""
    ks = k_subalgebra(metric)
    rng = np.random.default_rng(seed)
    g = metric.inner
    ratios = []
    for _ in range(samples):
        c = rng.standard_normal(ks.p_rows.shape[0])
        w = c @ ks.p_rows
        ratios.append(submersion_norm(metric, w) / np.sqrt(w @ g @ w))
    ratios = np.asarray(ratios)
    return float(ratios.mean()), float(ratios.var())


def u_tensor(metric, u1, u2):
    """U(u1, u2) in m defined by
    <U(u1,u2), u3> = 1/2 (<[u3,u1]_m, u2> + <[u3,u2]_m, u1>) for all u3."""
    space = metric.space
    g = metric.inner
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    n = space.dim
    rhs = np.empty(n)
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        rhs[k] = 0.5 * (space.bracket_m(e, u1) @ g @ u2
                        + space.bracket_m(e, u2) @ g @ u1)
    return np.linalg.solve(g, rhs)


def commuting_pair_sectional(metric, v1, v1p, tol=1e-12):
    """Sectional curvature of an invariant Riemannian metric on the plane of
    a linearly independent commuting pair:
    <R(v1,v1')v1', v1> = |U(v1,v1')|^2 - <U(v1,v1), U(v1',v1')>."""
    space = metric.space
    v1 = np.asarray(v1, dtype=float)
    v1p = np.asarray(v1p, dtype=float)
    if np.max(np.abs(space.bracket_m(v1, v1p))) > tol or \
            np.max(np.abs(space.algebra.bracket(space.split.m_to_g(v1),
                                                space.split.m_to_g(v1p)))) > tol:
        raise ValueError("the pair does not commute; the formula does not apply")
    g = metric.inner
    gram = (v1 @ g @ v1) * (v1p @ g @ v1p) - (v1 @ g @ v1p) ** 2
    if gram <= tol:
        raise ValueError("the pair is not linearly independent")
    u12 = u_tensor(metric, v1, v1p)
    u11 = u_tensor(metric, v1, v1)
    u22 = u_tensor(metric, v1p, v1p)
    num = u12 @ g @ u12 - u11 @ g @ u22
    return float(num / gram)


def localize_gv(metric):
    """Riemannian metric g_V: the fundamental tensor of F at y = v.

    Only meaningful when v generates a geodesic field, i.e. the KVCL
    criterion holds.
    """
    ok, _ = kvcl_check(metric)
    if not ok:
        raise StructuralError("localization requires the KVCL criterion (geodesic field)")
    tensor = minkowski.hessian(metric.norm_data(), metric.v)
    return RiemannianHomMetric(space=metric.space, inner=tensor.g)


def randers_perturb(alpha_metric, v, t):
    """F_t = alpha + t * beta with beta the alpha-dual form of v.

    Realized as the Randers profile phi(s) = 1 + t s over alpha; the
    constructor's positivity check rejects t |v|_alpha >= 1.
    """
    v = np.asarray(v, dtype=float)
    phi = minkowski.phi_randers(float(t)) if t != 0.0 else minkowski.phi_riemannian()
    return InvariantABMetric(space=alpha_metric.space, inner=alpha_metric.inner,
                             v=v, phi=phi)
