"""Minkowski norms of (alpha,beta) type on a finite-dimensional vector space.

F(y) = alpha(y) * phi(beta(y)/alpha(y)) with alpha an inner-product norm,
beta a linear form (alpha-dual vector v), and phi one of a small family of
profile functions.  Provides evaluation, the fundamental tensor, the
positive-definiteness criterion, and the Q / Delta / Phi auxiliaries that
drive the closed-form S-curvature and the Riemannian-detection test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jets import Jet, JetSpace, jsqrt


class InadmissibleNormError(ValueError):
    """The norm fails positive-definiteness at some direction."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class SingularPhiError(ArithmeticError):
    """phi - s*phi' vanished; Q and the S-curvature formula degenerate there."""


@dataclass(frozen=True)
class PhiFunction:
    """Profile function phi of an (alpha,beta)-norm.

    Families: 'riemannian' (phi == 1), 'randers' (1 + eps*s),
    'sqrt_quadratic' (sqrt(1+s^2)), 'polynomial' (coefficient list, low
    degree first).  `scale` pre-scales the argument, which is how beta
    rescalings are absorbed without changing the metric.
    """

    family: str
    eps: float = 0.0
    coeffs: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in ("riemannian", "randers", "sqrt_quadratic", "polynomial"):
            raise ValueError(f"unknown phi family {self.family!r}")
        if self.family == "polynomial" and not self.coeffs:
            raise ValueError("polynomial family needs coefficients")

    def __call__(self, s):
        """Evaluate phi; works on floats, arrays and jets."""
        z = s * self.scale
        if self.family == "riemannian":
            return 1.0 + 0.0 * z
        if self.family == "randers":
            return 1.0 + self.eps * z
        if self.family == "sqrt_quadratic":
            return jsqrt(1.0 + z * z)
        acc = 0.0 * z + self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc

    def derivatives(self, s, order=3):
        """phi and its first `order` derivatives at a float s, via jets."""
        space = JetSpace.total_degree(1, order)
        (sj,) = space.seed(np.array([float(s)]))
        out = self(sj)
        if not isinstance(out, Jet):  # constant family
            return [float(out)] + [0.0] * order
        return [out.partial((k,)) for k in range(order + 1)]

    def rescaled(self, factor):
        """phi(factor * s) as a new PhiFunction."""
        return PhiFunction(self.family, self.eps, self.coeffs, self.scale * factor)


def phi_riemannian():
    return PhiFunction("riemannian")


def phi_randers(eps):
    return PhiFunction("randers", eps=eps)


def phi_sqrt_quadratic():
    return PhiFunction("sqrt_quadratic")


def phi_polynomial(coeffs):
    return PhiFunction("polynomial", coeffs=tuple(float(c) for c in coeffs))


@dataclass
class ABNormData:
    """Defining data of an (alpha,beta)-norm on R^n.

    `a` is the SPD matrix of alpha, `v` the alpha-dual of beta.  The beta
    length b is always recomputed from (a, v), never stored.
    """

    a: np.ndarray
    v: np.ndarray
    phi: PhiFunction

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.a.shape[0] != self.a.shape[1] or self.a.shape[0] != self.v.shape[0]:
            raise ValueError("dimension mismatch between a and v")
        if np.max(np.abs(self.a - self.a.T)) > 1e-12:
            raise ValueError("alpha matrix must be symmetric")
        if np.linalg.eigvalsh(self.a)[0] <= 0:
            raise InadmissibleNormError("alpha matrix is not positive definite")

    @property
    def dim(self):
        return self.a.shape[0]

    @property
    def b(self):
        return float(np.sqrt(self.v @ self.a @ self.v))

    def normalized(self):
        """Equivalent data with b = 1 (v rescaled, phi reparametrized)."""
        b = self.b
        if b == 0.0:
            raise ValueError("cannot normalize a zero beta")
        return ABNormData(self.a, self.v / b, self.phi.rescaled(b))


@dataclass
class FundamentalTensor:
    """g_ij(y) = half the y-Hessian of F^2, with its inverse."""

    y: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.g_inv is None:
            self.g_inv = np.linalg.inv(self.g)

    def inner(self, u, w):
        return float(u @ self.g @ w)


def ab_eval(data, y):
    """F(y) = alpha(y) phi(beta(y)/alpha(y)); jet-transparent in y."""
    alpha_sq = _quad(data.a, y)
    if not isinstance(alpha_sq, Jet) and float(alpha_sq) == 0.0:
        raise ValueError("norm is not smooth at y = 0")
    alpha = jsqrt(alpha_sq)
    beta = _lin(data.a @ data.v, y)
    return alpha * data.phi(beta / alpha)


def ab_eval_sq(data, y):
    """F(y)^2; preferred for jet work since it is smooth through cancellation."""
    f = ab_eval(data, y)
    return f * f


def _quad(a, y):
    acc = 0.0
    n = a.shape[0]
    for i in range(n):
        for j in range(i, n):
            w = a[i, j] if i == j else 2.0 * a[i, j]
            if w != 0.0:
                acc = acc + w * (y[i] * y[j])
    return acc


def _lin(row, y):
    acc = 0.0
    for i, r in enumerate(row):
        if r != 0.0:
            acc = acc + r * y[i]
    return acc


def hessian(data, y, validate=True):
    """Fundamental tensor at y != 0 (raises if the Hessian is not SPD)."""
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ValueError("fundamental tensor is undefined at y = 0")
    n = data.dim
    space = JetSpace.total_degree(n, 2)
    yj = space.seed(y)
    f2 = ab_eval_sq(data, yj)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = 0.5 * f2.d2(i, j)
    if validate:
        w = np.linalg.eigvalsh(g)
        if w[0] <= 0:
            raise InadmissibleNormError(
                f"fundamental tensor not positive definite at y={y.tolist()}", witness=y)
    return FundamentalTensor(y=y, g=g)


def inner_y(data, y, u, w):
    """<u, w>_y = g_ij(y) u^i w^j."""
    return hessian(data, y).inner(np.asarray(u, dtype=float), np.asarray(w, dtype=float))


def positivity_check(phi, b, gridsize=1001):
    """Positive-definiteness criterion on s in [-b, b].

    Checks phi(s) > 0 and phi - s phi' + (b^2 - s^2) phi'' > 0 on a uniform
    grid that always contains both endpoints.  Returns (ok, witness) where
    witness = (s, value, which) for the first violated condition.
    """
    if b <= 0:
        raise ValueError("b must be positive")
    grid = np.linspace(-b, b, max(int(gridsize), 3))
    for s in grid:
        p0, p1, p2, _ = phi.derivatives(s)
        if p0 <= 0:
            return False, (float(s), float(p0), "phi")
        crit = p0 - s * p1 + (b * b - s * s) * p2
        if crit <= 0:
            return False, (float(s), float(crit), "criterion")
    return True, None


def q_delta_phi(phi, s, b, n):
    """The auxiliary quantities (Q, Q', Q'', Delta, Phi) at ratio s.

    Q = phi'/(phi - s phi'); Q', Q'' by jet differentiation of that quotient;
    Delta = 1 + sQ + (b^2 + s^2) Q';
    Phi = -(Q - sQ')(n Delta + 1 + sQ) - (b^2 - s^2)(1 + sQ) Q''.
    `n` is the manifold dimension, supplied by the caller.
    """
    s = float(s)
    space = JetSpace.total_degree(1, 2)
    (sj,) = space.seed(np.array([s]))
    # phi' needs to carry two derivative orders of its own, so phi is
    # expanded to order 3 and dropped to order-2 jets for the quotient
    space3 = JetSpace.total_degree(1, 3)
    (sj3,) = space3.seed(np.array([s]))
    p3 = phi(sj3)
    if not isinstance(p3, Jet):
        p3 = space3.const(float(p3))
    phi_j = Jet(space3, p3.c.copy())
    dphi_j = phi_j.partial_jet(0)  # order-2 jet of phi'
    phi_low = _drop_order(phi_j, 2)
    denom = phi_low - sj * dphi_j
    if abs(float(denom.value)) < 1e-14:
        raise SingularPhiError(f"phi - s*phi' vanishes at s={s}")
    qj = dphi_j / denom
    q = float(qj.value)
    qp = float(qj.d(0))
    qpp = float(qj.partial((2,)))
    delta = 1.0 + s * q + (b * b + s * s) * qp
    big_phi = -(q - s * qp) * (n * delta + 1.0 + s * q) \
        - (b * b - s * s) * (1.0 + s * q) * qpp
    return q, qp, qpp, delta, big_phi


def _drop_order(jet, order):
    lower = JetSpace.total_degree(jet.space.nvars, order)
    c = np.zeros(lower.size)
    for pos, mono in enumerate(lower.monos):
        c[pos] = jet.c[jet.space.index[mono]]
    return Jet(lower, c)


def is_riemannian_phi(phi, b, n, gridsize=401):
    """True iff Phi vanishes identically on (-b, b); Phi == 0 characterizes
    the Riemannian members of the family."""
    if b <= 0:
        raise ValueError("b must be positive")
    ss = np.linspace(-b, b, gridsize + 2)[1:-1]
    worst = 0.0
    for s in ss:
        _, _, _, _, big_phi = q_delta_phi(phi, s, b, n)
        worst = max(worst, abs(big_phi))
    return worst < 1e-10
