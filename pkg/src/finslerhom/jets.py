"""Truncated multivariate Taylor (jet) arithmetic.

A jet carries the value of a scalar together with its mixed partial
derivatives up to a fixed total order (at most 3 per seed set).  All
arithmetic is exact on the truncated polynomial algebra, so derivatives of
arbitrary composite expressions come out to machine precision; no symbolic
manipulation and no finite differencing happens on the main path.

Higher effective differentiation order, when a formula needs derivatives of
a quantity that is itself built from derivatives, is obtained by *pairing*
two seed sets (`JetSpace.pair`): the paired algebra is the tensor product of
two truncated algebras and behaves exactly like jets whose coefficients are
jets, while keeping each factor at order <= 3 and the coefficient storage
flat for speed.

Coefficient arrays may carry trailing batch axes; arithmetic broadcasts over
them, which is how quadrature-node batches are differentiated in one pass.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement

import numpy as np

MAX_ORDER = 3


class PropagationError(ArithmeticError):
    """A non-finite coefficient appeared; carries the offending multi-index."""

    def __init__(self, mono):
        self.mono = tuple(mono)
        super().__init__(f"non-finite jet coefficient at multi-index {self.mono}")


def _monomials(nvars, order):
    """All exponent tuples over nvars variables with total degree <= order,
    graded so the constant monomial sits at position 0."""
    monos = [(0,) * nvars]
    for deg in range(1, order + 1):
        for combo in combinations_with_replacement(range(nvars), deg):
            m = [0] * nvars
            for v in combo:
                m[v] += 1
            monos.append(tuple(m))
    return monos


_SPACE_CACHE = {}


class JetSpace:
    """Coefficient layout and multiplication table for one family of jets."""

    __slots__ = ("monos", "index", "size", "nvars", "order", "tab_i", "tab_j",
                 "tab_k", "inner", "outer", "_embeds", "key", "_csr")

    def __init__(self, monos, nvars, order, table, key, inner=None, outer=None):
        self.monos = tuple(monos)
        self.nvars = nvars
        self.order = order
        self.index = {m: i for i, m in enumerate(self.monos)}
        self.size = len(self.monos)
        self.tab_i, self.tab_j, self.tab_k = table
        self.inner = inner
        self.outer = outer
        self._embeds = {}
        self.key = key
        self._csr = None

    def _rows_by_factor(self):
        """Table rows grouped by the first factor's monomial (sparse path)."""
        if self._csr is None:
            order = np.argsort(self.tab_i, kind="stable")
            ti = self.tab_i[order]
            starts = np.searchsorted(ti, np.arange(self.size + 1))
            self._csr = (self.tab_j[order], self.tab_k[order], starts)
        return self._csr

    @staticmethod
    def total_degree(nvars, order):
        """The standard jet space: all partials of total order <= `order`."""
        if not (0 <= order <= MAX_ORDER):
            raise ValueError(f"jet order must lie in 0..{MAX_ORDER}, got {order}")
        if nvars < 1:
            raise ValueError("need at least one seed variable")
        key = ("total", nvars, order)
        sp = _SPACE_CACHE.get(key)
        if sp is None:
            monos = _monomials(nvars, order)
            index = {m: i for i, m in enumerate(monos)}
            ti, tj, tk = [], [], []
            for i, mi in enumerate(monos):
                di = sum(mi)
                for j, mj in enumerate(monos):
                    if di + sum(mj) <= order:
                        ti.append(i)
                        tj.append(j)
                        tk.append(index[tuple(a + b for a, b in zip(mi, mj))])
            table = (np.asarray(ti), np.asarray(tj), np.asarray(tk))
            sp = JetSpace(monos, nvars, order, table, key)
            _SPACE_CACHE[key] = sp
        return sp

    @staticmethod
    def pair(inner, outer):
        """Tensor product of two jet spaces over the *same* variable set.

        Seeding a variable in the paired space seeds it in both factors, so a
        coefficient at (alpha, beta) recovers the mixed partial of order
        alpha+beta: effective order inner.order + outer.order while each
        factor stays within MAX_ORDER.
        """
        if inner.nvars != outer.nvars:
            raise ValueError("paired spaces must share the variable set")
        key = ("pair", inner.key, outer.key)
        sp = _SPACE_CACHE.get(key)
        if sp is None:
            n = inner.nvars
            monos = [mi + mo for mi in inner.monos for mo in outer.monos]
            no = outer.size
            ti = (inner.tab_i[:, None] * no + outer.tab_i[None, :]).ravel()
            tj = (inner.tab_j[:, None] * no + outer.tab_j[None, :]).ravel()
            tk = (inner.tab_k[:, None] * no + outer.tab_k[None, :]).ravel()
            sp = JetSpace(monos, 2 * n, inner.order + outer.order,
                          (ti, tj, tk), key, inner=inner, outer=outer)
            _SPACE_CACHE[key] = sp
        return sp

    @property
    def is_paired(self):
        return self.inner is not None

    def seed(self, values):
        """Jets for the coordinate functions at `values` (shape (nvars, *batch))."""
        values = np.asarray(values, dtype=float)
        n = self.inner.nvars if self.is_paired else self.nvars
        if values.shape[0] != n:
            raise ValueError(f"expected {n} seed values, got {values.shape[0]}")
        out = []
        for i in range(n):
            c = np.zeros((self.size,) + values.shape[1:])
            c[0] = values[i]
            if self.is_paired:
                ei = tuple(1 if v == i else 0 for v in range(n))
                zero = (0,) * n
                c[self.index[ei + zero]] = 1.0
                c[self.index[zero + ei]] = 1.0
            else:
                ei = tuple(1 if v == i else 0 for v in range(n))
                c[self.index[ei]] = 1.0
            out.append(Jet(self, c))
        return out

    def const(self, value, batch_shape=()):
        c = np.zeros((self.size,) + tuple(batch_shape))
        c[0] = value
        return Jet(self, c)

    def coeff_index(self, alpha):
        """Position of the coefficient holding the partial `alpha` (a tuple over
        the logical variables), together with the factorial multiplier that
        converts the coefficient into the partial derivative."""
        alpha = tuple(alpha)
        if self.is_paired:
            ai, ao = self._split(alpha)
            idx = self.index[ai + ao]
            fact = _multifact(ai) * _multifact(ao)
        else:
            idx = self.index[alpha]
            fact = _multifact(alpha)
        return idx, fact

    def _split(self, alpha):
        """Split a logical multi-index across the (inner, outer) factors,
        loading the inner factor first."""
        room = self.inner.order
        ai, ao = [], []
        for a in alpha:
            take = min(a, room)
            ai.append(take)
            ao.append(a - take)
            room -= take
        ai, ao = tuple(ai), tuple(ao)
        if sum(ao) > self.outer.order:
            raise KeyError(f"partial {alpha} exceeds paired order")
        return ai, ao


def _multifact(mono):
    f = 1
    for a in mono:
        f *= math.factorial(a)
    return f


class Jet:
    """A scalar with its truncated Taylor expansion; immutable by convention."""

    __slots__ = ("space", "c")

    def __init__(self, space, c):
        self.space = space
        self.c = c

    # -- inspection ---------------------------------------------------------

    @property
    def value(self):
        return self.c[0]

    def partial(self, alpha):
        """The mixed partial derivative for multi-index `alpha`."""
        idx, fact = self.space.coeff_index(alpha)
        return self.c[idx] * fact

    def d(self, i):
        return self.partial(_unit(self._nlogical(), i))

    def d2(self, i, j):
        a = list(_unit(self._nlogical(), i))
        a[j] += 1
        return self.partial(a)

    def d3(self, i, j, k):
        a = list(_unit(self._nlogical(), i))
        a[j] += 1
        a[k] += 1
        return self.partial(a)

    def _nlogical(self):
        return self.space.inner.nvars if self.space.is_paired else self.space.nvars

    def gradient(self, nvars=None):
        n = self._nlogical() if nvars is None else nvars
        return np.array([self.d(i) for i in range(n)])

    def mag(self):
        return float(np.max(np.abs(self.c)))

    def partial_jet(self, i):
        """First partial w.r.t. variable i as a jet of one lower order.
        Only defined on total-degree spaces."""
        sp = self.space
        if sp.is_paired:
            raise ValueError("partial_jet is only defined on total-degree spaces")
        lower = JetSpace.total_degree(sp.nvars, sp.order - 1)
        c = np.zeros((lower.size,) + self.c.shape[1:])
        for pos, mono in enumerate(lower.monos):
            up = list(mono)
            up[i] += 1
            c[pos] = self.c[sp.index[tuple(up)]] * up[i]
        return Jet(lower, c)

    def truncated(self, order):
        """Copy of this jet in the total-degree space of lower order."""
        sp = self.space
        if sp.is_paired:
            raise ValueError("truncated is only defined on total-degree spaces")
        lower = JetSpace.total_degree(sp.nvars, order)
        c = np.zeros((lower.size,) + self.c.shape[1:])
        for pos, mono in enumerate(lower.monos):
            c[pos] = self.c[sp.index[mono]]
        return Jet(lower, c)

    def extract_outer(self, inner_mono):
        """For paired spaces: the inner-coefficient block at `inner_mono`,
        scaled to the inner partial derivative, as a jet over the outer
        factor.  This is the 'derivative of f, still carrying its own
        derivatives' accessor that spray assembly relies on."""
        sp = self.space
        if not sp.is_paired:
            raise ValueError("extract_outer needs a paired space")
        inner_mono = tuple(inner_mono)
        pos = sp.inner.index[inner_mono]
        no = sp.outer.size
        block = self.c[pos * no:(pos + 1) * no] * _multifact(inner_mono)
        return Jet(sp.outer, block.copy())

    def __repr__(self):
        return f"Jet(value={self.value!r}, nvars={self.space.nvars}, order={self.space.order})"

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other
        return None

    def _with_batch(self, other):
        """Coefficients reshaped so a batch-array scalar broadcasts cleanly."""
        other = np.asarray(other, dtype=float)
        c = self.c
        extra = other.ndim - (c.ndim - 1)
        if extra > 0:
            c = c.reshape(c.shape + (1,) * extra)
        return c, other

    def __add__(self, other):
        o = self._coerce(other)
        if o is not None:
            return Jet(self.space, self.c + o.c)
        c, other = self._with_batch(other)
        shape = np.broadcast_shapes(c.shape[1:], other.shape)
        out = np.empty((self.space.size,) + shape)
        out[:] = c
        out[0] = c[0] + other
        return Jet(self.space, out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is not None:
            return Jet(self.space, self.c - o.c)
        return self.__add__(-np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            c, other = self._with_batch(other)
            return Jet(self.space, c * other)
        sp = self.space
        a, b = self.c, o.c
        if a.ndim != b.ndim:
            if a.ndim < b.ndim:
                a = a.reshape(a.shape + (1,) * (b.ndim - a.ndim))
            else:
                b = b.reshape(b.shape + (1,) * (a.ndim - b.ndim))
        if a.ndim == 1 and sp.size > 512:
            # large spaces: loop over the sparser operand's support only
            nza = np.nonzero(a)[0]
            nzb = np.nonzero(b)[0]
            if min(nza.size, nzb.size) <= 48:
                if nzb.size < nza.size:
                    a, b = b, a
                    nza = nzb
                tj, tk, starts = sp._rows_by_factor()
                out = np.zeros(sp.size)
                for i in nza:
                    lo, hi = starts[i], starts[i + 1]
                    out += np.bincount(tk[lo:hi], weights=a[i] * b[tj[lo:hi]],
                                       minlength=sp.size)
                return Jet(sp, out)
        prod = a[sp.tab_i] * b[sp.tab_j]
        if prod.ndim == 1:
            out = np.bincount(sp.tab_k, weights=prod, minlength=sp.size)
        else:
            out = np.zeros((sp.size,) + prod.shape[1:])
            np.add.at(out, sp.tab_k, prod)
        return Jet(sp, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            c, other = self._with_batch(other)
            return Jet(self.space, c / other)
        return self * o._reciprocal()

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, int):
            if p < 0:
                return self._reciprocal() ** (-p)
            out = self.space.const(1.0, self.c.shape[1:])
            base = self
            k = p
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        x0 = self.c[0]
        with np.errstate(invalid="ignore", divide="ignore"):
            derivs = [np.power(x0, p)]
            coef = 1.0
            for k in range(1, self.space.order + 1):
                coef *= p - (k - 1)
                derivs.append(coef * np.power(x0, p - k))
        return self._compose(derivs)

    # -- univariate composition ---------------------------------------------

    def _compose(self, derivs):
        """Evaluate h(self) where derivs = [h(x0), h'(x0), ..., h^(K)(x0)]."""
        sp = self.space
        delta_c = self.c.copy()
        delta_c[0] = np.zeros_like(delta_c[0])
        delta = Jet(sp, delta_c)
        order = min(sp.order, len(derivs) - 1)
        acc = sp.const(derivs[order] / math.factorial(order), self.c.shape[1:])
        for k in range(order - 1, -1, -1):
            acc = acc * delta + derivs[k] / math.factorial(k)
        return acc

    def _reciprocal(self):
        x0 = self.c[0]
        derivs = []
        for k in range(self.space.order + 1):
            derivs.append(((-1.0) ** k) * math.factorial(k) * np.power(x0, -k - 1.0))
        return self._compose(derivs)

    def sqrt(self):
        x0 = self.c[0]
        with np.errstate(invalid="ignore", divide="ignore"):
            derivs = [np.sqrt(x0)]
            coef = 1.0
            for k in range(1, self.space.order + 1):
                coef *= 0.5 - (k - 1)
                derivs.append(coef * np.power(x0, 0.5 - k))
        return self._compose(derivs)

    def exp(self):
        e0 = np.exp(self.c[0])
        return self._compose([e0] * (self.space.order + 1))

    def log(self):
        x0 = self.c[0]
        with np.errstate(invalid="ignore", divide="ignore"):
            derivs = [np.log(x0)]
            for k in range(1, self.space.order + 1):
                derivs.append(((-1.0) ** (k - 1)) * math.factorial(k - 1)
                              * np.power(x0, -float(k)))
        return self._compose(derivs)

    def sin(self):
        s, c = np.sin(self.c[0]), np.cos(self.c[0])
        cycle = [s, c, -s, -c]
        return self._compose([cycle[k % 4] for k in range(self.space.order + 1)])

    def cos(self):
        s, c = np.sin(self.c[0]), np.cos(self.c[0])
        cycle = [c, -s, -c, s]
        return self._compose([cycle[k % 4] for k in range(self.space.order + 1)])


def _unit(n, i):
    return tuple(1 if v == i else 0 for v in range(n))


# -- scalar-generic math helpers (work on floats, arrays and jets) -----------

def jsqrt(x):
    return x.sqrt() if isinstance(x, Jet) else np.sqrt(x)


def jexp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def jlog(x):
    return x.log() if isinstance(x, Jet) else np.log(x)


def jsin(x):
    return x.sin() if isinstance(x, Jet) else np.sin(x)


def jcos(x):
    return x.cos() if isinstance(x, Jet) else np.cos(x)


def jvalue(x):
    return x.value if isinstance(x, Jet) else x


def jet_eval(f, point, seeds=None, order=MAX_ORDER):
    """Evaluate `f` with jet-seeded arguments and return the resulting jet.

    `f` receives a list of scalars, one per coordinate of `point`; the entries
    named in `seeds` (all, by default) are jet variables, the rest stay plain
    floats.  Raises PropagationError if any coefficient of the result is not
    finite.
    """
    point = np.atleast_1d(np.asarray(point, dtype=float))
    n = point.shape[0]
    if seeds is None:
        seeds = list(range(n))
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seed set must be nonempty")
    space = JetSpace.total_degree(len(seeds), order)
    vars_ = space.seed(point[seeds])
    args = [point[i] for i in range(n)]
    for pos, i in enumerate(seeds):
        args[i] = vars_[pos]
    out = f(args)
    if not isinstance(out, Jet):
        out = space.const(out)
    bad = ~np.isfinite(np.asarray(out.c, dtype=float))
    if bad.any():
        flat = np.argwhere(bad)[0][0]
        raise PropagationError(out.space.monos[flat])
    return out


# -- embeddings between spaces ------------------------------------------------

def embed(jet, target, var_map=None):
    """Re-express `jet` (total-degree space) in `target`, identifying source
    variable i with target logical variable var_map[i] (identity by default).

    Used to fold cheap single-variable-set jets (e.g. the chart transport
    matrix, which depends on x only) into a larger evaluation space.
    """
    src = jet.space
    if src.is_paired:
        raise ValueError("embed expects a total-degree source space")
    if var_map is None:
        var_map = tuple(range(src.nvars))
    else:
        var_map = tuple(var_map)
    key = (src.key, var_map)
    mat = target._embeds.get(key)
    if mat is None:
        nlog = target.inner.nvars if target.is_paired else target.nvars
        seeds_delta = []
        for i in range(src.nvars):
            v = var_map[i]
            c = np.zeros(target.size)
            if target.is_paired:
                ei = _unit(nlog, v)
                zero = (0,) * nlog
                c[target.index[ei + zero]] = 1.0
                c[target.index[zero + ei]] = 1.0
            else:
                c[target.index[_unit(nlog, v)]] = 1.0
            seeds_delta.append(Jet(target, c))
        mat = np.zeros((src.size, target.size))
        for pos, mono in enumerate(src.monos):
            term = target.const(1.0)
            for i, a in enumerate(mono):
                for _ in range(a):
                    term = term * seeds_delta[i]
            mat[pos] = term.c
        target._embeds[key] = mat
    if jet.c.ndim == 1:
        return Jet(target, jet.c @ mat)
    out = np.tensordot(mat, jet.c, axes=(0, 0))
    return Jet(target, out)


def embed_formal(jet, target, slot_map):
    """Relabel the formal seed slots of `jet` into `target` slots.

    Unlike `embed`, no double-seeding happens: source slot s is identified
    with target slot slot_map[s] one-to-one, so a paired-space jet over a
    variable subset can be placed inside a larger paired space.
    """
    src = jet.space
    key = ("formal", src.key, tuple(slot_map))
    lut = target._embeds.get(key)
    if lut is None:
        lut = np.empty(src.size, dtype=int)
        for pos, mono in enumerate(src.monos):
            tm = [0] * target.nvars
            for s, a in enumerate(mono):
                tm[slot_map[s]] = a
            lut[pos] = target.index[tuple(tm)]
        target._embeds[key] = lut
    c = np.zeros((target.size,) + jet.c.shape[1:])
    c[lut] = jet.c
    return Jet(target, c)


# -- matrix-valued jets --------------------------------------------------------

def mat_from_jets(space, entries):
    """Stack a (d x d) array of jets/floats into coefficient form (size, d, d)."""
    entries = np.asarray(entries, dtype=object)
    d = entries.shape[0]
    out = np.zeros((space.size, d, entries.shape[1]))
    for i in range(d):
        for j in range(entries.shape[1]):
            e = entries[i, j]
            if isinstance(e, Jet):
                out[:, i, j] = e.c
            else:
                out[0, i, j] = e
    return out


def mat_identity(space, d):
    out = np.zeros((space.size, d, d))
    out[0] = np.eye(d)
    return out


def mat_mul(space, A, B):
    """Product of two matrix-valued jets in coefficient form."""
    prod = np.einsum("tab,tbc->tac", A[space.tab_i], B[space.tab_j])
    out = np.zeros((space.size,) + prod.shape[1:])
    np.add.at(out, space.tab_k, prod)
    return out


def mat_entry(space, A, i, j):
    return Jet(space, A[:, i, j].copy())
