"""Concrete compact Lie algebras: u(n), su(n), sp(n) and abelian extensions.

Everything is stored over the reals: complex entries become 2x2 blocks,
quaternionic entries 4x4 blocks, abelian summands 2x2 rotation generators.
Bases are orthonormal for the bi-invariant inner product <X,Y> = -tr(XY) in
the embedded representation (the normalization constant is 1 with these
embeddings: the shortest su(2)-triple comes out orthonormal), so the
bi-invariant form matrix is the identity and all projections are plain
transposes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BI_INVARIANT_TRACE_CONSTANT = 1.0  # <X,Y> = -c * tr(XY), c fixed here


class UnsupportedAlgebraError(ValueError):
    """Requested family is catalog-only (e.g. f4); no numerical realization."""


class StructuralError(RuntimeError):
    """A Lie-theoretic consistency requirement failed beyond tolerance."""


@dataclass
class LieAlgebra:
    """Real matrix realization with a bi-invariant-orthonormal basis."""

    name: str
    basis: np.ndarray          # (dim, N, N)
    struct: np.ndarray = field(default=None)   # [e_i,e_j] = sum_k struct[i,j,k] e_k
    bi_form: np.ndarray = field(default=None)  # identity by construction

    def __post_init__(self):
        if self.struct is None:
            self.struct = _structure_constants(self.basis)
        if self.bi_form is None:
            self.bi_form = np.eye(self.dim)
        # ad(e_i) as matrices: ad_mats[i][k, j] = struct[i, j, k]
        self.ad_mats = np.transpose(self.struct, (0, 2, 1)).copy()

    @property
    def dim(self):
        return self.basis.shape[0]

    def embed(self, x):
        """Coordinate vector -> real matrix."""
        return np.tensordot(np.asarray(x, dtype=float), self.basis, axes=(0, 0))

    def project(self, mat):
        """Real matrix (assumed in the algebra) -> coordinate vector."""
        return -np.einsum("ijk,kj->i", self.basis, np.asarray(mat, dtype=float)) \
            * BI_INVARIANT_TRACE_CONSTANT

    def bracket(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape[0] != self.dim or y.shape[0] != self.dim:
            raise ValueError("coordinate dimension mismatch")
        return np.einsum("i,j,ijk->k", x, y, self.struct)

    def ad(self, x):
        """Matrix of ad(x) acting on coordinates."""
        return np.tensordot(np.asarray(x, dtype=float), self.ad_mats, axes=(0, 0))

    def inner(self, x, y):
        return float(np.dot(x, y))


def bracket(algebra, x, y):
    return algebra.bracket(x, y)


def _structure_constants(basis):
    dim = basis.shape[0]
    struct = np.zeros((dim, dim, dim))
    flat = basis.reshape(dim, -1)
    for i in range(dim):
        for j in range(i + 1, dim):
            comm = basis[i] @ basis[j] - basis[j] @ basis[i]
            coords = -flat @ comm.T.ravel() * BI_INVARIANT_TRACE_CONSTANT
            struct[i, j] = coords
            struct[j, i] = -coords
    return struct


# -- real embeddings ----------------------------------------------------------

def _complex_to_real(m):
    """n x n complex -> 2n x 2n real, a+bi -> [[a,-b],[b,a]] blocks."""
    n = m.shape[0]
    out = np.zeros((2 * n, 2 * n))
    a, b = m.real, m.imag
    out[0::2, 0::2] = a
    out[1::2, 1::2] = a
    out[0::2, 1::2] = -b
    out[1::2, 0::2] = b
    return out


_QUAT_UNITS = {
    "1": np.eye(4),
    "i": np.array([[0., -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
    "j": np.array([[0., 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]),
    "k": np.array([[0., 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]),
}


def _quat_entry_matrix(n, i, j, unit):
    out = np.zeros((4 * n, 4 * n))
    out[4 * i:4 * i + 4, 4 * j:4 * j + 4] = _QUAT_UNITS[unit]
    return out


def _su_basis(n):
    """Orthonormal basis of su(n): diagonal torus directions first, then the
    root-plane pairs (u_ij, v_ij) in lexicographic (i, j) order."""
    mats = []
    for k in range(1, n):
        a = np.zeros(n)
        a[:k] = 1.0
        a[k] = -k
        a /= np.linalg.norm(a) * np.sqrt(2.0)
        mats.append(_complex_to_real(1j * np.diag(a)))
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            e[j, i] = -1.0
            mats.append(_complex_to_real(e / 2.0))
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1j
            e[j, i] = 1j
            mats.append(_complex_to_real(e / 2.0))
    return mats


def _u_basis(n):
    center = _complex_to_real(1j * np.eye(n) / np.sqrt(2.0 * n))
    return [center] + _su_basis(n)


def _sp_basis(n):
    """Orthonormal basis of sp(n) in the 4x4-real-block quaternionic embedding."""
    mats = []
    for k in range(n):
        for unit in ("i", "j", "k"):
            mats.append(_quat_entry_matrix(n, k, k, unit) / 2.0)
    for i in range(n):
        for j in range(i + 1, n):
            m = _quat_entry_matrix(n, i, j, "1") - _quat_entry_matrix(n, j, i, "1")
            mats.append(m / (2.0 * np.sqrt(2.0)))
            for unit in ("i", "j", "k"):
                m = _quat_entry_matrix(n, i, j, unit) + _quat_entry_matrix(n, j, i, unit)
                mats.append(m / (2.0 * np.sqrt(2.0)))
    return mats


def _abelian_block():
    return np.array([[0.0, -1.0], [1.0, 0.0]]) / np.sqrt(2.0)


def build_algebra(family, n, abelian=0):
    """Construct u(n), su(n) or sp(n), optionally plus `abelian` commuting
    R-summands (each realized as a 2x2 rotation block so the trace form stays
    positive)."""
    if family == "su":
        mats = _su_basis(n)
    elif family == "u":
        mats = _u_basis(n)
    elif family == "sp":
        mats = _sp_basis(n)
    elif family in ("f4", "so"):
        raise UnsupportedAlgebraError(
            f"{family}({n}) is catalog-only; see the case list exclusions")
    else:
        raise UnsupportedAlgebraError(f"unknown family {family!r}")
    if abelian < 0:
        raise ValueError("abelian summand count must be >= 0")
    name = f"{family}({n})" + (f"+R^{abelian}" if abelian else "")
    size = mats[0].shape[0]
    if abelian:
        blk = _abelian_block()
        total = size + 2 * abelian
        padded = []
        for m in mats:
            big = np.zeros((total, total))
            big[:size, :size] = m
            padded.append(big)
        for a in range(abelian):
            big = np.zeros((total, total))
            off = size + 2 * a
            big[off:off + 2, off:off + 2] = blk
            padded.append(big)
        mats = padded
    basis = np.stack(mats)
    alg = LieAlgebra(name=name, basis=basis)
    _validate_algebra(alg)
    return alg


def _validate_algebra(alg, tol=1e-12):
    c = alg.struct
    if np.max(np.abs(c + np.transpose(c, (1, 0, 2)))) > tol:
        raise StructuralError("structure constants are not antisymmetric")
    # Jacobi: [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]] = 0
    jac = np.einsum("jkl,ilm->ijkm", c, c) \
        + np.einsum("kil,jlm->ijkm", c, c) \
        + np.einsum("ijl,klm->ijkm", c, c)
    if np.max(np.abs(jac)) > 1e-10:
        raise StructuralError("Jacobi identity fails for the constructed basis")
    # bi-invariance of the (identity) form: c[i,j,k] antisymmetric in (j,k)
    if np.max(np.abs(c + np.transpose(c, (0, 2, 1)))) > 1e-10:
        raise StructuralError("bi-invariant form is not ad-invariant")


@dataclass
class Subalgebra:
    """A bracket-closed subspace, stored as orthonormal rows in parent coords."""

    parent: LieAlgebra
    span: np.ndarray  # (k, dim)

    def __post_init__(self):
        self.span = np.atleast_2d(np.asarray(self.span, dtype=float))
        if self.span.size == 0:
            self.span = np.zeros((0, self.parent.dim))
            return
        self.span = _orthonormalize(self.span)
        if self.span.shape[0] and not _closed_under_bracket(self.parent, self.span):
            raise StructuralError("span is not closed under the bracket")

    @property
    def dim(self):
        return self.span.shape[0]


def _orthonormalize(rows, tol=1e-10):
    q, r = np.linalg.qr(rows.T)
    keep = np.abs(np.diag(r)) > tol
    return q.T[keep]


def _closed_under_bracket(alg, rows, tol=1e-12):
    if rows.shape[0] == 0:
        return True
    perp = np.eye(alg.dim) - rows.T @ rows
    for i in range(rows.shape[0]):
        for j in range(i + 1, rows.shape[0]):
            z = alg.bracket(rows[i], rows[j])
            if np.max(np.abs(perp @ z), initial=0.0) > tol:
                return False
    return True


@dataclass
class ReductiveSplit:
    """g = h + m with [h, m] in m; m is the inner-orthogonal complement of h."""

    algebra: LieAlgebra
    h_basis: np.ndarray  # (dim_h, dim)
    m_basis: np.ndarray  # (dim_m, dim)

    def __post_init__(self):
        # coordinates in the direct sum h (+) m; projection is along h, which
        # coincides with the orthogonal one exactly when the split is
        # bi-invariant-orthogonal
        full = np.vstack([self.h_basis, self.m_basis]) if self.h_basis.size \
            else self.m_basis
        self._decomp = np.linalg.inv(full.T)

    @property
    def dim_m(self):
        return self.m_basis.shape[0]

    def pr_m(self, x):
        """Projection g -> m along h, expressed in m-coordinates."""
        return (self._decomp @ np.asarray(x, dtype=float))[self.h_basis.shape[0]:]

    def pr_h(self, x):
        return (self._decomp @ np.asarray(x, dtype=float))[:self.h_basis.shape[0]]

    def m_to_g(self, u):
        return np.asarray(u, dtype=float) @ self.m_basis

    def bracket_m(self, u, w):
        """[u, w]_m for u, w in m-coordinates."""
        z = self.algebra.bracket(self.m_to_g(u), self.m_to_g(w))
        return self.pr_m(z)

    def ad_m(self, u):
        """Matrix of y -> [u, y]_m on m-coordinates."""
        zu = self.m_to_g(u)
        return self.m_basis @ self.algebra.ad(zu) @ self.m_basis.T

    def h_action_on_m(self):
        """List of matrices of ad(h-basis) restricted to m."""
        return [self.m_basis @ self.algebra.ad(h) @ self.m_basis.T
                for h in self.h_basis]


def reductive_split(algebra, h, inner=None, tol=1e-10):
    """Split g = h + m with m the `inner`-orthogonal complement of h.

    `inner` is an SPD matrix on g-coordinates (bi-invariant identity by
    default) and must be Ad(H)-invariant; [h, m] not landing in m signals a
    non-invariant form and raises StructuralError.
    """
    h_rows = h.span if isinstance(h, Subalgebra) else np.atleast_2d(h)
    if h_rows.size == 0:
        h_rows = np.zeros((0, algebra.dim))
    if inner is None:
        m_rows = _null_complement(h_rows, algebra.dim)
    else:
        inner = np.asarray(inner, dtype=float)
        m_rows = _null_complement(h_rows @ inner, algebra.dim)
    split = ReductiveSplit(algebra=algebra, h_basis=h_rows, m_basis=m_rows)
    for hv in h_rows:
        for mv in m_rows:
            z = algebra.bracket(hv, mv)
            resid = z - m_rows.T @ (m_rows @ z)  # m_rows are orthonormal
            if np.max(np.abs(resid), initial=0.0) > tol:
                raise StructuralError(
                    "[h, m] leaves m: supplied form is not Ad(H)-invariant")
    return split


def _null_complement(rows, dim, tol=1e-10):
    if rows.shape[0] == 0:
        return np.eye(dim)
    _, s, vt = np.linalg.svd(np.vstack([rows]))
    rank = int(np.sum(s > tol * s[0]))
    return vt[rank:]


def rank(algebra, subspace=None, draws=3, seed=0):
    """Rank via the centralizer of a generic element (minimum over several
    integer-lattice draws to defeat accidental degeneracy)."""
    rng = np.random.default_rng(seed)
    rows = subspace if subspace is not None else np.eye(algebra.dim)
    rows = np.atleast_2d(rows)
    if rows.shape[0] == 0:
        return 0
    best = rows.shape[0]
    for _ in range(draws):
        coef = rng.integers(-10, 11, size=rows.shape[0]).astype(float)
        while not np.any(coef):
            coef = rng.integers(-10, 11, size=rows.shape[0]).astype(float)
        x = coef @ rows
        adx = algebra.ad(x)
        # centralizer inside the subspace
        sys = adx @ rows.T
        _, s, vt = np.linalg.svd(sys)
        tol = max(sys.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0)
        null_dim = rows.shape[0] - int(np.sum(s > max(tol, 1e-9)))
        best = min(best, null_dim)
    return best


def maximal_ideal_in(algebra, k, tol=1e-9):
    """Largest subspace I of k with [g, I] contained in I.

    Fixed-point iteration I <- {x in I : [g, x] in I} starting from I = k;
    returns orthonormal rows (possibly empty).
    """
    rows = k.span if isinstance(k, Subalgebra) else np.atleast_2d(np.asarray(k, dtype=float))
    if rows.size == 0:
        return np.zeros((0, algebra.dim))
    rows = _orthonormalize(rows)
    while rows.shape[0] > 0:
        perp = np.eye(algebra.dim) - rows.T @ rows
        # x = c @ rows must satisfy perp @ [e_a, x] = 0 for all basis e_a
        blocks = [perp @ algebra.ad_mats[a] @ rows.T for a in range(algebra.dim)]
        sys = np.vstack(blocks)
        _, s, vt = np.linalg.svd(sys)
        nkeep = int(np.sum(s > tol)) if s.size else 0
        null = vt[nkeep:]
        new_rows = _orthonormalize(null @ rows) if null.size else np.zeros((0, algebra.dim))
        if new_rows.shape[0] == rows.shape[0]:
            return rows
        rows = new_rows
    return np.zeros((0, algebra.dim))


def ad_invariance_check(inner_m, split, tol=1e-10):
    """Ad(H)-invariance of an inner product on m:
    <[z,x]_m, y> + <x, [z,y]_m> = 0 for every h-basis z.  Returns
    (ok, worst) with worst = (violation, h_index)."""
    inner_m = np.asarray(inner_m, dtype=float)
    worst = (0.0, None)
    for idx, act in enumerate(split.h_action_on_m()):
        defect = act.T @ inner_m + inner_m @ act
        v = float(np.max(np.abs(defect)))
        if v > worst[0]:
            worst = (v, idx)
    return worst[0] <= tol, worst


@dataclass
class RootPlaneDecomp:
    """m split into a toral part m0 and ad(t)-invariant 2-planes."""

    m0: np.ndarray                 # (dim_m0, dim_m) rows in m-coordinates
    planes: list                   # list of (label, rows (2, dim_m))

    def projectors(self, dim_m):
        prs = [self.m0.T @ self.m0]
        for _, rows in self.planes:
            prs.append(rows.T @ rows)
        return prs


def root_plane_decomposition(algebra, t_rows, split, tol=1e-9):
    """Root-plane decomposition of m for g in {su(3), u(3)} relative to a
    torus t inside the diagonal.  Planes are labelled by the root pair
    (i, j) of e_i - e_j."""
    if not algebra.name.startswith(("su(3)", "u(3)")):
        raise UnsupportedAlgebraError("root planes are realized for su(3)/u(3) only")
    t_rows = np.atleast_2d(np.asarray(t_rows, dtype=float))
    # the torus must be diagonal: its embedded matrices commute with all
    # diagonal directions
    diag_rows = _diagonal_torus_rows(algebra)
    for tv in t_rows:
        for dv in diag_rows:
            if np.max(np.abs(algebra.bracket(tv, dv))) > tol:
                raise UnsupportedAlgebraError("torus is not inside the diagonal maximal torus")
    offset = 1 if algebra.name.startswith("u(") else 0
    pair_index = {}
    pos = offset + 2  # diagonal torus directions come first in the basis
    for i in range(3):
        for j in range(i + 1, 3):
            pair_index[(i, j)] = pos
            pos += 2
    planes = []
    for (i, j), p in sorted(pair_index.items()):
        rows_g = np.zeros((2, algebra.dim))
        rows_g[0, p] = 1.0
        rows_g[1, p + 1] = 1.0
        rows_m = rows_g @ split.m_basis.T
        if np.max(np.abs(rows_m @ rows_m.T - np.eye(2))) > tol:
            raise StructuralError(f"root plane ({i},{j}) is not contained in m")
        planes.append(((i, j), rows_m))
    # m0 = orthogonal complement of the planes inside m
    stacked = np.vstack([rows for _, rows in planes])
    m0 = _null_complement(stacked, split.dim_m)
    return RootPlaneDecomp(m0=m0, planes=planes)


def _diagonal_torus_rows(algebra):
    offset = 1 if algebra.name.startswith("u(") else 0
    rows = np.zeros((offset + 2, algebra.dim))
    for r in range(offset + 2):
        rows[r, r] = 1.0
    return rows
