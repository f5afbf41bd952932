"""The classification case list: coset spaces that can carry an invariant
non-Riemannian (alpha,beta)-metric with positive flag curvature and vanishing
S-curvature, together with the excluded structures.

Cases 1-4, 6 and 7 are realized numerically with a block-adapted basis of m
(the dual direction v first, then the Ad(K)-isotypic blocks).  Cases 5 and 8
(quaternionic-projective and triple-sp(1) quotients) and 9-10 (the f4 pairs)
are catalog entries only: their product structure rules out positive
curvature, so nothing numerical is at stake.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import liealg, minkowski
from .homspace import CosetSpace, InvariantABMetric, RiemannianHomMetric
from .liealg import Subalgebra, UnsupportedAlgebraError


@dataclass
class CatalogCase:
    """One row of the classification list."""

    id: int
    pair: str
    spaces: str
    admissible: bool
    exclusion: str = ""
    buildable: bool = False
    parameters: str = ""

    def to_dict(self):
        return {
            "id": self.id,
            "pair": self.pair,
            "spaces": self.spaces,
            "admissible": self.admissible,
            "exclusion": self.exclusion,
            "buildable": self.buildable,
            "parameters": self.parameters,
        }


@dataclass
class CaseRealization:
    """A concrete coset space with its block-adapted tangent basis."""

    case_id: int
    label: str
    space: CosetSpace
    v: np.ndarray          # m-coordinates of the distinguished dual direction
    blocks: list           # lists of m-basis indices, v-line first
    admissible: bool
    notes: str = ""

    @property
    def dim(self):
        return self.space.dim

    def block_inner(self, scalars):
        """Diagonal inner product with one scalar per block."""
        if len(scalars) < len(self.blocks):
            raise ValueError(f"need {len(self.blocks)} block scalars")
        g = np.zeros(self.dim)
        for c, idxs in zip(scalars, self.blocks):
            if c <= 0:
                raise ValueError("block scalars must be positive")
            for i in idxs:
                g[i] = c
        return np.diag(g)

    def riemannian_metric(self, scalars):
        return RiemannianHomMetric(self.space, self.block_inner(scalars))

    def ab_metric(self, scalars, phi):
        return InvariantABMetric(self.space, self.block_inner(scalars), self.v, phi)

    def randers_metric(self, scalars, t):
        """F = alpha + t * beta over the block metric, beta dual to v."""
        return self.ab_metric(scalars, minkowski.phi_randers(float(t)))


def catalog():
    """All ten classification cases with admissibility and exclusions."""
    return [
        CatalogCase(1, "g = su(n+1), k = su(n)+R, h = su(n)",
                    "S^{2n+1} = SU(n+1)/SU(n)", True, buildable=True,
                    parameters="n >= 1"),
        CatalogCase(2, "g = su(n+1)+R, k = su(n)+R+R, h = su(n)+R",
                    "S^{2n+1} = U(n+1)/U(n)", True, buildable=True,
                    parameters="n >= 1",
                    exclusion="the CP^n x R covers carry no positively curved "
                              "invariant metric and are excluded"),
        CatalogCase(3, "g = sp(n+1), k = sp(n)+R, h = sp(n)",
                    "S^{4n+3} = Sp(n+1)/Sp(n)", True, buildable=True,
                    parameters="n >= 1"),
        CatalogCase(4, "g = sp(n+1)+R, k = sp(n)+R+R, h = sp(n)+R",
                    "S^{4n+3} = Sp(n+1)U(1)/(Sp(n)xU(1))", True, buildable=True,
                    parameters="n >= 1",
                    exclusion="the HP^n x R covers carry no positively curved "
                              "invariant metric and are excluded"),
        CatalogCase(5, "g = sp(n+1)+R, k = sp(n)+sp(1)+R, h = sp(n)+sp(1)",
                    "covered by HP^n x R", False,
                    exclusion="universal cover HP^n x R admits no invariant "
                              "metric of positive curvature"),
        CatalogCase(6, "g = su(3), k = Cartan subalgebra R+R, h = R",
                    "Aloff-Wallach S_{k,l} = SU(3)/T^1_{k,l}", True, buildable=True,
                    parameters="integers (k,l), admissible iff k*l*(k+l) != 0; "
                               "k+l = 0 is the SU(3)/U(1) zero-flag control"),
        CatalogCase(7, "g = su(3)+R, k = R+R+R, h = R+R",
                    "U(3)/T^2, T^2 in the diagonal maximal torus", True, buildable=True,
                    parameters="admissible iff T^2 is not contained in SU(3)",
                    exclusion="T^2 inside SU(3) gives a (SU(3)/T^2) x R cover "
                              "with no positively curved invariant metric"),
        CatalogCase(8, "g = sp(3)+R, k = sp(1)^3+R, h = sp(1)^3",
                    "covered by (Sp(3)/Sp(1)^3) x R", False,
                    exclusion="the product cover admits no invariant metric of "
                              "positive flag curvature"),
        CatalogCase(9, "g = f4+R, k = so(9)+R, h = so(9)",
                    "covered by (F4/Spin(9)) x R", False,
                    exclusion="the product cover admits no invariant metric of "
                              "positive flag curvature; f4 is not realized "
                              "numerically"),
        CatalogCase(10, "g = f4+R, k = so(8)+R, h = so(8)",
                     "covered by (F4/Spin(8)) x R", False,
                     exclusion="the product cover admits no invariant metric of "
                               "positive flag curvature; f4 is not realized "
                               "numerically"),
    ]


def canonical_kl(k, l):
    """Weyl-normalized torus parameters: permutations of (k, l, -k-l) and the
    overall sign identify the same subgroup.  Stores the primitive pair with
    k >= l, preferring k >= l >= 1 for the admissible orbits and (1, -1) for
    the degenerate ones (a normalization the classification itself leaves
    open)."""
    k, l = int(k), int(l)
    if k == 0 and l == 0:
        raise ValueError("(k, l) = (0, 0) does not define a torus")
    cands = set()
    base = (k, l, -k - l)
    for sgn in (1, -1):
        a = tuple(sgn * t for t in base)
        for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
            kk, ll = a[p[0]], a[p[1]]
            g = gcd(abs(kk), abs(ll)) or 1
            if kk >= ll:
                cands.add((kk // g, ll // g))
    positive = [c for c in cands if c[1] >= 1]
    if positive:
        return min(positive)
    if any(c[0] > 0 and c[0] + c[1] == 0 for c in cands):
        return (1, -1)
    return min(cands)


# -- basis index helpers (match the construction order in liealg) -------------

def _su_plane_index(n, i, j, offset=0):
    """Index of u_ij in the su(n) basis (v_ij is the next one)."""
    rank = 0
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) == (i, j):
                return offset + (n - 1) + 2 * rank
            rank += 1
    raise KeyError((i, j))


def _sp_diag_index(slot, unit):
    return 3 * slot + ("i", "j", "k").index(unit)


def _sp_plane_index(n, i, j):
    rank = 0
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) == (i, j):
                return 3 * n + 4 * rank
            rank += 1
    raise KeyError((i, j))


def _coord_rows(dim, indices):
    rows = np.zeros((len(indices), dim))
    for r, i in enumerate(indices):
        rows[r, i] = 1.0
    return rows


def _project_complex(alg, mat_c):
    """Project a complex matrix (in the algebra) onto basis coordinates."""
    from .liealg import _complex_to_real
    return alg.project(_complex_to_real(mat_c))


def _split_with_basis(alg, h_rows, m_rows):
    h = Subalgebra(alg, h_rows)
    m_rows = np.atleast_2d(m_rows)
    if np.max(np.abs(m_rows @ m_rows.T - np.eye(m_rows.shape[0]))) > 1e-10:
        raise ValueError("m basis is not orthonormal")
    if h.span.size and np.max(np.abs(h.span @ m_rows.T)) > 1e-10:
        raise ValueError("m basis is not orthogonal to h")
    split = liealg.ReductiveSplit(algebra=alg, h_basis=h.span, m_basis=m_rows)
    for hv in h.span:
        for mv in m_rows:
            z = alg.bracket(hv, mv)
            resid = z - m_rows.T @ (m_rows @ z)
            if np.max(np.abs(resid), initial=0.0) > 1e-10:
                raise liealg.StructuralError("[h, m] leaves m for the adapted basis")
    return h, split


def build_case(case_id, n=1, k=1, l=1, torus=None):
    """Concrete realization of an admissible (or negative-control) case."""
    if case_id == 1:
        return _build_case_1(n)
    if case_id == 2:
        return _build_case_2(n)
    if case_id == 3:
        return _build_case_3(n)
    if case_id == 4:
        return _build_case_4(n)
    if case_id == 6:
        return _build_case_6(k, l)
    if case_id == 7:
        return _build_case_7(torus)
    entry = catalog()[case_id - 1]
    raise UnsupportedAlgebraError(
        f"case {case_id} is catalog-only: {entry.exclusion}")


def _build_case_1(n):
    """S^{2n+1} = SU(n+1)/SU(n)."""
    if n < 1:
        raise ValueError("case 1 needs n >= 1")
    big = n + 1
    alg = liealg.build_algebra("su", big)
    h_idx = list(range(n - 1))  # diagonal d_1..d_{n-1} stay inside su(n)
    for i in range(n):
        for j in range(i + 1, n):
            p = _su_plane_index(big, i, j)
            h_idx += [p, p + 1]
    h_rows = _coord_rows(alg.dim, h_idx)
    v_idx = n - 1  # the i*diag(1,...,1,-n) direction
    m_idx = [v_idx]
    for j in range(n):
        p = _su_plane_index(big, j, n)
        m_idx += [p, p + 1]
    m_rows = _coord_rows(alg.dim, m_idx)
    h, split = _split_with_basis(alg, h_rows, m_rows)
    space = CosetSpace(alg, h, split, catalog_id=1, label=f"SU({big})/SU({n})")
    v = np.zeros(2 * n + 1)
    v[0] = 1.0
    return CaseRealization(1, space.label, space, v,
                           [[0], list(range(1, 2 * n + 1))], True)


def _build_case_2(n):
    """S^{2n+1} = U(n+1)/U(n)."""
    if n < 1:
        raise ValueError("case 2 needs n >= 1")
    big = n + 1
    alg = liealg.build_algebra("u", big)
    # u(n) upper block: its diagonal part is spanned by i*diag(e_k, 0)
    h_rows = []
    for kk in range(n):
        mat = np.zeros((big, big), dtype=complex)
        mat[kk, kk] = 1j
        row = _project_complex(alg, mat)
        h_rows.append(row / np.linalg.norm(row))
    for i in range(n):
        for j in range(i + 1, n):
            p = _su_plane_index(big, i, j, offset=1)
            row = np.zeros(alg.dim)
            row[p] = 1.0
            h_rows.append(row)
            row = np.zeros(alg.dim)
            row[p + 1] = 1.0
            h_rows.append(row)
    h_rows = np.asarray(h_rows)
    vmat = np.zeros((big, big), dtype=complex)
    vmat[n, n] = 1j
    v_row = _project_complex(alg, vmat)
    v_row /= np.linalg.norm(v_row)
    m_rows = [v_row]
    for j in range(n):
        p = _su_plane_index(big, j, n, offset=1)
        row = np.zeros(alg.dim)
        row[p] = 1.0
        m_rows.append(row)
        row = np.zeros(alg.dim)
        row[p + 1] = 1.0
        m_rows.append(row)
    h, split = _split_with_basis(alg, h_rows, np.asarray(m_rows))
    space = CosetSpace(alg, h, split, catalog_id=2, label=f"U({big})/U({n})")
    v = np.zeros(2 * n + 1)
    v[0] = 1.0
    return CaseRealization(2, space.label, space, v,
                           [[0], list(range(1, 2 * n + 1))], True)


def _build_case_3(n):
    """S^{4n+3} = Sp(n+1)/Sp(n), sp(n) in the last n slots."""
    if n < 1:
        raise ValueError("case 3 needs n >= 1")
    big = n + 1
    alg = liealg.build_algebra("sp", big)
    h_idx = []
    for slot in range(1, big):
        h_idx += [_sp_diag_index(slot, u) for u in ("i", "j", "k")]
    for i in range(1, big):
        for j in range(i + 1, big):
            p = _sp_plane_index(big, i, j)
            h_idx += [p, p + 1, p + 2, p + 3]
    m_idx = [_sp_diag_index(0, "i"), _sp_diag_index(0, "j"), _sp_diag_index(0, "k")]
    for j in range(1, big):
        p = _sp_plane_index(big, 0, j)
        m_idx += [p, p + 1, p + 2, p + 3]
    h, split = _split_with_basis(alg, _coord_rows(alg.dim, h_idx),
                                 _coord_rows(alg.dim, m_idx))
    space = CosetSpace(alg, h, split, catalog_id=3, label=f"Sp({big})/Sp({n})")
    dim = 4 * n + 3
    v = np.zeros(dim)
    v[0] = 1.0
    return CaseRealization(3, space.label, space, v,
                           [[0], [1, 2], list(range(3, dim))], True)


def _build_case_4(n):
    """S^{4n+3} = Sp(n+1)U(1)/(Sp(n) x U(1)); the U(1) of h is the slanted
    scalar-phase line, so h contains no ideal of g."""
    if n < 1:
        raise ValueError("case 4 needs n >= 1")
    big = n + 1
    alg = liealg.build_algebra("sp", big, abelian=1)
    s = big * (2 * big + 1)  # index of the abelian generator
    h_rows = []
    for slot in range(1, big):
        h_rows += [r for r in _coord_rows(alg.dim,
                                          [_sp_diag_index(slot, u) for u in ("i", "j", "k")])]
    for i in range(1, big):
        for j in range(i + 1, big):
            p = _sp_plane_index(big, i, j)
            h_rows += [r for r in _coord_rows(alg.dim, [p, p + 1, p + 2, p + 3])]
    slant = np.zeros(alg.dim)
    slant[_sp_diag_index(0, "i")] = 1.0 / np.sqrt(2.0)
    slant[s] = 1.0 / np.sqrt(2.0)
    h_rows.append(slant)
    v_row = np.zeros(alg.dim)
    v_row[_sp_diag_index(0, "i")] = 1.0 / np.sqrt(2.0)
    v_row[s] = -1.0 / np.sqrt(2.0)
    m_rows = [v_row]
    m_rows += [r for r in _coord_rows(alg.dim, [_sp_diag_index(0, "j"),
                                                _sp_diag_index(0, "k")])]
    for j in range(1, big):
        p = _sp_plane_index(big, 0, j)
        m_rows += [r for r in _coord_rows(alg.dim, [p, p + 1, p + 2, p + 3])]
    h, split = _split_with_basis(alg, np.asarray(h_rows), np.asarray(m_rows))
    space = CosetSpace(alg, h, split, catalog_id=4,
                       label=f"Sp({big})U(1)/(Sp({n})xU(1))")
    dim = 4 * n + 3
    v = np.zeros(dim)
    v[0] = 1.0
    return CaseRealization(4, space.label, space, v,
                           [[0], [1, 2], list(range(3, dim))], True)


def _diag_torus_row(alg, a):
    """g-coordinates of i*diag(a), normalized; a is a 3-vector that must lie
    in the algebra (trace-free for su(3))."""
    mat = 1j * np.diag(np.asarray(a, dtype=float))
    row = _project_complex(alg, mat)
    back = alg.embed(row)
    from .liealg import _complex_to_real
    if np.max(np.abs(back - _complex_to_real(mat))) > 1e-10:
        raise ValueError(f"diag{tuple(a)} does not lie in {alg.name}")
    return row / np.linalg.norm(row)


def _build_case_6(k, l):
    """Aloff-Wallach S_{k,l} = SU(3)/T^1_{k,l}; k + l = 0 realizes the
    SU(3)/U(1) zero-flag negative control."""
    k, l = canonical_kl(k, l)
    alg = liealg.build_algebra("su", 3)
    a_h = np.array([k, l, -k - l], dtype=float)
    h_row = _diag_torus_row(alg, a_h)
    # m0: the diagonal direction orthogonal to h inside su(3)
    null = _null_rows(np.vstack([np.ones(3), a_h]))
    m0_row = _diag_torus_row(alg, null[0])
    m_rows = [m0_row]
    plane_blocks = [[0]]
    pos = 1
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        p = _su_plane_index(3, i, j)
        m_rows += [r for r in _coord_rows(alg.dim, [p, p + 1])]
        plane_blocks.append([pos, pos + 1])
        pos += 2
    h, split = _split_with_basis(alg, h_row[None, :], np.asarray(m_rows))
    admissible = (k * l * (k + l)) != 0
    label = f"S_{{{k},{l}}}" if admissible else f"SU(3)/U(1) [k={k}, l={l}]"
    space = CosetSpace(alg, h, split, catalog_id=6, label=label)
    v = np.zeros(7)
    v[0] = 1.0
    notes = "" if admissible else "k*l*(k+l) = 0: zero-flag control"
    return CaseRealization(6, label, space, v, plane_blocks, admissible, notes)


def _build_case_7(torus=None):
    """U(3)/T^2 with T^2 inside the diagonal maximal torus.

    `torus` is a pair of integer 3-vectors a with T^2 generated by
    exp(i t diag(a)).  The default ((1,1,-2), (1,0,0)) is not inside SU(3),
    meets su(3) in the U_{1,1} line (so it carries the S_{1,1} curvature
    structure), and keeps the center of u(3) out of h, which the
    effectiveness normalization of the classification requires.
    """
    if torus is None:
        torus = ((1, 1, -2), (1, 0, 0))
    torus = [np.asarray(t, dtype=float) for t in torus]
    if len(torus) != 2 or any(t.shape != (3,) for t in torus):
        raise ValueError("torus must be two 3-vectors of diagonal coefficients")
    admissible = not all(abs(t @ np.ones(3)) < 1e-12 for t in torus)
    alg = liealg.build_algebra("u", 3)
    t_rows = np.vstack([_diag_torus_row(alg, t) for t in torus])
    if np.linalg.matrix_rank(t_rows, tol=1e-10) < 2:
        raise ValueError("torus generators are linearly dependent")
    t_rows = liealg._orthonormalize(t_rows)
    # m0 direction: diagonal complement of the torus in u(3)
    diag_span = np.vstack([_diag_torus_row(alg, e) for e in np.eye(3)])
    m0 = _null_rows_in_span(t_rows, diag_span)
    m_rows = [m0]
    plane_blocks = [[0]]
    pos = 1
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        p = _su_plane_index(3, i, j, offset=1)
        m_rows += [r for r in _coord_rows(alg.dim, [p, p + 1])]
        plane_blocks.append([pos, pos + 1])
        pos += 2
    h, split = _split_with_basis(alg, t_rows, np.asarray(m_rows))
    label = "U(3)/T^2" + ("" if admissible else " [T^2 in SU(3)]")
    space = CosetSpace(alg, h, split, catalog_id=7, label=label)
    v = np.zeros(7)
    v[0] = 1.0
    return CaseRealization(7, label, space, v, plane_blocks, admissible,
                           "" if admissible else "T^2 inside SU(3): catalog exclusion")


def _null_rows(rows):
    _, s, vt = np.linalg.svd(rows)
    rank = int(np.sum(s > 1e-12 * s[0]))
    return vt[rank:]


def _null_rows_in_span(rows, span):
    """Unit vector in span orthogonal to rows (both orthonormal row sets)."""
    coords = rows @ span.T  # components of rows inside the span
    comp = _null_rows(coords)
    out = comp[0] @ span
    return out / np.linalg.norm(out)
