"""Dense linear algebra that is generic over the scalar type.

Float matrices are delegated to numpy/LAPACK.  Matrices with jet entries go
through a plain LU factorization with value-magnitude pivoting, so inverse
and determinant derivatives come out of the same code path that computes the
values.  Also hosts the adjoint-transport series used to pull invariant
metric data into exponential charts.
"""

from __future__ import annotations

import numpy as np

from .jets import Jet, jvalue, mat_identity, mat_mul


class DivergenceError(ArithmeticError):
    """The adjoint-transport series failed to reach tolerance within the cap."""


def solve(A, b):
    """Solve A x = b.  Float arrays use LAPACK; anything containing jets uses
    the generic LU path."""
    A = np.asarray(A)
    if A.dtype == object or (isinstance(b, np.ndarray) and b.dtype == object) \
            or _has_jets(A) or _has_jets(b):
        return lu_solve_generic(A, b)
    return np.linalg.solve(A, np.asarray(b, dtype=float))


def _has_jets(x):
    x = np.asarray(x)
    return x.dtype == object and any(isinstance(e, Jet) for e in x.ravel())


def lu_solve_generic(A, b):
    """LU solve with partial pivoting by value magnitude; scalars only need
    +, -, *, / so jets work transparently."""
    A = np.asarray(A, dtype=object).copy()
    b = np.asarray(b, dtype=object).copy()
    n = A.shape[0]
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(float(jvalue(A[r, col]))))
        if abs(float(jvalue(A[piv, col]))) == 0.0:
            raise np.linalg.LinAlgError("singular matrix in generic LU solve")
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        inv_piv = 1.0 / A[col, col] if not isinstance(A[col, col], Jet) else A[col, col] ** (-1)
        for r in range(col + 1, n):
            f = A[r, col] * inv_piv
            for c in range(col + 1, n):
                A[r, c] = A[r, c] - f * A[col, c]
            for c in range(b.shape[1]):
                b[r, c] = b[r, c] - f * b[col, c]
    x = np.empty_like(b)
    for r in range(n - 1, -1, -1):
        for c in range(b.shape[1]):
            acc = b[r, c]
            for k in range(r + 1, n):
                acc = acc - A[r, k] * x[k, c]
            x[r, c] = acc / A[r, r]
    return x[:, 0] if vec else x


def det_generic(A):
    """Determinant via the same pivoted elimination; jet-transparent."""
    A = np.asarray(A, dtype=object).copy()
    n = A.shape[0]
    sign = 1.0
    det = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(float(jvalue(A[r, col]))))
        if abs(float(jvalue(A[piv, col]))) == 0.0:
            return 0.0 * A[0, 0]
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            sign = -sign
        det = det * A[col, col]
        for r in range(col + 1, n):
            f = A[r, col] / A[col, col]
            for c in range(col + 1, n):
                A[r, c] = A[r, c] - f * A[col, c]
    return det * sign


def eigh(A):
    """Symmetric eigensolve (ascending eigenvalues, orthonormal columns)."""
    return np.linalg.eigh(np.asarray(A, dtype=float))


def is_spd(A, tol=0.0):
    w = np.linalg.eigvalsh(np.asarray(A, dtype=float))
    return bool(w[0] > tol)


def ad_transport(X, algebra, tol=1e-14, max_terms=60):
    """Transport operator A(X) = sum_{k>=0} (-ad X)^k / (k+1)!.

    `X` is a coordinate vector in the algebra basis; `algebra` must expose
    `ad(X) -> matrix`.  Stops when the next term's max-norm drops below
    `tol`; raises DivergenceError at `max_terms`.
    """
    adx = algebra.ad(X) if algebra is not None else np.asarray(X, dtype=float)
    return transport_series(adx, tol=tol, max_terms=max_terms)


def transport_series(adx, tol=1e-14, max_terms=60):
    """Float-matrix version of the transport series for a given ad-matrix."""
    adx = np.asarray(adx, dtype=float)
    d = adx.shape[0]
    out = np.eye(d)
    term = np.eye(d)
    for k in range(1, max_terms + 1):
        term = term @ (-adx) / (k + 1)
        out = out + term
        if np.max(np.abs(term)) < tol:
            return out
    raise DivergenceError(f"transport series did not reach {tol} in {max_terms} terms")


def transport_series_jet(space, adx_coeffs, tol=1e-14, max_terms=60):
    """Transport series for a matrix-valued jet (coefficient form (size,d,d))."""
    d = adx_coeffs.shape[1]
    out = mat_identity(space, d)
    term = mat_identity(space, d)
    for k in range(1, max_terms + 1):
        term = mat_mul(space, term, -adx_coeffs / (k + 1))
        out = out + term
        if np.max(np.abs(term)) < tol:
            return out
    raise DivergenceError(f"transport series did not reach {tol} in {max_terms} terms")
