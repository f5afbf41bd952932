"""Linear algebra contracts and the adjoint-transport series."""

import numpy as np
import pytest

from finslerhom import liealg
from finslerhom.jets import JetSpace
from finslerhom.linalg import (DivergenceError, ad_transport, det_generic,
                               eigh, lu_solve_generic, solve,
                               transport_series, transport_series_jet)


def test_solve_residual_on_random_spd():
    rng = np.random.default_rng(0)
    for n in (2, 5, 11, 20):
        for _ in range(5):
            m = rng.standard_normal((n, n))
            a = m @ m.T + n * np.eye(n)
            b = rng.standard_normal(n)
            x = solve(a, b)
            assert np.linalg.norm(a @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_eigh_orthonormal():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((8, 8))
    a = m + m.T
    w, v = eigh(a)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(v.T @ v - np.eye(8))) < 1e-12
    assert np.max(np.abs(a @ v - v @ np.diag(w))) < 1e-10


def test_generic_lu_matches_numpy_on_floats():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((6, 6))
    b = rng.standard_normal((6, 2))
    x = lu_solve_generic(a, b)
    assert np.max(np.abs(np.asarray(x, dtype=float) - np.linalg.solve(a, b))) < 1e-10


def test_generic_lu_with_jets_differentiates_the_inverse():
    # solve A(t) x = b with A(t) = A0 + t*A1; check dx/dt = -A^-1 A1 A^-1 b
    rng = np.random.default_rng(3)
    a0 = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    a1 = rng.standard_normal((4, 4))
    b = rng.standard_normal(4)
    space = JetSpace.total_degree(1, 1)
    (t,) = space.seed(np.array([0.0]))
    amat = np.empty((4, 4), dtype=object)
    for i in range(4):
        for j in range(4):
            amat[i, j] = t * a1[i, j] + a0[i, j]
    x = lu_solve_generic(amat, np.array([space.const(v) for v in b], dtype=object))
    x_val = np.array([xi.value for xi in x])
    x_dot = np.array([xi.d(0) for xi in x])
    assert np.max(np.abs(x_val - np.linalg.solve(a0, b))) < 1e-12
    expect = -np.linalg.solve(a0, a1 @ np.linalg.solve(a0, b))
    assert np.max(np.abs(x_dot - expect)) < 1e-11


def test_det_generic_matches_numpy():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((5, 5))
    assert abs(det_generic(a) - np.linalg.det(a)) < 1e-12 * abs(np.linalg.det(a)) + 1e-14


def test_ad_transport_identity_at_zero():
    su2 = liealg.build_algebra("su", 2)
    a = ad_transport(np.zeros(3), su2)
    assert np.max(np.abs(a - np.eye(3))) < 1e-15


def test_ad_transport_nilpotent_truncates():
    # ad X nilpotent of order 2: A = I - (ad X)/2 exactly
    adx = np.array([[0.0, 1.0], [0.0, 0.0]])
    a = transport_series(adx)
    assert np.max(np.abs(a - (np.eye(2) - adx / 2.0))) < 1e-16


def test_ad_transport_su2_eigendecomposition_oracle():
    su2 = liealg.build_algebra("su", 2)
    x = 0.3 * np.array([1.0, 0.0, 0.0])
    a = ad_transport(x, su2)
    adx = su2.ad(x)
    w, v = np.linalg.eig(adx)
    f = np.where(np.abs(w) < 1e-14, 1.0, -np.expm1(-w) / np.where(w == 0, 1.0, w))
    oracle = (v @ np.diag(f) @ np.linalg.inv(v)).real
    assert np.max(np.abs(a - oracle)) < 1e-12


def test_ad_transport_linear_near_identity():
    su3 = liealg.build_algebra("su", 3)
    rng = np.random.default_rng(5)
    d = rng.standard_normal(8)
    d /= np.linalg.norm(d)
    c_bound = np.linalg.norm(su3.ad(d), 2)  # ||A(X) - I|| <= C ||X||
    for eps in (0.1, 0.01, 0.001, 1e-4):
        a = ad_transport(eps * d, su3)
        assert np.linalg.norm(a - np.eye(8), 2) <= c_bound * eps


def test_ad_transport_divergence_error():
    adx = np.eye(3) * 50.0
    with pytest.raises(DivergenceError):
        transport_series(adx, tol=1e-14, max_terms=5)


def test_transport_series_jet_matches_float():
    su2 = liealg.build_algebra("su", 2)
    space = JetSpace.total_degree(3, 2)
    x0 = np.array([0.21, -0.1, 0.05])
    xs = space.seed(x0)
    adm = np.stack([su2.ad_mats[i] for i in range(3)])
    adx_c = np.zeros((space.size, 3, 3))
    for i in range(3):
        adx_c += xs[i].c[:, None, None] * adm[i]
    series = transport_series_jet(space, adx_c)
    assert np.max(np.abs(series[0] - transport_series(su2.ad(x0)))) < 1e-13
    # first coefficient = directional derivative of the series
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (transport_series(su2.ad(x0 + e)) - transport_series(su2.ad(x0 - e))) / (2 * h)
        idx = space.index[tuple(1 if v == k else 0 for v in range(3))]
        assert np.max(np.abs(series[idx] - fd)) < 1e-9
