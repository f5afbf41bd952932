"""Jet arithmetic: worked derivative examples, algebra homomorphism
properties, paired spaces and batching."""

import math

import numpy as np
import pytest

from conftest import central_diff, central_diff2
from finslerhom.jets import (Jet, JetSpace, PropagationError, embed,
                             embed_formal, jet_eval, jsin, mat_entry,
                             mat_from_jets, mat_identity, mat_mul)


def test_square_at_three():
    j = jet_eval(lambda a: a[0] * a[0], [3.0])
    assert j.value == 9.0
    assert j.d(0) == 6.0
    assert j.partial((2,)) == 2.0
    assert j.partial((3,)) == 0.0


def test_constant_has_zero_partials():
    j = jet_eval(lambda a: a[0] * 0.0 + 4.25, [1.3])
    assert j.value == 4.25
    assert j.d(0) == 0.0 and j.partial((2,)) == 0.0 and j.partial((3,)) == 0.0


def test_sin_x_times_y():
    j = jet_eval(lambda a: jsin(a[0]) * a[1], [0.0, 2.0])
    assert abs(j.value - 0.0) < 1e-15
    assert abs(j.d(0) - 2.0) < 1e-15
    assert abs(j.d(1) - 0.0) < 1e-15
    assert abs(j.d2(0, 1) - 1.0) < 1e-15
    # derived oracle: Richardson central differences

    def f(x):
        return math.sin(x[0]) * x[1]

    assert abs(j.d(0) - central_diff(f, [0.0, 2.0], 0)) < 1e-9
    assert abs(j.d2(0, 1) - central_diff2(f, [0.0, 2.0], 0, 1)) < 1e-8


def test_product_rule_random_polynomials():
    rng = np.random.default_rng(0)
    space = JetSpace.total_degree(2, 3)
    for _ in range(20):
        p = rng.standard_normal((3, 3))
        q = rng.standard_normal((3, 3))
        x0 = rng.standard_normal(2)

        def poly(c, a):
            return sum(c[i, j] * a[0] ** i * a[1] ** j
                       for i in range(3) for j in range(3))

        xs = space.seed(x0)
        jp, jq = poly(p, xs), poly(q, xs)
        prod = jp * jq
        direct = poly_product_jet(space, p, q, x0)
        assert np.max(np.abs(prod.c - direct.c)) < 1e-12


def poly_product_jet(space, p, q, x0):
    pq = np.zeros((5, 5))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    pq[i + k, j + l] += p[i, j] * q[k, l]
    xs = space.seed(x0)
    return sum(pq[i, j] * xs[0] ** i * xs[1] ** j
               for i in range(5) for j in range(5))


def test_chain_rule_transcendentals():
    rng = np.random.default_rng(1)
    for _ in range(10):
        x0 = rng.uniform(0.4, 1.6, size=2)
        j = jet_eval(_composite, x0)
        for i in range(2):
            assert abs(j.d(i) - central_diff(_composite_f, x0, i)) < 1e-9
        for i in range(2):
            for k in range(2):
                assert abs(j.d2(i, k) - central_diff2(_composite_f, x0, i, k)) < 1e-7


def _composite(a):
    x, y = a
    if isinstance(x, Jet):
        return (x * y).exp().log() * (1.0 + (x / y)).sqrt() + (x * x).sin()
    return _composite_f([x, y])


def _composite_f(a):
    x, y = a
    return math.log(math.exp(x * y)) * math.sqrt(1.0 + x / y) + math.sin(x * x)


def test_third_order_mixed_partial():
    # f = x^2 y: d3/dx dx dy = 2
    j = jet_eval(lambda a: a[0] * a[0] * a[1], [1.7, -0.4])
    assert abs(j.d3(0, 0, 1) - 2.0) < 1e-14
    assert abs(j.partial((2, 1)) - 2.0) < 1e-14


def test_division_and_powers():
    j = jet_eval(lambda a: (1.0 / a[0]) + a[0] ** (-2) + a[0] ** 0.5, [2.0])
    x = 2.0
    assert abs(j.value - (1 / x + x ** -2 + math.sqrt(x))) < 1e-14
    d1 = -1 / x ** 2 - 2 * x ** -3 + 0.5 * x ** -0.5
    assert abs(j.d(0) - d1) < 1e-13


def test_paired_space_fourth_derivative():
    sp = JetSpace.total_degree(1, 2)
    pair = JetSpace.pair(sp, sp)
    (x,) = pair.seed(np.array([1.5]))
    f = x * x * x * x  # d4 = 24
    assert abs(f.partial((4,)) - 24.0) < 1e-12
    assert abs(f.partial((3,)) - 24.0 * 1.5) < 1e-12
    assert abs(f.value - 1.5 ** 4) < 1e-12


def test_paired_space_matches_nested_semantics():
    # compare against analytically known partials of exp(x*y) up to order 4
    half = JetSpace.total_degree(2, 2)
    pair = JetSpace.pair(half, half)
    x0, y0 = 0.3, -0.7
    x, y = pair.seed(np.array([x0, y0]))
    f = (x * y).exp()
    e = math.exp(x0 * y0)
    assert abs(f.partial((1, 1)) - e * (1 + x0 * y0)) < 1e-12
    # d2x d2y exp(xy) = e^{xy} (x^2 y^2 + 4xy + 2)
    expect = e * ((x0 * y0) ** 2 + 4 * x0 * y0 + 2)
    assert abs(f.partial((2, 2)) - expect) < 1e-12


def test_order_cap_enforced():
    with pytest.raises(ValueError):
        JetSpace.total_degree(2, 4)


def test_seed_identity():
    space = JetSpace.total_degree(3, 2)
    xs = space.seed(np.array([1.0, 2.0, 3.0]))
    for i, x in enumerate(xs):
        assert x.value == float(i + 1)
        assert x.d(i) == 1.0
        assert all(x.d(j) == 0.0 for j in range(3) if j != i)


def test_propagation_error_names_multi_index():
    with pytest.raises(PropagationError) as e:
        jet_eval(lambda a: a[0].log(), [-1.0])
    assert isinstance(e.value.mono, tuple)


def test_embed_expansion():
    src = JetSpace.total_degree(1, 2)
    (t,) = src.seed(np.array([2.0]))
    g = t * t * 3.0 + t
    big = JetSpace.total_degree(3, 3)
    emb = embed(g, big, var_map=(1,))
    assert emb.value == g.value
    assert emb.d(1) == g.d(0)
    assert emb.partial((0, 2, 0)) == g.partial((2,))
    assert emb.d(0) == 0.0 and emb.d(2) == 0.0


def test_embed_formal_slot_relabel():
    half = JetSpace.total_degree(1, 2)
    small_pair = JetSpace.pair(half, half)
    (x,) = small_pair.seed(np.array([1.2]))
    f = x * x * x
    half2 = JetSpace.total_degree(2, 2)
    big_pair = JetSpace.pair(half2, half2)
    g = embed_formal(f, big_pair, (0, 2))  # slot 0 -> inner var 0, slot 1 -> outer var 0
    (xb, yb) = big_pair.seed(np.array([1.2, 9.9]))
    direct = xb * xb * xb
    assert np.max(np.abs(g.c - direct.c)) < 1e-13


def test_batched_coefficients():
    space = JetSpace.total_degree(2, 2)
    pts = np.stack([np.linspace(0.5, 1.5, 7), np.linspace(-1.0, 1.0, 7)])
    xs = space.seed(pts)
    f = (xs[0] * xs[1]).exp()
    for col in range(7):
        single = jet_eval(lambda a: (a[0] * a[1]).exp(), pts[:, col], order=2)
        assert np.max(np.abs(f.c[:, col] - single.c)) < 1e-12


def test_matrix_jets_match_scalar_products():
    space = JetSpace.total_degree(2, 2)
    xs = space.seed(np.array([0.4, -0.2]))
    a11 = xs[0] * xs[1]
    a12 = xs[0] + 1.0
    A = mat_from_jets(space, np.array([[a11, a12], [a12, a11]], dtype=object))
    B = mat_identity(space, 2) * 2.0
    C = mat_mul(space, A, B)
    assert np.max(np.abs(mat_entry(space, C, 0, 0).c - (a11 * 2.0).c)) < 1e-14


def test_partial_jet_shift():
    space = JetSpace.total_degree(2, 3)
    xs = space.seed(np.array([1.1, 0.7]))
    f = xs[0] ** 3 * xs[1]
    df = f.partial_jet(0)  # 3 x^2 y as an order-2 jet
    assert abs(df.value - 3 * 1.1 ** 2 * 0.7) < 1e-12
    assert abs(df.d(1) - 3 * 1.1 ** 2) < 1e-12
    assert abs(df.d(0) - 6 * 1.1 * 0.7) < 1e-12
