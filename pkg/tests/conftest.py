"""Shared fixtures and the finite-difference oracles.

Finite differences (central, with one Richardson extrapolation level, base
step 1e-3) appear only here, never in the library: they are the independent
check on the jet arithmetic.
"""

import numpy as np
import pytest

from finslerhom import catalog, chartcurv, homspace, liealg, minkowski


def central_diff(f, x, i, h=1e-3):
    """First partial by Richardson-extrapolated central differences."""
    x = np.asarray(x, dtype=float)

    def d(step):
        xp, xm = x.copy(), x.copy()
        xp[i] += step
        xm[i] -= step
        return (f(xp) - f(xm)) / (2 * step)

    return (4.0 * d(h / 2) - d(h)) / 3.0


def central_diff2(f, x, i, j, h=1e-3):
    """Second (possibly mixed) partial, Richardson extrapolated."""
    x = np.asarray(x, dtype=float)

    def d(step):
        if i == j:
            xp, xm = x.copy(), x.copy()
            xp[i] += step
            xm[i] -= step
            return (f(xp) - 2.0 * f(x) + f(xm)) / step ** 2
        out = 0.0
        for si in (1, -1):
            for sj in (1, -1):
                xx = x.copy()
                xx[i] += si * step
                xx[j] += sj * step
                out += si * sj * f(xx)
        return out / (4.0 * step ** 2)

    return (4.0 * d(h / 2) - d(h)) / 3.0


@pytest.fixture(scope="session")
def su2_space():
    alg = liealg.build_algebra("su", 2)
    h = liealg.Subalgebra(alg, np.zeros((0, 3)))
    split = liealg.reductive_split(alg, h)
    return homspace.CosetSpace(alg, h, split, label="SU(2)")


@pytest.fixture(scope="session")
def su2_chart(su2_space):
    return chartcurv.ChartContext(su2_space)


@pytest.fixture(scope="session")
def su2_biinvariant(su2_space):
    return homspace.InvariantABMetric(su2_space, np.eye(3), np.array([1.0, 0, 0]),
                                      minkowski.phi_riemannian())


# cyclic basis (X1, X2, X3) with [X1,X2] = X3: m-indices (1, 2, 0)
X1 = np.array([0.0, 1.0, 0.0])
X2 = np.array([0.0, 0.0, 1.0])
X3 = np.array([1.0, 0.0, 0.0])
DIAG123_CYCLIC = np.diag([3.0, 1.0, 2.0])  # <X1,X1>=1, <X2,X2>=2, <X3,X3>=3


@pytest.fixture(scope="session")
def su2_diag_randers(su2_space):
    """The kvcl-violating workhorse: inner diag(1,2,3) in the cyclic basis,
    v = X1, randers eps = 0.3."""
    return homspace.InvariantABMetric(su2_space, DIAG123_CYCLIC, X1,
                                      minkowski.phi_randers(0.3))


@pytest.fixture(scope="session")
def aw11():
    """S_{1,1} with generic block scalars."""
    return catalog.build_case(6, k=1, l=1)


@pytest.fixture(scope="session")
def aw11_randers(aw11):
    return aw11.randers_metric([1.0, 0.8, 1.2, 0.9], 0.1)


@pytest.fixture(scope="session")
def su3_u1():
    """The SU(3)/U(1) zero-flag control (torus in the standard SU(2))."""
    return catalog.build_case(6, k=1, l=-1)
