import numpy as np
import pytest

from qsconv import fixtures as fx
from qsconv.numerics import least_squares_solve


@pytest.fixture(scope="session")
def cz2():
    return fx.cz2()


@pytest.fixture(scope="session")
def cs3():
    return fx.cs3()


@pytest.fixture(scope="session")
def gz3():
    return fx.group_z3()


@pytest.fixture(scope="session")
def calg():
    """The one-dimensional algebra C (function algebra of the trivial monoid)."""
    from qsconv.algebra import function_algebra

    return function_algebra([[0]], labels=["1"])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def tuple_intertwiner(tup_a, tup_b, h):
    """Solve V [delta_a(b_i), rho_a(b_i) D_a] = [delta_b(b_i), rho_b(b_i) D_b].

    Returns (V, residual, isometry_residual, intertwine_residual); the
    uniqueness clause of the minimal-Kolmogorov construction says V exists
    and is isometric whenever both tuples generate the same map and tup_a
    is minimal.
    """
    cols_a = [tup_a.delta(h).T]
    cols_b = [tup_b.delta(h).T]
    if tup_a.dk:
        cols_a.append(np.einsum("iab,bc->aic", tup_a.rho, tup_a.D).reshape(tup_a.K_dim, -1))
        cols_b.append(np.einsum("iab,bc->aic", tup_b.rho, tup_b.D).reshape(tup_b.K_dim, -1))
    ma = np.concatenate(cols_a, axis=1)
    mb = np.concatenate(cols_b, axis=1)
    vt, residual = least_squares_solve(ma.T, mb.T)
    v = vt.T
    iso = 0.0
    if tup_a.K_dim:
        iso = float(np.max(np.abs(v.conj().T @ v - np.eye(tup_a.K_dim))))
    inter = 0.0
    for i in range(h.dim):
        inter = max(inter, float(np.max(np.abs(v @ tup_a.rho[i] - tup_b.rho[i] @ v)))
                    if tup_a.K_dim and tup_b.K_dim else 0.0)
    return v, residual, iso, inter
