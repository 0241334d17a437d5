import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qsconv.errors import NonHermitian, NotPsd
from qsconv.numerics import (is_psd, kron, least_squares_solve, matrix_exp,
                             minimal_rank_factor, psd_sqrt)


def random_complex(rng, *shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


finite_entries = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def cmat(rows, cols):
    return st.tuples(arrays(np.float64, (rows, cols), elements=finite_entries),
                     arrays(np.float64, (rows, cols), elements=finite_entries)) \
        .map(lambda p: p[0] + 1j * p[1])


class TestKron:
    def test_identity(self):
        np.testing.assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_scalar_factor(self):
        a = np.array([[0, 1], [0, 0]], dtype=complex)
        np.testing.assert_allclose(kron(a, [[2.0]]), [[0, 2], [0, 0]])

    def test_index_enumeration_oracle(self, rng):
        a = random_complex(rng, 2, 3)
        b = random_complex(rng, 3, 2)
        k = kron(a, b)
        p, q = b.shape
        for i in range(2):
            for j in range(3):
                for r in range(p):
                    for s in range(q):
                        assert k[i * p + r, j * q + s] == pytest.approx(a[i, j] * b[r, s])

    @settings(max_examples=25, deadline=None)
    @given(a=cmat(2, 2), b=cmat(2, 3), c=cmat(3, 2))
    def test_associative(self, a, b, c):
        assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) <= 1e-12

    @settings(max_examples=25, deadline=None)
    @given(a=cmat(2, 2), b=cmat(2, 2), c=cmat(2, 2))
    def test_bilinear(self, a, b, c):
        lhs = kron(a + b, c)
        rhs = kron(a, c) + kron(b, c)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12
        lhs = kron(c, a + 2.0 * b)
        rhs = kron(c, a) + 2.0 * kron(c, b)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


class TestIsPsd:
    def test_diag_nonnegative(self):
        cert = is_psd(np.diag([0.0, 1.0]))
        assert cert.is_psd and cert.min_eigenvalue == pytest.approx(0.0, abs=1e-14)

    def test_diag_indefinite(self):
        assert not is_psd(np.diag([-1.0, 1.0])).is_psd

    def test_two_by_two_eigenvalues(self):
        # characteristic polynomial gives eigenvalues 1 +- 0.5
        cert = is_psd(np.array([[1.0, 0.5], [0.5, 1.0]]))
        assert cert.is_psd
        assert cert.min_eigenvalue == pytest.approx(0.5)
        assert cert.max_eigenvalue == pytest.approx(1.5)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitian):
            is_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_monotone_shift(self, rng):
        a = random_complex(rng, 4, 4)
        m = a.conj().T @ a
        assert is_psd(m).is_psd
        for eps in (0.0, 0.5, 2.0):
            assert is_psd(m + eps * np.eye(4)).is_psd

    def test_certificate_consistency(self, rng):
        m = np.diag(rng.uniform(-1, 1, size=5))
        cert = is_psd(m)
        assert cert.is_psd == (cert.min_eigenvalue >= -cert.tolerance_used)


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]),
                                   atol=1e-12)

    def test_square_reproduces(self, rng):
        a = random_complex(rng, 5, 5)
        m = a.conj().T @ a
        r = psd_sqrt(m)
        bound = 1e-10 * (1 + np.max(np.abs(m)))
        assert np.max(np.abs(r @ r - m)) <= bound
        assert np.max(np.abs(r - r.conj().T)) <= bound
        assert is_psd(r).is_psd

    def test_rejects_indefinite(self):
        with pytest.raises(NotPsd):
            psd_sqrt(np.diag([1.0, -1.0]))

    @settings(max_examples=20, deadline=None)
    @given(a=cmat(3, 3))
    def test_property(self, a):
        m = a.conj().T @ a
        r = psd_sqrt(m)
        assert np.max(np.abs(r @ r - m)) <= 1e-10 * (1 + np.max(np.abs(m)))


class TestMinimalRankFactor:
    def test_zero(self):
        x = minimal_rank_factor(np.zeros((3, 3)))
        assert x.shape == (0, 3)

    def test_diagonal_rank_one(self):
        x = minimal_rank_factor(np.diag([4.0, 0.0]))
        assert x.shape == (1, 2)
        np.testing.assert_allclose(x, [[2.0, 0.0]], atol=1e-12)

    def test_rank_two_from_construction(self, rng):
        y = random_complex(rng, 2, 5)
        m = y.conj().T @ y
        x = minimal_rank_factor(m)
        assert x.shape[0] == 2
        assert np.max(np.abs(x.conj().T @ x - m)) <= 1e-9 * (1 + np.max(np.abs(m)))

    def test_rank_stability(self, rng):
        y = random_complex(rng, 3, 6)
        m = y.conj().T @ y
        x = minimal_rank_factor(m)
        again = minimal_rank_factor(x.conj().T @ x)
        assert again.shape[0] == x.shape[0]

    def test_deterministic(self, rng):
        y = random_complex(rng, 3, 4)
        m = y.conj().T @ y
        np.testing.assert_array_equal(minimal_rank_factor(m), minimal_rank_factor(m.copy()))


class TestLeastSquares:
    def test_identity_system(self, rng):
        b = random_complex(rng, 4)
        x, res = least_squares_solve(np.eye(4), b)
        np.testing.assert_allclose(x, b, atol=1e-12)
        assert res == pytest.approx(0.0, abs=1e-12)

    def test_consistent_column(self):
        a = np.array([[1.0], [0.0]])
        x, res = least_squares_solve(a, np.array([3.0, 0.0]))
        assert x[0] == pytest.approx(3.0)
        assert res == pytest.approx(0.0, abs=1e-12)

    def test_residual_is_distance_to_range(self, rng):
        # orthonormalization oracle: project b onto range(a) with QR
        a = random_complex(rng, 6, 3)
        b = random_complex(rng, 6)
        q, _ = np.linalg.qr(a)
        distance = np.linalg.norm(b - q @ (q.conj().T @ b))
        _, res = least_squares_solve(a, b)
        assert res == pytest.approx(distance, rel=1e-10)

    def test_minimal_norm(self, rng):
        # underdetermined: the lstsq solution must be the minimal-norm one
        a = random_complex(rng, 2, 5)
        b = random_complex(rng, 2)
        x, _ = least_squares_solve(a, b)
        x2 = a.conj().T @ np.linalg.solve(a @ a.conj().T, b)
        np.testing.assert_allclose(x, x2, atol=1e-10)


class TestMatrixExp:
    def test_zero(self):
        np.testing.assert_allclose(matrix_exp(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        m = matrix_exp(np.diag([1.0 + 0j, -2.0]))
        np.testing.assert_allclose(m, np.diag([np.e, np.exp(-2.0)]), rtol=1e-13)

    def test_nilpotent_two_terms(self):
        m = matrix_exp(np.array([[0.0, 1.0], [0.0, 0.0]]))
        np.testing.assert_allclose(m, [[1.0, 1.0], [0.0, 1.0]], atol=1e-14)

    def test_commuting_product(self, rng):
        a = random_complex(rng, 4, 4, scale=0.5)
        # polynomials in one matrix commute
        b = 0.3 * a @ a - 0.7 * a + 0.1 * np.eye(4)
        lhs = matrix_exp(a + b)
        rhs = matrix_exp(a) @ matrix_exp(b)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10
