import numpy as np
import pytest

from qsconv import fixtures as fx
from qsconv.algebra import (Functional, compose_with_expectation, conv_exp, convolve,
                            counit_functional, delta_multiplicativity_residual,
                            function_algebra, group_algebra, is_positive_functional,
                            r_map, verify_hyperbialgebra)
from qsconv.errors import NoIdentity, NotAGroup, NotAssociative


def series_conv_exp(f, t, h, terms=30):
    """Brute-force oracle: sum_{n<=terms} t^n/n! f^{*n} with f^{*0} = counit."""
    acc = h.counit.astype(complex).copy()
    power = Functional(h.counit.copy())
    fact = 1.0
    for n in range(1, terms + 1):
        power = convolve(power, f, h)
        fact *= n
        acc = acc + (t ** n / fact) * power.coeffs
    return acc


class TestFunctionAlgebra:
    def test_trivial_monoid(self):
        h = function_algebra([[0]])
        assert h.dim == 1
        np.testing.assert_allclose(h.coproduct_of(h.unit), np.outer(h.unit, h.unit))
        assert h.counit_of(h.unit) == pytest.approx(1.0)

    def test_z2_coproduct_by_enumeration(self, cz2):
        # Delta(delta_u) = sum over st = u of delta_s x delta_t
        table = fx.z2_table()
        expected = np.zeros((2, 2))
        for s in range(2):
            for t in range(2):
                if table[s, t] == 1:
                    expected[s, t] = 1.0
        np.testing.assert_allclose(cz2.coproduct[1], expected)
        np.testing.assert_allclose(expected, [[0, 1], [1, 0]])

    def test_s3_axioms(self, cs3):
        rpt = verify_hyperbialgebra(cs3, tol=1e-12)
        assert rpt.passed
        assert all(c.residual <= 1e-12 for c in rpt.checks)

    def test_rejects_non_associative(self):
        with pytest.raises((NotAssociative, NoIdentity)):
            function_algebra([[0, 1], [0, 0]])

    def test_rejects_no_identity(self):
        with pytest.raises(NoIdentity):
            function_algebra([[1, 1], [1, 1]])


class TestGroupAlgebra:
    def test_trivial_group(self):
        h = group_algebra([[0]])
        assert h.dim == 1
        np.testing.assert_allclose(h.coproduct[0], [[1.0]])

    def test_z2_star_and_counit(self):
        h = group_algebra(fx.z2_table())
        u = np.array([0.0, 1.0], dtype=complex)
        np.testing.assert_allclose(h.star_vec(u), u)  # u is self-inverse
        assert h.counit_of(u) == pytest.approx(1.0)

    def test_z3_axioms_and_faithful_rep(self, gz3):
        rpt = verify_hyperbialgebra(gz3, tol=1e-12)
        assert rpt.passed
        flat = gz3.rep.reshape(3, -1)
        assert np.linalg.matrix_rank(flat) == 3

    def test_rejects_non_group(self):
        with pytest.raises(NotAGroup):
            group_algebra([[0, 0], [0, 0]])


class TestVerifier:
    def test_builtins_pass(self, cz2, gz3, cs3):
        for h in (cz2, gz3, cs3):
            assert verify_hyperbialgebra(h, tol=1e-12).passed

    def test_corrupted_coproduct_detected(self, cz2):
        from qsconv.algebra import Coalgebra, FiniteHyperbialgebra

        cop = cz2.coproduct.copy()
        cop[1, 0, 0] += 0.1
        bad = FiniteHyperbialgebra(cz2.algebra, Coalgebra(cop, cz2.counit), True)
        rpt = verify_hyperbialgebra(bad)
        assert not rpt.passed
        assert rpt.residual("coassociativity") >= 0.05


class TestConvolution:
    def test_counit_is_identity(self, cs3, rng):
        f = Functional(rng.standard_normal(6) + 1j * rng.standard_normal(6))
        eps = counit_functional(cs3)
        np.testing.assert_allclose(convolve(eps, f, cs3).coeffs, f.coeffs, atol=1e-13)
        np.testing.assert_allclose(convolve(f, eps, cs3).coeffs, f.coeffs, atol=1e-13)

    def test_group_like_pointwise(self, gz3, rng):
        f = Functional(rng.standard_normal(3) + 0j)
        g = Functional(rng.standard_normal(3) + 0j)
        np.testing.assert_allclose(convolve(f, g, gz3).coeffs, f.coeffs * g.coeffs,
                                   atol=1e-13)

    def test_uniform_convolves_to_uniform(self, cz2):
        # 2x2 enumeration: uniform measure is idempotent under convolution
        uni = Functional(np.full(2, 0.5, dtype=complex))
        out = convolve(uni, uni, cz2)
        np.testing.assert_allclose(out.coeffs, uni.coeffs, atol=1e-14)

    def test_associative(self, cs3, rng):
        fs = [Functional(rng.standard_normal(6) + 1j * rng.standard_normal(6))
              for _ in range(3)]
        lhs = convolve(convolve(fs[0], fs[1], cs3), fs[2], cs3)
        rhs = convolve(fs[0], convolve(fs[1], fs[2], cs3), cs3)
        np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


class TestConvExp:
    def test_zero_generator(self, cz2):
        for t in (0.0, 0.7, 2.0):
            out = conv_exp(Functional(np.zeros(2)), t, cz2)
            np.testing.assert_allclose(out.coeffs, cz2.counit, atol=1e-14)

    def test_z2_series_oracle_and_closed_form(self, cz2):
        # rate c = 1/2 at time t = 1; the 30-term series sums to 0.3160602794...
        c, t = 0.5, 1.0
        f = Functional(np.array([-c, c], dtype=complex))
        oracle = series_conv_exp(f, t, cz2)
        out = conv_exp(f, t, cz2)
        np.testing.assert_allclose(out.coeffs, oracle, atol=1e-12)
        closed = (1 - np.exp(-2 * c * t)) / 2
        assert closed == pytest.approx(0.31606027941427884, abs=1e-12)
        assert out.coeffs[1].real == pytest.approx(closed, abs=1e-12)
        # the value 0.4323323... arises at ct = 1, e.g. c = 1, t = 1
        g = Functional(np.array([-1.0, 1.0], dtype=complex))
        val = conv_exp(g, 1.0, cz2).coeffs[1].real
        assert val == pytest.approx(0.43233235838169365, abs=1e-12)
        np.testing.assert_allclose(conv_exp(g, 1.0, cz2).coeffs,
                                   series_conv_exp(g, 1.0, cz2), atol=1e-10)

    def test_semigroup_property(self, cs3, rng):
        f = Functional(0.5 * (rng.standard_normal(6) + 1j * rng.standard_normal(6)))
        s, t = 0.4, 0.9
        lhs = convolve(conv_exp(f, s, cs3), conv_exp(f, t, cs3), cs3)
        rhs = conv_exp(f, s + t, cs3)
        np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-10)

    def test_derivative_at_zero(self, gz3, rng):
        f = Functional(rng.standard_normal(3) + 1j * rng.standard_normal(3))
        h_step = 1e-5
        diff = (conv_exp(f, h_step, gz3).coeffs - conv_exp(f, -h_step, gz3).coeffs) / (2 * h_step)
        np.testing.assert_allclose(diff, f.coeffs, atol=1e-6)

    def test_powers_match_convolution_powers(self, cz2):
        # counit o M_f^n = f^{*n}
        from qsconv.algebra import convolution_matrix

        f = Functional(np.array([0.3, -0.2], dtype=complex))
        m = convolution_matrix(f, cz2)
        power = counit_functional(cz2)
        row = cz2.counit.copy()
        for _ in range(4):
            power = convolve(power, f, cz2)
            row = row @ m
            np.testing.assert_allclose(row, power.coeffs, atol=1e-13)


class TestPositivity:
    def test_counit_positive(self, cz2, gz3, cs3):
        for h in (cz2, gz3, cs3):
            assert is_positive_functional(counit_functional(h), h).is_psd

    def test_negated_counit_not_positive(self, cz2):
        assert not is_positive_functional(Functional(-cz2.counit), cz2).is_psd

    def test_markov_state_positive(self, cz2):
        f = Functional(np.array([-0.5, 0.5], dtype=complex))
        lam = conv_exp(f, 0.7, cz2)
        assert is_positive_functional(lam, cz2).is_psd

    def test_convolution_of_positive_is_positive(self, gz3, rng):
        # bialgebra: positive * positive stays positive (Gram check)
        for _ in range(5):
            a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            fa = Functional(np.einsum("ijk,k->i", gz3.star_products(),
                                      np.abs(a) ** 2 * 0 + a * np.conj(a)))
            # simpler: vector states through the regular representation
            va = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            vb = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            fa = Functional(np.array([np.vdot(va, gz3.rep[i] @ va) for i in range(3)]))
            fb = Functional(np.array([np.vdot(vb, gz3.rep[i] @ vb) for i in range(3)]))
            assert is_positive_functional(fa, gz3).is_psd
            assert is_positive_functional(fb, gz3).is_psd
            assert is_positive_functional(convolve(fa, fb, gz3), gz3).is_psd


class TestRMap:
    def test_counit_gives_identity(self, cz2):
        eps_blocks = cz2.counit.reshape(2, 1, 1)
        r = r_map(eps_blocks, cz2)
        # (id x eps) Delta = id: coefficient of b_j in r[i] must be delta_ij
        for i in range(2):
            for j in range(2):
                assert r[i, j, 0, 0] == pytest.approx(1.0 if i == j else 0.0)

    def test_group_like(self, gz3, rng):
        phi = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
        r = r_map(phi, gz3)
        for g in range(3):
            for j in range(3):
                expected = phi[g] if j == g else np.zeros((2, 2))
                np.testing.assert_allclose(r[g, j], expected, atol=1e-13)

    def test_counit_contraction_recovers_map(self, cz2, rng):
        # (eps x id) o r_map(phi) = phi
        phi = rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3))
        r = r_map(phi, cz2)
        recovered = np.einsum("j,ijab->iab", cz2.counit, r)
        np.testing.assert_allclose(recovered, phi, atol=1e-13)


class TestComposeWithExpectation:
    def test_identity_expectation(self, cz2, rng):
        from qsconv.expectation import ConditionalExpectation

        p = ConditionalExpectation(np.eye(2), np.eye(2))
        phi = rng.standard_normal((2, 2, 2)) + 0j
        np.testing.assert_allclose(compose_with_expectation(phi, p), phi, atol=1e-12)

    def test_counit_through_projection(self, gz3):
        # phi_tilde = restricted counit composed with the Haar-state projection
        from qsconv.expectation import ConditionalExpectation

        haar = np.zeros(3, dtype=complex)
        haar[0] = 1.0  # trace state on C[Z3]
        pm = np.outer(gz3.unit, haar)
        p = ConditionalExpectation(pm, gz3.unitentry if False else gz3.unit[:, None])
        eps_tilde = np.array([[[1.0 + 0j]]])  # counit of the scalars
        lifted = compose_with_expectation(eps_tilde, p)
        np.testing.assert_allclose(lifted[:, 0, 0], haar @ np.eye(3), atol=1e-12)

    def test_delsarte_lift_agrees_with_direct_evaluation(self, rng):
        from qsconv import fixtures
        from qsconv.expectation import delsarte_expectation

        h, action = fixtures.z3_delsarte_spec()
        p = delsarte_expectation(h, action)
        phi_tilde = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        lifted = compose_with_expectation(phi_tilde, p)
        comp = p.compression
        for i in range(3):
            direct = np.einsum("r,rab->ab", comp[:, i], phi_tilde)
            np.testing.assert_allclose(lifted[i], direct, atol=1e-12)


def test_multiplicativity_residual_zero_for_bialgebras(cz2, gz3, cs3):
    for h in (cz2, gz3, cs3):
        assert delta_multiplicativity_residual(h) <= 1e-13
