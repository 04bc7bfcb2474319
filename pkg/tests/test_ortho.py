"""Jacobi polynomials, Phi_p, Psi_s, local expansions and the handles."""
import math

import mpmath as mp
import numpy as np
import pytest

from pwhyp.errors import DomainError, PoleError, SingularPoint
from pwhyp.ortho import (
    Params,
    PhiFunction,
    PsiFunction,
    SpectralIndex,
    XiFunction,
    _phi_left_family,
    jacobi_eval,
    jacobi_norm_sq,
    lambda_basis,
    n_min,
    phi_norm_sq,
    phi_p,
    phi_p_local,
    psi_local,
    psi_s,
    xi_mu,
)
from pwhyp.special import sin_ratio, sinpi

mp.mp.dps = 30

P = Params(0.3, 0.5, 0.25)


class TestParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            Params(1.2, 0.5, 0.25)
        with pytest.raises(DomainError):
            Params(0.0, 0.5, 0.25)
        with pytest.raises(DomainError):
            Params(0.3, -1.0, 0.25)
        with pytest.raises(DomainError):
            Params(0.3, 0.5, 1.0)

    def test_positivity_flag(self):
        assert Params(0.3, 0.5, 0.25).positive_definite
        assert Params(-0.4, 0.7, 0.6).positive_definite
        # sin((alpha+theta) pi) < 0 < sin(theta pi)
        assert not Params(0.9, 0.5, 0.3).positive_definite

    def test_n_min(self):
        assert n_min(P) == -1
        assert n_min(Params(0.5, -0.3, 0.1)) == 0

    def test_index_validation(self):
        with pytest.raises(DomainError):
            SpectralIndex.make(P, n_min(P) - 1)
        idx = SpectralIndex.make(P, 2)
        assert idx.p == pytest.approx(2.25)


class TestJacobi:
    def test_constant(self):
        for y in (-0.8, 0.0, 0.9):
            assert jacobi_eval(0, 0.3, 0.5, y) == 1.0

    def test_linear(self):
        # P_1 = (alpha+1) + (alpha+beta+2)(y-1)/2
        a, b = 0.3, 0.5
        for y in (-0.5, 0.4, 1.0):
            want = (a + 1.0) + (a + b + 2.0) * (y - 1.0) / 2.0
            assert jacobi_eval(1, a, b, y) == pytest.approx(want, rel=1e-14)
        assert jacobi_eval(1, a, b, 0.4) == pytest.approx(0.46, rel=1e-14)

    def test_three_formulas_agree(self):
        val1 = jacobi_eval(4, 0.3, 0.5, 0.2, formula=1)
        val2 = jacobi_eval(4, 0.3, 0.5, 0.2, formula=2)
        val3 = jacobi_eval(4, 0.3, 0.5, 0.2, formula=3)
        assert val1 == pytest.approx(0.31192614, rel=1e-8)
        assert val2 == pytest.approx(val1, rel=1e-11)
        assert val3 == pytest.approx(val1, rel=1e-11)

    def test_norm_legendre(self):
        assert jacobi_norm_sq(0, 0.0, 0.0) == pytest.approx(2.0, rel=1e-14)
        assert jacobi_norm_sq(1, 0.0, 0.0) == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_norm_against_quadrature(self):
        # quadrature oracle value, frozen from a 30-digit run
        assert jacobi_norm_sq(3, 0.3, 0.5) == pytest.approx(
            0.42965017985821804, rel=1e-9
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            jacobi_eval(2, 0.3, 0.5, 1.5)
        with pytest.raises(DomainError):
            jacobi_eval(2, 0.3, 0.5, 1.0, formula=3)


class TestPhi:
    def test_frozen_values(self):
        idx = SpectralIndex.make(P, 2)
        assert phi_p(P, SpectralIndex.make(P, 0), 0.37) == pytest.approx(
            2.5574781339191423, rel=1e-12
        )
        assert phi_p(P, idx, 0.37) == pytest.approx(-374.9316864993456, rel=1e-12)
        assert phi_p(P, idx, 0.9) == pytest.approx(596.79232532924725, rel=1e-10)
        assert phi_p(P, idx, 1.1) == pytest.approx(-52.365727429560751, rel=1e-9)
        assert phi_p(P, idx, 2.5) == pytest.approx(-0.12803831619147064, rel=1e-12)
        assert phi_p(P, SpectralIndex.make(P, 12), 0.85) == pytest.approx(
            -5.6643713821091434e25, rel=1e-11
        )

    def test_singular_point(self):
        with pytest.raises(SingularPoint):
            phi_p(P, SpectralIndex.make(P, 1), 1.0)
        with pytest.raises(DomainError):
            phi_p(P, SpectralIndex.make(P, 1), -0.5)

    def test_theta_zero_reduction(self):
        """At theta = 0 the family collapses onto scaled Jacobi polynomials
        and vanishes identically beyond the singular point."""
        p0 = Params(0.3, 0.5, 0.0)
        rng = np.random.default_rng(3)
        xs = rng.uniform(0.02, 0.98, 20)
        for n in range(7):
            idx = SpectralIndex.make(p0, n)
            cn = (-1) ** n * math.gamma(2 * n + 0.3 + 0.5 + 2.0) * math.factorial(n) / math.gamma(n + 1.5)
            for x in xs:
                want = cn * jacobi_eval(n, 0.3, 0.5, 2.0 * x - 1.0)
                got = phi_p(p0, idx, float(x))
                assert abs(got - want) <= 1e-10 * max(abs(want), 1e-30)
            for x in (1.2, 3.0, 50.0):
                assert phi_p(p0, idx, x) == 0.0

    def test_decay_at_infinity(self):
        """Phi_p x^(alpha+beta+p+1) approaches its gamma-quotient limit."""
        from pwhyp.special import gamma_bracket

        idx = SpectralIndex.make(P, 1)
        p = idx.p
        limit = gamma_bracket([1.0 + p + 0.3], [-p]).real
        x = 1e5
        val = phi_p(P, idx, x) * x ** (0.3 + 0.5 + p + 1.0)
        assert val == pytest.approx(limit, rel=1e-3)

    def test_recurrence_matches_series_small_n(self):
        """Family recurrence agrees with the direct defining series."""
        for n in range(0, 7):
            idx = SpectralIndex.make(P, n)
            p = idx.p
            for x in (0.15, 0.45, 0.65):
                direct = (
                    mp.gamma(2 * p + 0.3 + 0.5 + 2) / mp.gamma(1.5)
                    * mp.hyp2f1(-p, p + 0.3 + 0.5 + 1, 1.5, x)
                )
                assert phi_p(P, idx, x) == pytest.approx(float(direct), rel=1e-11)

    def test_large_index_against_oracle(self):
        idx = SpectralIndex.make(P, 25)
        p = idx.p
        for x in (0.3, 0.92):
            direct = (
                mp.gamma(2 * p + 0.8 + 2) / mp.gamma(1.5)
                * mp.hyp2f1(-p, p + 1.8, 1.5, x)
            )
            assert phi_p(P, idx, x) == pytest.approx(float(direct), rel=1e-10)

    def test_near_one_consistency(self):
        """Direct branch evaluation and local expansions agree around 1."""
        idx = SpectralIndex.make(P, 3)
        p = idx.p
        for x in (0.72, 0.85, 0.96):
            direct = float(
                mp.gamma(2 * p + 0.8 + 2) / mp.gamma(1.5)
                * mp.hyp2f1(-p, p + 1.8, 1.5, x)
            )
            assert phi_p(P, idx, x) == pytest.approx(direct, rel=1e-9)
        for x in (1.04, 1.15, 1.29):
            direct = float(
                mp.gamma(1 + p + 0.3) / mp.gamma(-p)
                * mp.hyp2f1(p + 1.3, p + 1.8, 2 * p + 2.8, 1.0 / x)
                * mp.mpf(x) ** (-0.8 - p - 1.0)
            )
            assert phi_p(P, idx, x) == pytest.approx(direct, rel=1e-9)

    def test_family_deep_nodes(self):
        # stable at double-exponentially small distances from 1
        t = np.array([1e-30, 1e-100])
        x = 1.0 - t
        fam = _phi_left_family(P, 3, x, t)
        le = phi_p_local(P, SpectralIndex.make(P, 3))
        want = le.a_left + le.b_left * t ** (-0.3)
        np.testing.assert_allclose(fam[3 - n_min(P)], want, rtol=1e-10)


class TestPhiLocal:
    def test_gluing_invariant(self):
        """B coefficients match exactly; the A ratio is the sine ratio."""
        for n in range(n_min(P), 7):
            le = phi_p_local(P, SpectralIndex.make(P, n))
            assert le.b_left == le.b_right
            assert le.a_left / le.a_right == pytest.approx(
                sin_ratio(P.alpha, P.theta), rel=1e-12
            )

    def test_frozen_coefficients(self):
        le = phi_p_local(P, SpectralIndex.make(P, 2))
        assert le.a_left == pytest.approx(1373.8072500769855, rel=1e-12)
        assert le.b_left == pytest.approx(-341.47364349117821, rel=1e-12)
        assert le.a_right == pytest.approx(983.53740005408931, rel=1e-12)

    def test_theta_zero_right_side_vanishes(self):
        p0 = Params(0.3, 0.5, 0.0)
        le = phi_p_local(p0, SpectralIndex.make(p0, 2))
        assert le.a_right == 0.0
        assert le.b_right == 0.0

    def test_sin_ratio_shift_invariance(self):
        """A_left/A_right depends on p only through p mod 1."""
        le0 = phi_p_local(P, SpectralIndex.make(P, 0))
        le5 = phi_p_local(P, SpectralIndex.make(P, 5))
        assert le0.a_left / le0.a_right == pytest.approx(
            le5.a_left / le5.a_right, rel=1e-11
        )


class TestPsi:
    def test_frozen_values(self):
        assert psi_s(P, 0.7, 0.4) == pytest.approx(1.5199162510372843, rel=1e-12)
        assert psi_s(P, 0.7, 0.9) == pytest.approx(4.9111792034975223, rel=1e-10)
        assert psi_s(P, 0.7, 1.15) == pytest.approx(3.8709292508842821, rel=1e-10)
        assert psi_s(P, 0.7, 2.0) == pytest.approx(-0.18390580758032603, rel=1e-11)
        assert psi_s(P, 12.0, 0.95) == pytest.approx(7353902441811.3065, rel=1e-8)

    def test_even_in_s(self):
        for x in (0.4, 1.7):
            assert psi_s(P, 0.7, x) == psi_s(P, -0.7, x)

    def test_s_floor(self):
        with pytest.raises(PoleError):
            psi_s(P, 1e-9, 0.5)

    def test_left_values_real_series(self):
        # on (0,1) the function is the real conjugate-pair series
        val = psi_s(P, 1.3, 0.55)
        ref = mp.re(mp.hyp2f1(mp.mpc(0.9, 1.3), mp.mpc(0.9, -1.3), 1.5, 0.55))
        assert val == pytest.approx(float(ref), rel=1e-12)

    def test_boundary_data_glued(self):
        for s in (0.3, 0.7, 2.0, 11.0):
            le = psi_local(P, s)
            assert le.b_left == pytest.approx(le.b_right, rel=1e-11)
            assert le.a_right * sin_ratio(P.alpha, P.theta) == pytest.approx(
                le.a_left, rel=1e-11
            )

    def test_local_matches_direct(self):
        s = 0.7
        le = psi_local(P, s)
        A = (0.3 + 0.5 + 1.0) / 2.0
        B = (-0.3 + 0.5 + 1.0) / 2.0
        for eps in (0.04, 0.12):
            u = float(mp.re(mp.hyp2f1(mp.mpc(A, s), mp.mpc(A, -s), 1.3, eps)))
            v = float(mp.re(mp.hyp2f1(mp.mpc(B, -s), mp.mpc(B, s), 0.7, eps)))
            loc = le.a_left * u + le.b_left * v * eps ** (-0.3)
            assert psi_s(P, s, 1.0 - eps) == pytest.approx(loc, rel=1e-10)
            ur = float(mp.re(mp.hyp2f1(mp.mpc(A, s), mp.mpc(A, -s), 1.3, -eps)))
            vr = float(mp.re(mp.hyp2f1(mp.mpc(B, -s), mp.mpc(B, s), 0.7, -eps)))
            locr = le.a_right * ur + le.b_right * vr * eps ** (-0.3)
            assert psi_s(P, s, 1.0 + eps) == pytest.approx(locr, rel=1e-10)


class TestLambdaBasis:
    def test_modulus_normalization(self):
        """|Lambda(s,x) x^((alpha+beta+1)/2 + is)| -> 1 at infinity."""
        s = 0.9
        x = 1e6
        val = lambda_basis(P, s, x) * np.exp((0.9 + 1j * s) * np.log(x))
        assert abs(val) == pytest.approx(1.0, abs=1e-5)

    def test_conjugation(self):
        x = 2.7
        assert lambda_basis(P, -0.9, x) == pytest.approx(
            np.conj(lambda_basis(P, 0.9, x)), rel=1e-13
        )

    def test_psi_is_real_combination(self):
        """On (1, inf), Psi is the real part of a multiple of Lambda."""
        from pwhyp.ortho import _psi_m, _psi_prefactor

        s, x = 0.7, 1.9
        m = _psi_m(P, s)
        val = _psi_prefactor(P) * (m * lambda_basis(P, s, x)).real
        assert psi_s(P, s, x) == pytest.approx(val, rel=1e-12)


class TestXi:
    def test_values(self):
        assert xi_mu(1.0, 0.5) == 0.5
        assert xi_mu(1.0, 2.0) == 0.0
        assert xi_mu(0.0, 0.8) == 1.0  # indicator of (0,1)
        assert xi_mu(0.0, 1.5) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            xi_mu(-0.5, 0.5)

    def test_handle(self):
        h = XiFunction(0.6)
        assert not h.right_support
        x = np.array([0.2, 0.9])
        np.testing.assert_allclose(h.eval_left(x, 1.0 - x), (1.0 - x) ** 0.6)


class TestNorms:
    def test_frozen(self):
        assert phi_norm_sq(P, SpectralIndex.make(P, 0)) == pytest.approx(
            2.6849821533490705, rel=1e-13
        )
        assert phi_norm_sq(P, SpectralIndex.make(P, 2)) == pytest.approx(
            81295.45868010996, rel=1e-13
        )

    def test_theta_zero_value(self):
        # [Gamma(a+b+2)/Gamma(b+1)]^2 B(b+1, a+1) at n = 0
        p0 = Params(0.3, 0.5, 0.0)
        assert phi_norm_sq(p0, SpectralIndex.make(p0, 0)) == pytest.approx(
            1.6977608233662428, rel=1e-13
        )

    def test_jacobi_scaling_link(self):
        """theta = 0 norms equal the scaled classical Jacobi norms."""
        p0 = Params(0.3, 0.5, 0.0)
        for n in range(4):
            cn = math.gamma(2 * n + 2.8) * math.factorial(n) / math.gamma(n + 1.5)
            want = cn**2 * 2.0 ** (-1.8) * jacobi_norm_sq(n, 0.3, 0.5)
            got = phi_norm_sq(p0, SpectralIndex.make(p0, n))
            assert got == pytest.approx(want, rel=1e-12)
