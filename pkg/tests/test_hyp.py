"""Gauss hypergeometric engine: series, Euler transform, connection formulas
and the region dispatcher, against an arbitrary-precision oracle."""
import mpmath as mp
import numpy as np
import pytest

from pwhyp.errors import LogarithmicCase, NoConvergence, PoleError
from pwhyp.hyp import (
    connect_1_over_x,
    connect_at_1,
    euler_transform,
    f21_eval,
    f21_series,
)

mp.mp.dps = 40


def oracle(a, b, c, x):
    return complex(mp.hyp2f1(a, b, c, mp.mpf(float(x))))


class TestSeries:
    def test_at_zero(self):
        assert f21_series(0.9, 1.7, 2.3, 0.0) == 1.0

    def test_terminating_polynomial(self):
        # F[-2,3;1;x] = 1 - 6x + 6x^2
        for x in (0.3, 0.9, 2.5, -1.7):
            want = 1.0 - 6.0 * x + 6.0 * x * x
            assert f21_series(-2.0, 3.0, 1.0, x) == pytest.approx(want, rel=1e-14)

    def test_gauss_summation_limit(self):
        # F[1,1;3;x] -> 2 as x -> 1; the limit is the Gauss bracket value
        from pwhyp.special import gamma_bracket

        assert gamma_bracket([3.0, 1.0], [2.0, 2.0]) == pytest.approx(2.0, rel=1e-14)
        val = f21_series(1.0, 1.0, 3.0, 0.999)
        assert val == pytest.approx(2.0, abs=2e-2)

    def test_against_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            a, b = rng.uniform(-3, 3, 2)
            c = rng.uniform(0.2, 4.0)
            x = rng.uniform(-0.65, 0.65)
            assert f21_series(a, b, c, x) == pytest.approx(
                oracle(a, b, c, x).real, rel=1e-13, abs=1e-13
            )

    def test_complex_parameters(self):
        a = 0.9 + 1.3j
        val = f21_series(a, np.conj(a), 1.5, 0.45)
        ref = oracle(mp.mpc(0.9, 1.3), mp.mpc(0.9, -1.3), 1.5, 0.45)
        assert abs(val - ref) < 1e-13 * abs(ref)

    def test_c_pole_raises(self):
        with pytest.raises(PoleError):
            f21_series(0.5, 0.7, -2.0, 0.3)

    def test_c_pole_after_termination_ok(self):
        # series terminates at k=2, pole of c at k=4 is never reached
        val = f21_series(-2.0, 1.0, -4.0, 0.5)
        assert np.isfinite(val)

    def test_divergent_argument(self):
        with pytest.raises(NoConvergence):
            f21_series(0.5, 0.7, 1.1, 1.2)


class TestEulerTransform:
    def test_at_zero(self):
        assert euler_transform(1.0, 1.0, 3.0, 0.0) == pytest.approx(1.0)

    def test_frozen_value(self):
        # (1-x) F[2,2;3;x] at x=0.5 equals F[1,1;3;0.5]
        assert euler_transform(1.0, 1.0, 3.0, 0.5) == pytest.approx(
            1.2274112777602188, rel=1e-13
        )

    def test_against_series(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a, b = rng.uniform(-2, 2, 2)
            c = rng.uniform(0.5, 3.5)
            x = rng.uniform(-0.6, 0.6)
            assert euler_transform(a, b, c, x) == pytest.approx(
                f21_series(a, b, c, x), rel=1e-12, abs=1e-12
            )

    def test_involution(self):
        """Applying the transform twice returns the original value."""
        rng = np.random.default_rng(23)
        for _ in range(20):
            a, b = rng.uniform(-2, 2, 2)
            c = rng.uniform(0.5, 3.5)
            x = rng.uniform(-0.6, 0.6)
            once = euler_transform(a, b, c, x)
            e = c - a - b
            twice = (1 - x) ** e * euler_transform(c - a, c - b, c, x)
            assert twice == pytest.approx(once, rel=1e-12, abs=1e-12)


class TestConnectAt1:
    def test_cross_region_consistency(self):
        a, b, c = 0.5, 0.7, 1.4
        for z in (0.72, 0.8, 0.9, 0.97):
            assert connect_at_1(a, b, c, z) == pytest.approx(
                oracle(a, b, c, z).real, rel=1e-11
            )

    def test_terminating_bypass(self):
        # polynomial case evaluated exactly, no logarithmic-case rejection
        val = connect_at_1(-2.0, 3.0, 1.0, 0.9)
        assert val == pytest.approx(0.46, rel=1e-13)

    def test_logarithmic_case_raises(self):
        with pytest.raises(LogarithmicCase):
            connect_at_1(0.5, 0.5, 2.0, 0.9)

    def test_coefficient_structure(self):
        """Leading coefficients are the two gamma quotients of the formula."""
        from pwhyp.special import gamma_bracket

        a, b, c = 0.5, 0.7, 1.4
        t = 1e-9
        val = connect_at_1(a, b, c, 1.0 - t)
        ca = gamma_bracket([c, c - a - b], [c - a, c - b]).real
        cb = gamma_bracket([c, a + b - c], [a, b]).real
        assert val == pytest.approx(ca + cb * t ** (c - a - b), rel=1e-7)


class TestConnect1OverX:
    def test_argument_to_zero(self):
        # x -> infinity means argument 1/x -> 0 and F -> 1
        val = connect_1_over_x(0.5, 0.7, 1.4, 1.9999)
        ref = oracle(0.5, 0.7, 1.4, 1.0 / 1.9999)
        assert val == pytest.approx(ref.real, rel=1e-9)

    def test_matches_series_at_half(self):
        # same function computed on the two sides of the map x <-> 1/x
        val = connect_1_over_x(1.0, 1.0, 2.7, 1.25)
        ref = f21_series(1.0, 1.0, 2.7, 0.8)
        assert val == pytest.approx(ref, rel=1e-12)

    def test_degenerate_case_raises(self):
        with pytest.raises(LogarithmicCase):
            connect_1_over_x(1.0, 1.0, 3.0, 1.5)


class TestDispatcher:
    def test_at_zero(self):
        assert f21_eval(0.5, 0.7, 1.4, 0.0) == 1.0

    def test_overlap_band(self):
        """Series and connection agree across the region seam."""
        rng = np.random.default_rng(31)
        count = 0
        while count < 200:
            a, b = rng.uniform(-1.5, 1.5, 2)
            c = rng.uniform(0.6, 3.0)
            if abs((c - a - b) - round(c - a - b)) < 0.05:
                continue
            x = rng.uniform(0.65, 0.75)
            s = f21_series(a, b, c, x)
            k = connect_at_1(a, b, c, x)
            assert abs(s - k) <= 1e-10 * max(1.0, abs(s))
            count += 1

    def test_frozen_regression(self):
        assert f21_eval(0.5, 0.7, 1.4, 0.99) == pytest.approx(2.0509766907538026, rel=1e-11)
        assert f21_eval(0.5, 0.7, 1.4, 0.75) == pytest.approx(1.3528294920747056, rel=1e-12)

    def test_terminating_exactness(self):
        """Terminating series match the exact polynomial on [0, 5]."""
        rng = np.random.default_rng(37)
        for n in (1, 3, 7, 12, 20):
            b = 1.3
            c = 2.1
            xs = rng.uniform(0.0, 5.0, 8)
            for x in xs:
                if abs(x - 1.0) < 1e-6:
                    continue
                coeffs = [1.0]
                for k in range(n):
                    coeffs.append(coeffs[-1] * (-n + k) * (b + k) / ((c + k) * (k + 1.0)))
                want = 0.0
                for ck in reversed(coeffs):
                    want = want * x + ck
                got = f21_series(-float(n), b, c, x)
                # tolerance scales with the polynomial's condition number:
                # both evaluations cancel against the same huge terms
                cond = 0.0
                for k, ck in enumerate(coeffs):
                    cond += abs(ck) * x**k
                assert abs(got - want) <= 1e-13 * max(cond, 1.0)

    def test_contiguous_relation(self):
        """c F(a) - c F(a+1) + b x F(a+1,b+1;c+1) = 0."""
        rng = np.random.default_rng(41)
        for _ in range(40):
            a, b = rng.uniform(-2, 2, 2)
            c = rng.uniform(0.5, 3.0)
            x = rng.uniform(-0.6, 0.6)
            lhs = (
                c * f21_series(a, b, c, x)
                - c * f21_series(a + 1.0, b, c, x)
                + b * x * f21_series(a + 1.0, b + 1.0, c + 1.0, x)
            )
            scale = max(1.0, abs(c * f21_series(a, b, c, x)))
            assert abs(lhs) <= 1e-10 * scale

    def test_inverse_argument_region(self):
        # for x > 1 the dispatcher returns F(1/x)
        val = f21_eval(1.0, 1.0, 2.7, 2.0)
        assert val == pytest.approx(f21_series(1.0, 1.0, 2.7, 0.5), rel=1e-12)

    def test_vectorized(self):
        x = np.array([0.1, 0.5, 0.74, 0.9, 1.5, 3.0])
        vals = f21_eval(0.5, 0.7, 1.4, x)
        for xi, vi in zip(x, vals):
            w = xi if xi < 1 else 1.0 / xi
            assert vi == pytest.approx(oracle(0.5, 0.7, 1.4, w).real, rel=1e-10)
