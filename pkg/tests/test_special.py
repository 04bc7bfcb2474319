"""Gamma bedrock: log-gamma, brackets, pole bookkeeping, sine ratios."""
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwhyp.errors import DomainError, PoleError
from pwhyp.special import (
    GammaBracket,
    gamma_bracket,
    log_gamma,
    pochhammer,
    pole_index,
    sin_ratio,
    sinpi,
)

mp.mp.dps = 30


class TestLogGamma:
    def test_gamma_one(self):
        assert log_gamma(1.0) == 0.0

    def test_factorial(self):
        assert abs(log_gamma(5.0) - math.log(24.0)) < 1e-14

    def test_half(self):
        # high-precision oracle: log sqrt(pi)
        assert abs(log_gamma(0.5) - 0.57236494292470009) < 1e-15

    def test_pole_raises(self):
        for z in (0.0, -1.0, -2.0, -7.0, -3.0 + 1e-12):
            with pytest.raises(PoleError):
                log_gamma(z)

    def test_nan_rejected(self):
        with pytest.raises(DomainError):
            log_gamma(float("nan"))

    def test_relative_error_off_axis(self):
        rng = np.random.default_rng(7)
        for _ in range(60):
            z = complex(rng.uniform(-40, 40), rng.uniform(0.3, 40))
            ours = log_gamma(z)
            ref = complex(mp.loggamma(mp.mpc(z.real, z.imag)))
            assert abs(ours - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_reflection_formula(self):
        """Gamma(z) Gamma(1-z) sin(pi z)/pi = 1 away from poles."""
        rng = np.random.default_rng(11)
        count = 0
        while count < 100:
            z = complex(rng.uniform(-25, 25), rng.uniform(-25, 25))
            if min(abs(z - round(z.real)), abs(1 - z - round(1 - z.real))) < 0.05:
                continue
            if abs(z.imag) < 0.05 and (pole_index(z) is not None or pole_index(1 - z.real) is not None):
                continue
            lhs = np.exp(log_gamma(z) + log_gamma(1.0 - z)) * np.sin(np.pi * z) / np.pi
            assert abs(lhs - 1.0) < 1e-12
            count += 1

    def test_recurrence(self):
        rng = np.random.default_rng(13)
        count = 0
        while count < 100:
            z = complex(rng.uniform(-40, 40), rng.uniform(-40, 40))
            if abs(z.imag) < 0.05 and abs(z.real - round(z.real)) < 0.05:
                continue
            lhs = log_gamma(z + 1.0)
            rhs = log_gamma(z) + np.log(complex(z))
            # compare exponentials to avoid branch mismatches of the logs
            assert abs(np.exp(lhs - rhs) - 1.0) < 1e-13
            count += 1


class TestGammaBracket:
    def test_identity(self):
        assert gamma_bracket([1.0], [1.0]) == 1.0

    def test_quotient(self):
        assert abs(gamma_bracket([5.0], [3.0]) - 12.0) < 1e-13

    def test_denominator_pole_gives_zero(self):
        # the mechanism that kills the second branch at integral indices
        assert gamma_bracket([2.3], [0.0]) == 0.0
        for m in range(12):
            assert gamma_bracket([1.7], [-float(m)]) == 0.0

    def test_numerator_pole_raises(self):
        with pytest.raises(PoleError):
            gamma_bracket([-3.0], [2.0])

    def test_paired_poles_cancel(self):
        # lim Gamma(-2+e)/Gamma(-5+e) = (-1)^(5-2) 5!/2! = -60
        val = gamma_bracket([-2.0], [-5.0])
        assert abs(val - (-60.0)) < 1e-12

    def test_dataclass_wrapper(self):
        gb = GammaBracket(numerators=(5.0,), denominators=(3.0,))
        assert abs(gb.value() - 12.0) < 1e-13

    def test_near_pole_threshold(self):
        # within 1e-9 of the pole counts as at the pole
        assert gamma_bracket([1.0], [-3.0 + 1e-10]) == 0.0

    def test_complex_entries(self):
        nums = [1.3 + 0.7j, 0.4 - 0.2j]
        dens = [2.1 + 0.1j]
        ref = mp.gamma(mp.mpc(1.3, 0.7)) * mp.gamma(mp.mpc(0.4, -0.2)) / mp.gamma(mp.mpc(2.1, 0.1))
        val = gamma_bracket(nums, dens)
        assert abs(val - complex(ref)) < 1e-13 * abs(complex(ref))


class TestSinRatio:
    def test_alpha_zero_symmetry(self):
        assert sin_ratio(0.0, 0.25) == pytest.approx(1.0, abs=1e-15)

    def test_direct_value(self):
        want = 1.3968022466674206  # sin(0.55 pi)/sin(0.25 pi)
        assert sin_ratio(0.3, 0.25) == pytest.approx(want, rel=1e-15)

    @given(st.integers(-970, 970), st.integers(10, 1014), st.integers(-50, 50))
    @settings(max_examples=200, deadline=None)
    def test_periodicity(self, ja, jt, n):
        """The ratio is invariant under integer shifts of theta.

        Dyadic alpha, theta keep theta + n exactly representable, so the
        comparison probes the argument reduction rather than input rounding.
        """
        alpha, theta = ja / 1024.0, jt / 1024.0
        base = sin_ratio(alpha, theta)
        shifted = sin_ratio(alpha, theta + n)
        assert abs(shifted - base) <= 1e-14 * max(1.0, abs(base))

    def test_periodicity_generic_arguments(self):
        # non-dyadic inputs carry ~|n| ulp of representation error
        base = sin_ratio(0.3, 0.31)
        for n in (1, 3, 7):
            assert sin_ratio(0.3, 0.31 + n) == pytest.approx(base, rel=5e-14)

    def test_integer_theta_integer_alpha(self):
        assert sin_ratio(1.0, 0.0) == -1.0
        assert sin_ratio(2.0, 1.0) == 1.0

    def test_integer_theta_generic_alpha_raises(self):
        with pytest.raises(DomainError):
            sin_ratio(0.3, 0.0)

    def test_sinpi_exact_zeros(self):
        for n in range(-5, 6):
            assert sinpi(float(n)) == 0.0


class TestPochhammer:
    def test_empty_product(self):
        assert pochhammer(2.7, 0) == 1.0

    def test_terminating_factor(self):
        assert pochhammer(-2.0, 3) == 0.0

    def test_factorial(self):
        assert pochhammer(1.0, 5) == 120.0

    @given(st.floats(-5, 5), st.integers(0, 12))
    @settings(max_examples=100, deadline=None)
    def test_recurrence(self, a, k):
        """(a)_(k+1) = (a)_k (a+k)."""
        lhs = pochhammer(a, k + 1)
        rhs = pochhammer(a, k) * (a + k)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
