"""Scalar special-function bedrock: complex log-gamma, gamma-quotient brackets,
Pochhammer symbols and reflection-formula sine ratios.

Everything here is pure and safe for concurrent use.  Gamma quotients are
evaluated in log space with explicit pole bookkeeping: a denominator gamma at a
non-positive integer annihilates the bracket (exact 0.0), because the formulas
built on top rely on 1/Gamma(-p) = 0 for integer p >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, loggamma

from .errors import DomainError, PoleError

# Arguments closer than this to a non-positive integer count as sitting on the
# pole; downstream formulas are discontinuous there and near-pole garbage would
# poison orthogonality tests.
POLE_TOL = 1e-9


def _as_complex(z) -> complex:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {z!r}")
    return z


def pole_index(z) -> int | None:
    """Index m >= 0 such that z is within POLE_TOL of -m, else None."""
    z = complex(z)
    if abs(z.imag) > POLE_TOL or z.real > 0.5:
        return None
    m = round(-z.real)
    if m >= 0 and abs(z.real + m) <= POLE_TOL and abs(z.imag) <= POLE_TOL:
        return m
    return None


def log_gamma(z) -> complex:
    """Principal-branch log Gamma(z).

    Raises PoleError at (or within POLE_TOL of) z = 0, -1, -2, ...
    """
    z = _as_complex(z)
    if pole_index(z) is not None:
        raise PoleError(f"log_gamma pole at z={z}")
    if z.imag == 0.0 and z.real > 0.0:
        return complex(gammaln(z.real))
    return complex(loggamma(z))


@dataclass(frozen=True)
class GammaBracket:
    """Gamma quotient prod Gamma(numerators) / prod Gamma(denominators)."""

    numerators: tuple
    denominators: tuple = ()

    def value(self) -> complex:
        return gamma_bracket(self.numerators, self.denominators)


def gamma_bracket(numerators: Sequence, denominators: Sequence = ()) -> complex:
    """Evaluate prod Gamma(num)/prod Gamma(den) in log space.

    Pole bookkeeping: with k poles upstairs and l poles downstairs,
    k > l is a genuine pole (PoleError), k < l gives exact 0.0, and k == l
    gives the finite limit of the paired-pole ratio
    lim Gamma(-m+eps)/Gamma(-j+eps) = (-1)^(m-j) j!/m!.
    """
    log_sum = 0.0 + 0.0j
    sign = 1.0
    num_poles: list[int] = []
    den_poles: list[int] = []
    for a in numerators:
        a = _as_complex(a)
        m = pole_index(a)
        if m is not None:
            num_poles.append(m)
        else:
            log_sum += log_gamma(a)
    for b in denominators:
        b = _as_complex(b)
        m = pole_index(b)
        if m is not None:
            den_poles.append(m)
        else:
            log_sum -= log_gamma(b)
    if len(num_poles) > len(den_poles):
        raise PoleError(
            f"uncancelled numerator pole(s) at -{num_poles} in gamma bracket"
        )
    if len(num_poles) < len(den_poles):
        return 0.0
    for m, j in zip(sorted(num_poles), sorted(den_poles)):
        # residue ratio of Gamma at -m over Gamma at -j
        if (m - j) % 2:
            sign = -sign
        log_sum += gammaln(j + 1) - gammaln(m + 1)
    val = sign * np.exp(log_sum)
    if val.imag == 0.0:
        return complex(val.real, 0.0)
    return complex(val)


def sinpi(x: float) -> float:
    """sin(pi x) with exact integer zeros and period-safe argument reduction."""
    x = float(x)
    n = round(x)
    r = x - n
    if r == 0.0:
        return 0.0
    s = float(np.sin(np.pi * r))
    return -s if n % 2 else s


def cospi(x: float) -> float:
    """cos(pi x), reduced like sinpi."""
    x = float(x)
    n = round(x)
    r = x - n
    c = float(np.cos(np.pi * r))
    return -c if n % 2 else c


def sin_ratio(alpha: float, theta: float) -> float:
    """sin((alpha+theta) pi) / sin(theta pi).

    Periodic in theta with period 1 to machine precision by construction.
    For integer theta the ratio is finite only for integer alpha, where the
    limit is (-1)^alpha; otherwise DomainError.
    """
    st = sinpi(theta)
    if st == 0.0 or abs(theta - round(theta)) <= POLE_TOL:
        if abs(alpha - round(alpha)) <= POLE_TOL:
            return -1.0 if round(alpha) % 2 else 1.0
        raise DomainError(
            f"sin_ratio undefined: theta={theta} integral, alpha={alpha} not"
        )
    return sinpi(alpha + theta) / st


def pochhammer(a, k: int):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), (a)_0 = 1."""
    if k < 0:
        raise DomainError("pochhammer order must be non-negative")
    a = complex(a)
    out = 1.0 + 0.0j
    for j in range(k):
        out *= a + j
    if out.imag == 0.0:
        return complex(out.real, 0.0)
    return out
