"""The mixed continuous-discrete beta identity and its two degenerations
(the de Branges-Wilson integral and the Dougall bilateral sum).

The s-integrands here are balanced gamma quotients: their exponential decay
cancels, leaving an algebraic tail with an exponent known from the
parameters, which is integrated in closed form past the truncation point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .errors import DomainError, NoConvergence, PoleError
from .ortho import Params, n_min
from .special import gamma_bracket, sinpi

S_EPS = 1e-8


@dataclass(frozen=True)
class BetaIdentityParams:
    params: Params
    mu: float
    nu: float

    def __post_init__(self):
        if self.mu <= -0.5 or self.nu <= -0.5:
            raise DomainError("mu and nu must exceed -1/2")


def _grid_integral(fn, s_max: float, step: float, tail_exponent: float) -> float:
    """Trapezoid of fn over (0, s_max] plus a fitted power-law tail.

    The tail is modelled as s^q (c0 + c1/s + c2/s^2) with the exponent known
    from the parameters; the coefficients come from samples past s_max.
    """
    s = np.arange(step, s_max + step / 2.0, step)
    vals = fn(s)
    total = step * (np.sum(vals) - 0.5 * vals[-1]) + 0.5 * step * fn(np.array([S_EPS]))[0]
    q = tail_exponent
    if q >= -1.0:
        raise NoConvergence(f"tail exponent {q:.3g} >= -1")
    ts = s_max * 1.18 ** np.arange(8)
    y = fn(ts) * ts ** (-q)
    basis = (s_max / ts)[:, None] ** np.arange(3)[None, :]
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    tail = sum(
        coef[k] * s_max**k * s_max ** (q - k + 1.0) / (-(q - k + 1.0))
        for k in range(3)
    )
    return float(total + tail)


def beta_lhs(bp: BetaIdentityParams, N: int = 200, s_max: float = 40.0,
             step: float = 0.01, tol: float = 1e-8) -> float:
    """Continuous integral term plus the discrete bilateral-type sum.

    The integral carries the constant sin(theta pi) sin((theta+alpha) pi) /
    (2 pi^3); the sum is assembled from its leading gamma bracket by an
    incremental term ratio, truncated at N with a power-law tail estimate.
    """
    p0 = bp.params
    a, b, th = p0.alpha, p0.beta, p0.theta
    mu, nu = bp.mu, bp.nu
    A = (a + b + 1.0) / 2.0
    B = (-a + b + 1.0) / 2.0
    C = A + th
    D = (1.0 - a - b) / 2.0 - th
    E = (a + b + 3.0) / 2.0

    def integrand(s):
        z = 1j * s
        lg = (
            loggamma(A + z)
            + loggamma(B + z)
            + loggamma(C + z)
            + loggamma(D + z)
            - loggamma(2.0 * z)
            - loggamma(mu + E + z)
            - loggamma(nu + E + z)
        )
        return np.exp(2.0 * np.real(lg))

    q_tail = -(2.0 * a + 2.0 * mu + 2.0 * nu + 3.0)
    integral = _grid_integral(integrand, s_max, step, q_tail)
    cont = sinpi(th) * sinpi(th + a) / (2.0 * math.pi**3) * integral

    lo = n_min(p0)
    p = th + lo
    term = (2 * p + a + b + 1.0) * gamma_bracket(
        [p + a + b + 1.0, p + b + 1.0, p - nu, p - mu],
        [p + a + b + mu + 2.0, p + a + b + nu + 2.0, p + a + 1.0, p + 1.0],
    ).real
    total = term
    for n in range(lo + 1, N + 1):
        p = th + n
        pm1 = p - 1.0
        ratio = (
            (2 * p + a + b + 1.0)
            / (2 * pm1 + a + b + 1.0)
            * (pm1 + a + b + 1.0)
            * (pm1 + b + 1.0)
            * (pm1 - nu)
            * (pm1 - mu)
            / ((pm1 + a + b + mu + 2.0) * (pm1 + a + b + nu + 2.0) * (pm1 + a + 1.0) * (pm1 + 1.0))
        )
        term = term * ratio
        total += term
    # power-law tail estimate: term ~ n^(-(2+2mu+2nu+2alpha))
    decay = 2.0 + 2.0 * mu + 2.0 * nu + 2.0 * a
    tail_est = abs(term) * (N + 1.0) / max(decay - 1.0, 0.1)
    if tail_est > max(tol, 1e-12) * max(abs(total), 1.0) * 10.0:
        raise NoConvergence(
            f"discrete sum tail estimate {tail_est:.3g} too large at N={N}"
        )
    disc = sinpi(th - mu) * sinpi(th - nu) / math.pi**2 * total
    return cont + disc


def beta_rhs(bp: BetaIdentityParams) -> float:
    """Closed-form right side of the mixed beta identity."""
    p0 = bp.params
    a, b = p0.alpha, p0.beta
    mu, nu = bp.mu, bp.nu
    return gamma_bracket(
        [b + 1.0, a + mu + nu + 1.0],
        [a + b + mu + nu + 2.0, mu + 1.0, nu + 1.0, a + mu + 1.0, a + nu + 1.0],
    ).real


def dbw_integral(a1: float, a2: float, a3: float, b: float,
                 s_max: float = 50.0, step: float = 0.01) -> float:
    """(1/2 pi) int_0^inf |G(a1+is)G(a2+is)G(a3+is)/(G(2is)G(b+is))|^2 ds."""
    if not (a1 > 0 and a2 > 0 and a3 > 0):
        raise DomainError("requires a_k > 0")
    if not b > a1 + a2 + a3:
        raise DomainError("requires b > a1+a2+a3 for convergence")

    def integrand(s):
        z = 1j * s
        lg = (
            loggamma(a1 + z) + loggamma(a2 + z) + loggamma(a3 + z)
            - loggamma(2.0 * z) - loggamma(b + z)
        )
        return np.exp(2.0 * np.real(lg))

    q_tail = 2.0 * (a1 + a2 + a3 - b) - 1.0
    return _grid_integral(integrand, s_max, step, q_tail) / (2.0 * math.pi)


def dbw_closed(a1: float, a2: float, a3: float, b: float) -> float:
    return gamma_bracket(
        [b - a1 - a2 - a3, a1 + a2, a1 + a3, a2 + a3],
        [b - a1, b - a2, b - a3],
    ).real


def dbw_integral_check(a1: float, a2: float, a3: float, b: float,
                       s_max: float = 50.0, step: float = 0.01) -> float:
    """|numerical integral - closed form| for the de Branges-Wilson integral."""
    return abs(dbw_integral(a1, a2, a3, b, s_max, step) - dbw_closed(a1, a2, a3, b))


def dougall_sum(alpha_d: float, a2: float, a3: float, a4: float, N: int = 300) -> float:
    """Bilateral sum sum_n (alpha+n) / prod_j G(a_j+alpha+n) G(a_j-alpha-n)
    with a1 = alpha, the +n and -n terms paired."""
    aa = (alpha_d, a2, a3, a4)
    if not (sum(aa) > 3.0):
        raise DomainError("requires a1+a2+a3+a4 > 3 for absolute convergence")
    if abs(2.0 * alpha_d - round(2.0 * alpha_d)) < 1e-12:
        raise DomainError("alpha in Z/2 degenerates the bilateral sum")

    def term(n: int) -> float:
        dens = []
        for aj in aa:
            dens.append(aj + alpha_d + n)
            dens.append(aj - alpha_d - n)
        try:
            val = gamma_bracket([], dens).real
        except PoleError:
            return 0.0
        return (alpha_d + n) * val

    total = term(0)
    for n in range(1, N + 1):
        total += term(n) + term(-n)
    return total


def dougall_closed(alpha_d: float, a2: float, a3: float, a4: float) -> float:
    aa = (alpha_d, a2, a3, a4)
    dens = [aa[j] + aa[k] - 1.0 for j in range(4) for k in range(j + 1, 4)]
    return (
        sinpi(2.0 * alpha_d) / (2.0 * math.pi)
        * gamma_bracket([sum(aa) - 3.0], dens).real
    )


def dougall_check(alpha_d: float, a2: float, a3: float, a4: float, N: int = 300) -> float:
    """|bilateral sum - closed form| for the Dougall 5H5 summation."""
    return abs(dougall_sum(alpha_d, a2, a3, a4, N) - dougall_closed(alpha_d, a2, a3, a4))
