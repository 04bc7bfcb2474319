"""Jacobi polynomials, the piece-wise hypergeometric eigenfunctions Phi_p,
the generalized eigenfunctions Psi_s, the infinity basis Lambda(+-s, x), and
local (A, B) expansions at the interior singular point x = 1.

Evaluation strategy for Phi_p on (0,1): the defining series loses roughly
2 p sqrt(x) log10(e) digits to alternating cancellation for large p, so the
whole family {Phi_(theta+n)} is lifted by the three-term recurrence in p
(the Jacobi recurrence analytically continued off integer order), seeded at
the two lowest indices where direct series / local expansions are stable.
On (1, oo) the expansions have positive terms and are evaluated directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError, SingularPoint
from .hyp import SERIES_RADIUS, f21_eval, f21_series
from .special import POLE_TOL, gamma_bracket, log_gamma, sin_ratio, sinpi

# half-width of the window around x=1 where local expansions replace the
# defining series / asymptotic branch
NEAR_ONE_RADIUS = 0.3
S_FLOOR = 1e-6


@dataclass(frozen=True)
class Params:
    """Parameter triple (alpha, beta, theta) with its validity domain."""

    alpha: float
    beta: float
    theta: float

    def __post_init__(self):
        a, b, t = self.alpha, self.beta, self.theta
        if not (-1.0 < a < 1.0):
            raise DomainError(f"alpha must satisfy -1 < alpha < 1, got {a}")
        if abs(a) <= POLE_TOL:
            raise DomainError("alpha = 0 is excluded (logarithmic case)")
        if not (b > -1.0):
            raise DomainError(f"beta must satisfy beta > -1, got {b}")
        if not (0.0 <= t < 1.0):
            raise DomainError(f"theta must satisfy 0 <= theta < 1, got {t}")

    @property
    def beta_degenerate(self) -> bool:
        """beta at a non-negative integer (second solution at 0 degenerates)."""
        return self.beta >= -POLE_TOL and abs(self.beta - round(self.beta)) <= POLE_TOL

    @property
    def theta_integral(self) -> bool:
        return abs(self.theta - round(self.theta)) <= POLE_TOL

    def pairing_ratio(self) -> float:
        """sin((alpha+theta) pi)/sin(theta pi), the (1,inf) pairing factor."""
        return sin_ratio(self.alpha, self.theta)

    @property
    def positive_definite(self) -> bool:
        """Whether the Hermitian product is positive definite."""
        if self.theta_integral:
            return True  # reduces to the classical Jacobi weight on (0,1)
        return bool(self.pairing_ratio() > 0.0)


def n_min(params: Params) -> int:
    """Least integer n with 2(theta+n) + alpha + beta + 1 > 0."""
    bound = -params.theta - (params.alpha + params.beta + 1.0) / 2.0
    return math.floor(bound) + 1


@dataclass(frozen=True)
class SpectralIndex:
    """Discrete-spectrum label p = theta + n."""

    n: int
    p: float

    @classmethod
    def make(cls, params: Params, n: int) -> "SpectralIndex":
        p = params.theta + n
        if not (2.0 * p + params.alpha + params.beta + 1.0 > 0.0):
            raise DomainError(
                f"index n={n}: 2p+alpha+beta+1 = "
                f"{2*p+params.alpha+params.beta+1:.6g} must be positive"
            )
        if abs(1.0 + p + params.alpha) <= POLE_TOL:
            raise PoleError(f"index n={n}: 1+p+alpha = 0 is excluded")
        return cls(n=n, p=p)


@dataclass(frozen=True)
class LocalExpansion:
    """Coefficients of f = A*(analytic) + B*|1-x|^(-alpha)*(analytic) near 1."""

    a_left: float
    b_left: float
    a_right: float
    b_right: float


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------

def jacobi_eval(n: int, alpha: float, beta: float, y, formula: int = 1):
    """P_n^(alpha,beta)(y) by one of the three hypergeometric representations."""
    if n < 0:
        raise DomainError("jacobi_eval requires n >= 0")
    if not (alpha > -1.0 and beta > -1.0):
        raise DomainError("jacobi parameters must exceed -1")
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(np.abs(y_arr) > 1.0):
        raise DomainError("jacobi argument must lie in [-1, 1]")
    sign = -1.0 if n % 2 else 1.0
    if formula == 1:
        coef = gamma_bracket([n + alpha + 1.0], [alpha + 1.0]).real / math.factorial(n)
        out = coef * f21_series(-n, n + alpha + beta + 1.0, alpha + 1.0, (1.0 - y_arr) / 2.0)
    elif formula == 2:
        coef = sign * gamma_bracket([n + beta + 1.0], [beta + 1.0]).real / math.factorial(n)
        out = coef * f21_series(-n, n + alpha + beta + 1.0, beta + 1.0, (1.0 + y_arr) / 2.0)
    elif formula == 3:
        if np.any(y_arr == 1.0):
            raise DomainError("formula 3 is singular at y = 1")
        # Euler transform of formula 2: the series argument stays (1+y)/2
        coef = sign * gamma_bracket([n + beta + 1.0], [beta + 1.0]).real / math.factorial(n)
        out = (
            coef
            * ((1.0 - y_arr) / 2.0) ** (-alpha)
            * f21_series(n + beta + 1.0, -alpha - n, beta + 1.0, (1.0 + y_arr) / 2.0)
        )
    else:
        raise DomainError(f"formula must be 1, 2 or 3, got {formula}")
    out = np.real(out)
    return out[0] if np.ndim(y) == 0 else out


def jacobi_norm_sq(n: int, alpha: float, beta: float) -> float:
    """Squared norm of P_n^(alpha,beta) for the weight (1-y)^alpha (1+y)^beta."""
    if n < 0 or not (alpha > -1.0 and beta > -1.0):
        raise DomainError("invalid Jacobi parameters")
    br = gamma_bracket(
        [n + alpha + 1.0, n + beta + 1.0], [n + 1.0, n + alpha + beta + 1.0]
    ).real
    return 2.0 ** (alpha + beta + 1.0) / (2 * n + alpha + beta + 1.0) * br


# ---------------------------------------------------------------------------
# Phi_p
# ---------------------------------------------------------------------------

def phi_norm_sq(params: Params, idx: SpectralIndex) -> float:
    """Closed-form pairing {Phi_p, Phi_p}."""
    a, b, p = params.alpha, params.beta, idx.p
    br = gamma_bracket(
        [2 * p + a + b + 2.0, 2 * p + a + b + 2.0, 1.0 + p + a, p + 1.0],
        [p + b + 1.0, p + a + b + 1.0],
    ).real
    return br / (2 * p + a + b + 1.0)


def phi_p_local(params: Params, idx: SpectralIndex) -> LocalExpansion:
    """Gamma-bracket coefficients of the expansions of Phi_p on both sides of 1.

    b_right equals b_left identically (same bracket after cancelling
    Gamma(p+alpha+1)), so it is constructed that way.
    """
    a, b, p = params.alpha, params.beta, idx.p
    c2 = 2 * p + a + b + 2.0
    a_left = gamma_bracket([c2, -a], [p + b + 1.0, -p - a]).real
    b_left = gamma_bracket([c2, a], [-p, p + a + b + 1.0]).real
    a_right = gamma_bracket([p + a + 1.0, c2, -a], [-p, p + 1.0, p + b + 1.0]).real
    return LocalExpansion(a_left=a_left, b_left=b_left, a_right=a_right, b_right=b_left)


def _phi_left_seed(params: Params, p: float, x: np.ndarray, omx: np.ndarray) -> np.ndarray:
    """Phi_p on (0,1) for a small index: series away from 1, local expansion near 1."""
    a, b = params.alpha, params.beta
    out = np.empty_like(x)
    near = x > SERIES_RADIUS
    if np.any(~near):
        coef = gamma_bracket([2 * p + a + b + 2.0], [b + 1.0]).real
        out[~near] = coef * np.real(f21_series(-p, p + a + b + 1.0, b + 1.0, x[~near]))
    if np.any(near):
        t = omx[near]
        c2 = 2 * p + a + b + 2.0
        a1 = gamma_bracket([c2, -a], [p + b + 1.0, -p - a]).real
        b1 = gamma_bracket([c2, a], [-p, p + a + b + 1.0]).real
        u = np.real(f21_series(-p, p + a + b + 1.0, a + 1.0, t))
        v = np.real(f21_series(p + b + 1.0, -p - a, 1.0 - a, t))
        out[near] = a1 * u + b1 * v * t ** (-a)
    return out


def _phi_left_family(params: Params, n_hi: int, x: np.ndarray, omx: np.ndarray) -> np.ndarray:
    """Phi_(theta+n)(x) for n = n_min..n_hi on x in (0,1), shape (count, len(x)).

    Seeds at the two lowest indices, then the continued Jacobi recurrence
    (order parameter p, parameter pair (beta, alpha), argument 1-2x); forward
    lifting is stable on the oscillatory interval.
    """
    a, b, th = params.alpha, params.beta, params.theta
    n_lo = n_min(params)
    if n_hi < n_lo:
        raise DomainError(f"n={n_hi} below n_min={n_lo}")
    count = n_hi - n_lo + 1
    out = np.empty((count, x.size))

    def to_g(p, phi_vals):
        return gamma_bracket([p + b + 1.0], [2 * p + a + b + 2.0, p + 1.0]).real * phi_vals

    def to_phi(p, g_vals):
        return gamma_bracket([2 * p + a + b + 2.0, p + 1.0], [p + b + 1.0]).real * g_vals

    p0 = th + n_lo
    phi0 = _phi_left_seed(params, p0, x, omx)
    out[0] = phi0
    if count == 1:
        return out
    p1 = th + n_lo + 1
    phi1 = _phi_left_seed(params, p1, x, omx)
    out[1] = phi1
    if count == 2:
        return out

    y = 2.0 * omx - 1.0  # = 1 - 2x, exact near x = 1
    g_m2 = to_g(p0, phi0)
    g_m1 = to_g(p1, phi1)
    ab = b + a  # recurrence parameter sum (A, B) = (beta, alpha)
    for k in range(2, count):
        p = th + n_lo + k
        s = 2 * p + ab
        c1 = 2 * p * (p + ab) * (s - 2.0)
        c2 = (s - 1.0) * (s * (s - 2.0) * y + b * b - a * a)
        c3 = 2 * (p + b - 1.0) * (p + a - 1.0) * s
        g = (c2 * g_m1 - c3 * g_m2) / c1
        out[k] = to_phi(p, g)
        g_m2, g_m1 = g_m1, g
    return out


def _phi_right(params: Params, idx: SpectralIndex, x: np.ndarray, xm1: np.ndarray) -> np.ndarray:
    """Phi_p on (1, oo): local expansion inside the window, else the decaying branch."""
    a, b, p = params.alpha, params.beta, idx.p
    out = np.empty_like(x)
    near = xm1 < NEAR_ONE_RADIUS
    if np.any(near):
        le = phi_p_local(params, idx)
        t = xm1[near]
        u = np.real(f21_series(p + a + b + 1.0, -p, a + 1.0, -t))
        v = np.real(f21_series(p + b + 1.0, -p - a, 1.0 - a, -t))
        out[near] = le.a_right * u + le.b_right * v * t ** (-a)
    if np.any(~near):
        xf = x[~near]
        coef = gamma_bracket([1.0 + p + a], [-p]).real
        if coef == 0.0:
            out[~near] = 0.0
        else:
            fval = np.real(f21_eval(p + a + 1.0, p + a + b + 1.0, 2 * p + a + b + 2.0, xf))
            out[~near] = coef * fval * np.exp(-(a + b + p + 1.0) * np.log(xf))
    return out


def phi_p(params: Params, idx: SpectralIndex, x):
    """The piece-wise hypergeometric eigenfunction Phi_p(x), x > 0, x != 1."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr == 1.0):
        raise SingularPoint("Phi_p is singular at x = 1")
    if np.any(x_arr <= 0.0):
        raise DomainError("Phi_p requires x > 0")
    out = np.empty_like(x_arr)
    left = x_arr < 1.0
    if np.any(left):
        xl = x_arr[left]
        fam = _phi_left_family(params, idx.n, xl, 1.0 - xl)
        out[left] = fam[idx.n - n_min(params)]
    if np.any(~left):
        xr = x_arr[~left]
        out[~left] = _phi_right(params, idx, xr, xr - 1.0)
    return out[0] if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Psi_s and the infinity basis
# ---------------------------------------------------------------------------

def _psi_prefactor(params: Params) -> float:
    sa = sinpi(params.theta + params.alpha)
    if abs(sa) <= POLE_TOL:
        raise DomainError("theta + alpha integral: continuous family degenerates")
    return 2.0 * math.gamma(params.beta + 1.0) / sa


def _psi_m(params: Params, s: float) -> complex:
    """The coefficient multiplying Lambda(s, x) in Psi_s on (1, oo)."""
    a, b, th = params.alpha, params.beta, params.theta
    A = (a + b + 1.0) / 2.0
    B = (-a + b + 1.0) / 2.0
    g = (a + b) / 2.0 + th
    lg = log_gamma(-2j * s) - log_gamma(A - 1j * s) - log_gamma(B - 1j * s)
    # the +is conjugate is the one satisfying the gluing at x = 1
    return np.exp(lg) * np.cos(np.pi * (g + 1j * s))


def lambda_basis(params: Params, s: float, x):
    """Lambda(s, x) on (1, oo): the x -> oo normalized solution pair member."""
    a, b = params.alpha, params.beta
    A = (a + b + 1.0) / 2.0
    B2 = (a - b + 1.0) / 2.0
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr <= 1.0):
        raise DomainError("lambda_basis requires x > 1")
    f = f21_eval(A + 1j * s, B2 + 1j * s, 1.0 + 2j * s, x_arr)
    out = f * np.exp(-(A + 1j * s) * np.log(x_arr))
    return out[0] if np.ndim(x) == 0 else out


def _psi_t_switch(s: float) -> float:
    """Near-1 window radius for Psi: inside it the local expansion loses at
    most ~e^(4 s sqrt(t)) to cancellation, outside the defining series stays
    below a few thousand terms."""
    return min(NEAR_ONE_RADIUS, (5.3 / max(s, 1.0)) ** 2)


def _psi_left(params: Params, s: float, x: np.ndarray, omx: np.ndarray) -> np.ndarray:
    """Psi_s on (0,1): all-positive-term series away from 1, the local
    expansion (driven by the exact distance) inside the s-adaptive window."""
    a, b = params.alpha, params.beta
    A = (a + b + 1.0) / 2.0
    B = (-a + b + 1.0) / 2.0
    tsw = _psi_t_switch(s)
    out = np.empty_like(x)
    near = omx < tsw
    if np.any(~near):
        out[~near] = np.real(f21_series(A + 1j * s, A - 1j * s, b + 1.0, x[~near]))
    if np.any(near):
        le = psi_local(params, s)
        t = omx[near]
        u = np.real(f21_series(A + 1j * s, A - 1j * s, a + 1.0, t))
        v = np.real(f21_series(B - 1j * s, B + 1j * s, 1.0 - a, t))
        out[near] = le.a_left * u + le.b_left * v * t ** (-a)
    return out


def _psi_left_batch(params: Params, s_vals: np.ndarray, x: np.ndarray,
                    omx: np.ndarray) -> np.ndarray:
    """Psi_s(x) on (0,1) for a whole grid of s at once, shape (len(s), len(x)).

    The defining series is summed for the full batch with a term cap set by
    the smallest switch radius in the batch (positive terms, so truncation at
    deep near-1 nodes only leaves values that are overwritten by the local
    expansion afterwards).
    """
    a, b = params.alpha, params.beta
    A = (a + b + 1.0) / 2.0
    B = (-a + b + 1.0) / 2.0
    s_vals = np.asarray(s_vals, dtype=float)
    s_max = float(np.max(s_vals))
    tsw_min = _psi_t_switch(s_max)
    k_cap = int(40.0 / tsw_min) + int(5.0 * s_max) + 200

    s_col = s_vals[:, None]
    out = np.ones((s_vals.size, x.size))
    # columns needing the series; the rest is overwritten below
    cols = np.flatnonzero(omx >= 1e-4 * tsw_min)
    term = np.ones((s_vals.size, cols.size))
    acc = np.ones_like(term)
    x_act = x[cols][None, :]
    k = 0
    while k < k_cap and cols.size:
        ratio = ((A + k) ** 2 + s_col**2) / ((b + 1.0 + k) * (k + 1.0))
        term = term * ratio * x_act
        acc += term
        k += 1
        if k % 32 == 0 or k == k_cap:
            done = np.all(term <= 1e-16 * np.abs(acc), axis=0) & (k > 2)
            if np.any(done):
                out[:, cols[done]] = acc[:, done]
                keep = ~done
                cols = cols[keep]
                term = term[:, keep]
                acc = acc[:, keep]
                x_act = x[cols][None, :]
    if cols.size:
        out[:, cols] = acc
    for i, s in enumerate(s_vals):
        tsw = _psi_t_switch(float(s))
        near = omx < tsw
        if np.any(near):
            le = psi_local(params, float(s))
            t = omx[near]
            u = np.real(f21_series(A + 1j * s, A - 1j * s, a + 1.0, t))
            v = np.real(f21_series(B - 1j * s, B + 1j * s, 1.0 - a, t))
            out[i, near] = le.a_left * u + le.b_left * v * t ** (-a)
    return out


def psi_s(params: Params, s: float, x):
    """Generalized eigenfunction Psi_s(x), s >= S_FLOOR, x > 0, x != 1."""
    if s < 0:
        s = -s  # Psi_s = Psi_(-s)
    if s < S_FLOOR:
        raise PoleError(f"psi_s requires s >= {S_FLOOR} (Gamma(-2is) pole at 0)")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr == 1.0):
        raise SingularPoint("Psi_s is singular at x = 1")
    if np.any(x_arr <= 0.0):
        raise DomainError("Psi_s requires x > 0")
    out = np.empty_like(x_arr)
    left = x_arr < 1.0
    if np.any(left):
        xl = x_arr[left]
        out[left] = _psi_left(params, s, xl, 1.0 - xl)
    if np.any(~left):
        xr = x_arr[~left]
        lam = lambda_basis(params, s, xr)
        out[~left] = _psi_prefactor(params) * np.real(_psi_m(params, s) * lam)
    return out[0] if np.ndim(x) == 0 else out


def psi_local(params: Params, s: float) -> LocalExpansion:
    """(A, B) data of Psi_s on both sides of x = 1."""
    if s < S_FLOOR:
        raise PoleError(f"psi_local requires s >= {S_FLOOR}")
    a, b = params.alpha, params.beta
    A = (a + b + 1.0) / 2.0
    B = (-a + b + 1.0) / 2.0
    a_left = gamma_bracket([b + 1.0, -a], [B - 1j * s, B + 1j * s]).real
    b_left = gamma_bracket([b + 1.0, a], [A + 1j * s, A - 1j * s]).real
    m = _psi_m(params, s)
    pref = _psi_prefactor(params)
    la = gamma_bracket([1.0 + 2j * s, -a], [1.0 - A + 1j * s, B + 1j * s])
    lb = gamma_bracket([1.0 + 2j * s, a], [A + 1j * s, 1.0 - B + 1j * s])
    return LocalExpansion(
        a_left=a_left,
        b_left=b_left,
        a_right=pref * (m * la).real,
        b_right=pref * (m * lb).real,
    )


def xi_mu(mu: float, x):
    """Test function (1-x)^mu on (0,1), zero beyond 1."""
    if mu <= -0.5:
        raise DomainError("xi_mu requires mu > -1/2")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(x_arr)
    inside = x_arr < 1.0
    out[inside] = (1.0 - x_arr[inside]) ** mu
    return out[0] if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Half-line function handles for the quadrature layer
# ---------------------------------------------------------------------------

class PhiFunction:
    """Phi_p as a pairable half-line function."""

    left_support = True
    right_support = True

    def __init__(self, params: Params, idx: SpectralIndex):
        self.params = params
        self.idx = idx
        self.tail_power = params.alpha + params.beta + idx.p + 1.0

    def eval_left(self, x, omx):
        fam = _phi_left_family(self.params, self.idx.n, x, omx)
        return fam[self.idx.n - n_min(self.params)]

    def eval_right(self, x, xm1):
        return _phi_right(self.params, self.idx, x, xm1)

    def local_at_1(self) -> LocalExpansion:
        return phi_p_local(self.params, self.idx)


class PsiFunction:
    """Psi_s as a pairable half-line function (almost-L2 tail)."""

    left_support = True
    right_support = True

    def __init__(self, params: Params, s: float):
        if s < S_FLOOR:
            raise PoleError(f"PsiFunction requires s >= {S_FLOOR}")
        self.params = params
        self.s = s
        self.tail_power = (params.alpha + params.beta + 1.0) / 2.0

    def eval_left(self, x, omx):
        return _psi_left(self.params, self.s, x, omx)

    def eval_right(self, x, xm1):
        a, b = self.params.alpha, self.params.beta
        A = (a + b + 1.0) / 2.0
        B = (-a + b + 1.0) / 2.0
        s = self.s
        pref = _psi_prefactor(self.params)
        m = _psi_m(self.params, s)
        out = np.empty_like(x)
        near = xm1 < NEAR_ONE_RADIUS
        if np.any(near):
            le = psi_local(self.params, s)
            t = xm1[near]
            u = np.real(f21_series(A + 1j * s, A - 1j * s, a + 1.0, -t))
            v = np.real(f21_series(B - 1j * s, B + 1j * s, 1.0 - a, -t))
            out[near] = le.a_right * u + le.b_right * v * t ** (-a)
        if np.any(~near):
            lam = lambda_basis(self.params, s, x[~near])
            out[~near] = pref * np.real(m * lam)
        return out

    def local_at_1(self) -> LocalExpansion:
        return psi_local(self.params, self.s)


class XiFunction:
    """(1-x)^mu H(1-x) as a pairable function (no support beyond 1)."""

    left_support = True
    right_support = False
    tail_power = math.inf

    def __init__(self, mu: float):
        if mu <= -0.5:
            raise DomainError("XiFunction requires mu > -1/2")
        self.mu = mu

    def eval_left(self, x, omx):
        return omx ** self.mu

    def eval_right(self, x, xm1):
        return np.zeros_like(x)
