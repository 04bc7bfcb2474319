"""Numerical Mellin transform, Barnes-type contour integrals, the convolution
kernels (hat and inverse-transform forms) and the closed-form "delta" integral.

Contour integrals run a trapezoid along a vertical line.  For balanced gamma
quotients the exponential Stirling factors cancel, leaving an algebraic tail
|t|^q; the truncated part is recovered by fitting the asymptotic expansion
g(gamma+it) ~ e^(i w t) t^q (c0 + c1/t + ...) on a geometric sample beyond the
truncation height and integrating the fit in closed form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import loggamma

from .errors import DomainError, NoConvergence, PoleError, StripViolation
from .hyp import f21_eval, f21_series
from .ortho import NEAR_ONE_RADIUS, Params
from .special import gamma_bracket, pole_index

DEFAULT_HEIGHT = 60.0
DEFAULT_STEP = 0.05


@dataclass(frozen=True)
class ContourSpec:
    tol: float = 1e-9
    height: float = DEFAULT_HEIGHT
    step: float = DEFAULT_STEP
    n_tail_coef: int = 6


@dataclass(frozen=True)
class BarnesKernel:
    """Gamma quotient prod G(a+s) prod G(b-s) / [prod G(c+s) prod G(d-s)]
    with a prefactor, a contour line and its convergence strip."""

    plus: tuple = ()
    minus: tuple = ()
    den_plus: tuple = ()
    den_minus: tuple = ()
    prefactor: complex = 1.0
    contour_re: float = 0.0
    strip: tuple = (-math.inf, math.inf)

    def __post_init__(self):
        lo, hi = self.strip
        if not (lo < self.contour_re < hi):
            raise StripViolation(
                f"contour Re s = {self.contour_re} outside strip ({lo}, {hi})"
            )

    def value(self, s):
        s = np.asarray(s, dtype=complex)
        lg = np.zeros_like(s)
        for a in self.plus:
            lg = lg + loggamma(a + s)
        for b in self.minus:
            lg = lg + loggamma(b - s)
        for c in self.den_plus:
            lg = lg - loggamma(c + s)
        for d in self.den_minus:
            lg = lg - loggamma(d - s)
        return self.prefactor * np.exp(lg)

    def tail_power(self) -> float:
        """q with |value(gamma+it)| ~ |t|^q, valid when counts balance."""
        np_, nm = len(self.plus), len(self.minus)
        dp, dm = len(self.den_plus), len(self.den_minus)
        if np_ + nm != dp + dm:
            raise DomainError("kernel is not exponentially balanced")
        const = (
            sum(complex(a).real for a in self.plus)
            + sum(complex(b).real for b in self.minus)
            - sum(complex(c).real for c in self.den_plus)
            - sum(complex(d).real for d in self.den_minus)
        )
        return const + self.contour_re * (np_ - nm - dp + dm) - (np_ + nm - dp - dm) / 2.0


def product_kernel(k1: BarnesKernel, k2: BarnesKernel) -> BarnesKernel:
    lo = max(k1.strip[0], k2.strip[0])
    hi = min(k1.strip[1], k2.strip[1])
    if not lo < hi:
        raise StripViolation(f"kernel strips do not intersect: ({lo}, {hi})")
    return BarnesKernel(
        plus=k1.plus + k2.plus,
        minus=k1.minus + k2.minus,
        den_plus=k1.den_plus + k2.den_plus,
        den_minus=k1.den_minus + k2.den_minus,
        prefactor=k1.prefactor * k2.prefactor,
        contour_re=(lo + hi) / 2.0,
        strip=(lo, hi),
    )


# ---------------------------------------------------------------------------
# Oscillatory power-law tail integrals
# ---------------------------------------------------------------------------

def _osc_power_integral(nu: complex, omega: float, height: float, tol: float) -> complex:
    """int_T^inf t^nu e^(i omega t) dt.

    omega = 0: closed form (needs Re nu < -1).  Otherwise repeated
    integration by parts; converges once |nu| << |omega| T.
    """
    if omega == 0.0:
        if complex(nu).real >= -1.0:
            raise NoConvergence(f"tail exponent Re nu = {complex(nu).real:.3g} >= -1")
        return -(height ** (nu + 1.0)) / (nu + 1.0)
    iw = 1j * omega
    e = cmath.exp(iw * height)
    total = 0.0 + 0.0j
    coef = 1.0 + 0.0j
    nu_j = complex(nu)
    for _ in range(60):
        term = -coef * height**nu_j * e / iw
        total += term
        coef = -coef * nu_j / iw
        nu_j -= 1.0
        if abs(coef) * height ** (nu_j.real + 1.0) / abs(omega) < tol:
            break
    else:
        raise NoConvergence("oscillatory tail recursion did not converge")
    return total


def _fit_tail(gfun, height: float, q: float, omega: float, tol: float, n_coef: int) -> complex:
    """Tail int_T^inf g(t) dt with g ~ e^(i omega t) t^q sum c_k t^(-k)."""
    m = 2 * n_coef
    t = height * 1.13 ** np.arange(m)
    y = gfun(t) * np.exp(-1j * omega * t) * t ** (-q)
    basis = (height / t)[:, None] ** np.arange(n_coef)[None, :]
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    total = 0.0 + 0.0j
    for k in range(n_coef):
        total += coef[k] * height**k * _osc_power_integral(q - k, omega, height, tol)
    return total


def contour_integral(
    gfun,
    tail_power: float,
    osc: float = 0.0,
    spec: ContourSpec | None = None,
) -> complex:
    """(1/2pi) int_R g(t) dt for g sampled along the contour (t = Im s).

    Trapezoid with step halving as a discretization check, plus fitted
    power-law tails on both ends.
    """
    spec = spec or ContourSpec()
    tol = spec.tol
    # keep the truncation height an exact multiple of both steps so the
    # fitted tails start exactly where the trapezoid stops
    T = round(spec.height / spec.step) * spec.step

    def body(h: float) -> complex:
        n = round(T / h)
        t = np.arange(-n, n + 1) * h
        vals = gfun(t)
        vals[0] *= 0.5
        vals[-1] *= 0.5
        # Euler-Maclaurin endpoint correction: the integrand has only decayed
        # algebraically at T, so the h^2 boundary term is not negligible
        d = h / 4.0
        ends = gfun(np.array([T - d, T + d, -T - d, -T + d]))
        gp_hi = (ends[1] - ends[0]) / (2.0 * d)
        gp_lo = (ends[3] - ends[2]) / (2.0 * d)
        return h * np.sum(vals) - h * h / 12.0 * (gp_hi - gp_lo)

    i_h = body(spec.step)
    i_h2 = body(spec.step / 2.0)
    if abs(i_h - i_h2) > max(tol, 1e-14 * abs(i_h2)) * 50.0:
        raise NoConvergence(
            f"contour trapezoid not converged: |delta| = {abs(i_h - i_h2):.3g}"
        )
    tail_up = _fit_tail(gfun, T, tail_power, osc, tol, spec.n_tail_coef)
    tail_dn = _fit_tail(lambda t: gfun(-t), T, tail_power, -osc, tol, spec.n_tail_coef)
    return (i_h2 + tail_up + tail_dn) / (2.0 * math.pi)


def kernel_contour_integral(kernel: BarnesKernel, x: float | None = None,
                            spec: ContourSpec | None = None) -> complex:
    """(1/2 pi i) int kernel(s) x^(-s) ds along Re s = kernel.contour_re."""
    g0 = kernel.contour_re
    if x is None or x == 1.0:
        osc = 0.0
        xg = 1.0
    else:
        if x <= 0:
            raise DomainError("kernel contour integral requires x > 0")
        osc = -math.log(x)
        xg = x ** (-g0)

    def gfun(t):
        vals = kernel.value(g0 + 1j * t)
        if osc:
            vals = vals * np.exp(1j * osc * t)
        return vals

    return xg * contour_integral(gfun, kernel.tail_power(), osc, spec)


# ---------------------------------------------------------------------------
# Barnes integrals
# ---------------------------------------------------------------------------

def barnes_main_integral(a, b, c, x: float, spec: ContourSpec | None = None) -> complex:
    """The two-sided Barnes representation evaluated numerically:
    (1/2 pi i) G[c,1-b;a] int G[s, a-s; s+1-b, c-s] x^(-s) ds, x > 0.

    Equals F[a,b;c;x] for x < 1 and the matching x^(-a)-branch for x > 1.
    """
    a_c, b_c, c_c = complex(a), complex(b), complex(c)
    if (c_c - a_c - b_c).real <= -1.0:
        raise NoConvergence("requires Re(c-a-b) > -1")
    if a_c.real <= 0.0:
        raise StripViolation("contour needs 0 < Re s < Re a with Re a > 0")
    if pole_index(1.0 - b_c) is not None:
        raise PoleError("prefactor Gamma(1-b) sits on a pole")
    kern = BarnesKernel(
        plus=(0.0,),
        minus=(a_c,),
        den_plus=(1.0 - b_c,),
        den_minus=(c_c,),
        contour_re=a_c.real / 2.0,
        strip=(0.0, a_c.real),
    )
    pref = gamma_bracket([c_c, 1.0 - b_c], [a_c])
    return pref * kernel_contour_integral(kern, x, spec)


def barnes_delta(a, b, c, d, spec: ContourSpec | None = None) -> complex:
    """(1/2 pi i) int G[a+s, b-s; c+s, d-s] ds, numerically."""
    a_c, b_c, c_c, d_c = complex(a), complex(b), complex(c), complex(d)
    if (c_c + d_c - a_c - b_c).real <= 1.0:
        raise NoConvergence("requires Re(c+d-a-b) > 1")
    lo, hi = -a_c.real, b_c.real
    if not lo < hi:
        raise StripViolation("pole series overlap: need Re(a+b) > 0")
    kern = BarnesKernel(
        plus=(a_c,), minus=(b_c,), den_plus=(c_c,), den_minus=(d_c,),
        contour_re=(lo + hi) / 2.0, strip=(lo, hi),
    )
    return kernel_contour_integral(kern, None, spec)


def barnes_delta_closed(a, b, c, d) -> complex:
    """Closed form G[a+b, c+d-a-b-1; c+d-1, c-a, d-b] of the delta integral."""
    a, b, c, d = complex(a), complex(b), complex(c), complex(d)
    return gamma_bracket([a + b, c + d - a - b - 1.0], [c + d - 1.0, c - a, d - b])


# ---------------------------------------------------------------------------
# The convolution pair K1, K2 and their Mellin images
# ---------------------------------------------------------------------------

def khat_k1(params: Params, p: float) -> BarnesKernel:
    a, b = params.alpha, params.beta
    return BarnesKernel(
        plus=(0.0,),
        minus=(b + p + 1.0,),
        den_plus=(p + a + 1.0,),
        den_minus=(b + 1.0,),
        prefactor=gamma_bracket([b + 1.0, p + a + 1.0], [b + p + 1.0]),
        contour_re=min(b + p + 1.0, 1.0) / 2.0,
        strip=(0.0, b + p + 1.0),
    )


def khat_k2(params: Params, q: float) -> BarnesKernel:
    a, b = params.alpha, params.beta
    return BarnesKernel(
        plus=(a + q,),
        minus=(b + 1.0,),
        den_plus=(0.0,),
        den_minus=(q + b + 2.0,),
        prefactor=gamma_bracket([2 * q + a + b + 2.0, -a - q], [q + a + b + 1.0]),
        contour_re=(-a - q + b + 1.0) / 2.0,
        strip=(-a - q, b + 1.0),
    )


class K1Function:
    """Inverse Mellin transform of khat_k1: the (1-x)^alpha-damped companion
    of Phi_p, decaying like x^(-beta-p-1).

    Both branches have c-a-b = +alpha at the singular point, so the local
    structure is A*analytic + B*|1-x|^alpha*analytic (bounded for alpha > 0,
    integrable blow-up otherwise)."""

    left_support = True
    right_support = True

    def __init__(self, params: Params, p: float):
        self.params = params
        self.p = p
        self.tail_power = params.beta + p + 1.0
        a, b = params.alpha, params.beta
        c2 = 2 * p + a + b + 2.0
        self._out_coef = gamma_bracket([b + 1.0, p + a + 1.0], [-p, c2]).real
        self._a_in = gamma_bracket([b + 1.0, a], [-p, p + a + b + 1.0]).real
        self._b_in = gamma_bracket([b + 1.0, -a], [p + b + 1.0, -p - a]).real
        self._a_out = gamma_bracket([c2, a], [p + a + 1.0, p + a + b + 1.0]).real
        self._b_out = gamma_bracket([c2, -a], [b + p + 1.0, p + 1.0]).real

    def eval_left(self, x, omx):
        a, b, p = self.params.alpha, self.params.beta, self.p
        out = np.empty_like(x)
        near = omx < NEAR_ONE_RADIUS
        if np.any(~near):
            out[~near] = np.real(f21_series(p + b + 1.0, -p - a, b + 1.0, x[~near]))
        if np.any(near):
            t = omx[near]
            u = np.real(f21_series(p + b + 1.0, -p - a, 1.0 - a, t))
            v = np.real(f21_series(-p, p + a + b + 1.0, 1.0 + a, t))
            out[near] = self._a_in * u + self._b_in * v * t**a
        return out

    def eval_right(self, x, xm1):
        if self._out_coef == 0.0:
            return np.zeros_like(x)
        a, b, p = self.params.alpha, self.params.beta, self.p
        c2 = 2 * p + a + b + 2.0
        out = np.empty_like(x)
        near = xm1 < NEAR_ONE_RADIUS
        if np.any(near):
            t = xm1[near]
            xx = x[near]
            w_dist = t / xx  # 1 - 1/x, exact
            u = np.real(f21_series(b + p + 1.0, p + 1.0, 1.0 - a, w_dist))
            v = np.real(f21_series(p + a + 1.0, p + a + b + 1.0, 1.0 + a, w_dist))
            series = self._a_out * u + self._b_out * v * w_dist**a
            out[near] = series * np.exp(-(b + p + 1.0) * np.log(xx))
        if np.any(~near):
            xx = x[~near]
            f = np.real(f21_eval(b + p + 1.0, p + 1.0, c2, xx))
            out[~near] = f * np.exp(-(b + p + 1.0) * np.log(xx))
        return self._out_coef * out


class K2Function:
    """Inverse Mellin transform of khat_k2, behaving like x^(q+alpha) at 0
    and x^(-beta-1) at infinity.

    Both branches have c-a-b = -alpha at the singular point: the companion
    structure A*analytic + B*|1-x|^(-alpha)*analytic, mirroring Phi."""

    left_support = True
    right_support = True

    def __init__(self, params: Params, q: float):
        self.params = params
        self.q = q
        self.tail_power = params.beta + 1.0
        a, b = params.alpha, params.beta
        c2 = 2 * q + a + b + 2.0
        self._out_coef = gamma_bracket([c2, -a - q], [q + 1.0, b + 1.0]).real
        self._a_in = gamma_bracket([c2, -a], [q + 1.0, q + b + 1.0]).real
        self._b_in = gamma_bracket([c2, a], [q + a + b + 1.0, q + a + 1.0]).real
        self._a_out = gamma_bracket([b + 1.0, -a], [-q - a, q + b + 1.0]).real
        self._b_out = gamma_bracket([b + 1.0, a], [q + a + b + 1.0, -q]).real

    def eval_left(self, x, omx):
        a, b, q = self.params.alpha, self.params.beta, self.q
        c2 = 2 * q + a + b + 2.0
        out = np.empty_like(x)
        near = omx < NEAR_ONE_RADIUS
        if np.any(~near):
            xx = x[~near]
            f = np.real(f21_series(q + a + b + 1.0, q + a + 1.0, c2, xx))
            out[~near] = f * xx ** (q + a)
        if np.any(near):
            t = omx[near]
            u = np.real(f21_series(q + a + b + 1.0, q + a + 1.0, 1.0 + a, t))
            v = np.real(f21_series(q + 1.0, q + b + 1.0, 1.0 - a, t))
            out[near] = (self._a_in * u + self._b_in * v * t ** (-a)) * x[near] ** (q + a)
        return out

    def eval_right(self, x, xm1):
        a, b, q = self.params.alpha, self.params.beta, self.q
        out = np.empty_like(x)
        near = xm1 < NEAR_ONE_RADIUS
        if np.any(near):
            t = xm1[near]
            xx = x[near]
            w_dist = t / xx
            u = np.real(f21_series(q + a + b + 1.0, -q, 1.0 + a, w_dist))
            v = np.real(f21_series(-q - a, q + b + 1.0, 1.0 - a, w_dist))
            series = self._a_out * u + self._b_out * v * w_dist ** (-a)
            out[near] = series * np.exp(-(b + 1.0) * np.log(xx))
        if np.any(~near):
            xx = x[~near]
            f = np.real(f21_eval(q + a + b + 1.0, -q, b + 1.0, xx))
            out[~near] = f * np.exp(-(b + 1.0) * np.log(xx))
        return self._out_coef * out


def kernel_K1(params: Params, p: float) -> K1Function:
    return K1Function(params, p)


def kernel_K2(params: Params, q: float) -> K2Function:
    return K2Function(params, q)


# ---------------------------------------------------------------------------
# Numerical Mellin transform
# ---------------------------------------------------------------------------

def mellin_numeric(f, s, spec=None, strip: tuple | None = None) -> complex:
    """int_0^inf f(x) x^(s-1) dx for a half-line function handle.

    The handle provides eval_left/eval_right with exact endpoint distances
    plus (optionally) a convergence strip; Re s must lie inside it.
    """
    from .quadrature import QuadratureSpec, ts_nodes

    spec = spec or QuadratureSpec(tol=1e-10)
    s = complex(s)
    if strip is not None:
        lo, hi = strip
        if not (lo < s.real < hi):
            raise StripViolation(f"Re s = {s.real} outside Mellin strip ({lo}, {hi})")
        margin = min(s.real - lo, hi - s.real)
    else:
        lo, hi = -math.inf, math.inf
        margin = 1.0
    floor = max(1e-250, (0.02 * spec.tol) ** (1.0 / max(margin, 0.05)))

    def power(xv, expo):
        return np.exp(expo * np.log(xv))

    def run(level):
        t, omt, w = ts_nodes(level)
        keep = (t >= floor) & (omt >= floor)
        t, omt, w = t[keep], omt[keep], w[keep]
        inner = np.sum(f.eval_left(t, omt) * power(t, s - 1.0) * w)
        x = 1.0 + t
        nearr = np.sum(f.eval_right(x, t) * power(x, s - 1.0) * w)
        if x_max > 2.0:
            lnrho = math.log(x_max / 2.0)
            xf = 2.0 * (x_max / 2.0) ** t
            far = np.sum(f.eval_right(xf, xf - 1.0) * power(xf, s - 1.0) * xf * lnrho * w)
        else:
            far = 0.0
        return inner + nearr + far

    if math.isinf(hi):
        x_max = spec.x_max or 100.0
    else:
        c = abs(complex(np.atleast_1d(f.eval_right(np.array([50.0]), np.array([49.0])))[0])) * 50.0**hi
        decay = hi - s.real
        x_max = float(np.clip((10.0 * max(c, 1e-30) / (spec.tol * decay)) ** (1.0 / decay), 10.0, 1e7))

    sums = []
    for level in range(spec.level_min, spec.level_max + 1):
        sums.append(run(level))
        if len(sums) > 1 and abs(sums[-1] - sums[-2]) <= spec.tol * max(1.0, abs(sums[-1])):
            return sums[-1]
    raise NoConvergence("mellin_numeric did not converge")


# ---------------------------------------------------------------------------
# Strips and the convolution identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StripReport:
    strip_K1: tuple
    strip_K2: tuple
    intersection_nonempty: bool
    convolution_applicable: bool
    checks: dict = field(default_factory=dict)


def strip_report(params: Params, p: float, q: float) -> StripReport:
    a, b = params.alpha, params.beta
    checks = {
        "0 < beta+p+1": b + p + 1.0 > 0.0,
        "0 < beta+alpha+q+1": b + a + q + 1.0 > 0.0,
        "0 < beta+1": b + 1.0 > 0.0,
        "0 < p+q+alpha+beta+1": p + q + a + b + 1.0 > 0.0,
    }
    inter = checks["0 < beta+1"] and checks["0 < p+q+alpha+beta+1"]
    nonempty = checks["0 < beta+p+1"] and checks["0 < beta+alpha+q+1"]
    return StripReport(
        strip_K1=(0.0, b + p + 1.0),
        strip_K2=(-a - q, b + 1.0),
        intersection_nonempty=nonempty,
        convolution_applicable=nonempty and inter,
        checks=checks,
    )


def convolution_parts(params: Params, p: float, q: float, spec=None):
    """(lhs, rhs): the x-side convolution K1*K2 at 1 and the s-side contour
    integral of the kernel product over the common strip."""
    from .quadrature import QuadratureSpec, ts_nodes

    rep = strip_report(params, p, q)
    if not rep.convolution_applicable:
        failing = [name for name, ok in rep.checks.items() if not ok]
        raise StripViolation(f"convolution theorem inapplicable: {failing} fail")

    qspec = spec or QuadratureSpec(tol=1e-10)
    k1 = K1Function(params, p)
    k2 = K2Function(params, q)
    a, b = params.alpha, params.beta

    decay = p + q + a + b + 2.0  # integrand ~ x^(-decay) at infinity
    x_max = float(np.clip((1.0 / (qspec.tol * (decay - 1.0))) ** (1.0 / (decay - 1.0)), 20.0, 1e6))

    def run(level):
        t, omt, w = ts_nodes(level)
        keep = (np.minimum(t, omt)) >= 1e-200
        t, omt, w = t[keep], omt[keep], w[keep]
        # x in (0,1): K2 argument 1/x > 1
        inv = 1.0 / t
        vals = k1.eval_left(t, omt) * k2.eval_right(inv, omt / t) / t
        s1 = np.sum(vals * w)
        # x in (1,2): K2 argument 1/x < 1
        x = 1.0 + t
        vals = k1.eval_right(x, t) * k2.eval_left(1.0 / x, t / x) / x
        s2 = np.sum(vals * w)
        # x in (2, x_max)
        lnrho = math.log(x_max / 2.0)
        xf = 2.0 * (x_max / 2.0) ** t
        vals = k1.eval_right(xf, xf - 1.0) * k2.eval_left(1.0 / xf, (xf - 1.0) / xf) / xf
        s3 = np.sum(vals * xf * lnrho * w)
        return s1 + s2 + s3

    sums = []
    lhs = None
    for level in range(qspec.level_min, qspec.level_max + 1):
        sums.append(run(level))
        if len(sums) > 1 and abs(sums[-1] - sums[-2]) <= qspec.tol * max(1.0, abs(sums[-1])):
            lhs = sums[-1]
            break
    if lhs is None:
        raise NoConvergence("convolution x-side quadrature did not converge")

    kern = product_kernel(khat_k1(params, p), khat_k2(params, q))
    rhs = kernel_contour_integral(kern, None, ContourSpec(tol=min(1e-9, qspec.tol)))
    return lhs, complex(rhs).real


def convolution_check(params: Params, p: float, q: float, spec=None) -> float:
    """|K1*K2(1) - inverse-transform of the kernel product at 1|."""
    lhs, rhs = convolution_parts(params, p, q, spec)
    return abs(lhs - rhs)
