"""Numerical pairings {f,g} and <f,g> on the half-line with algebraic endpoint
singularities at 0 and 1 and a truncated tail at infinity, plus the
closed-form cross-integrals X, Y used as oracles.

Scheme: tanh-sinh (double-exponential) nodes on (0,1) and (1,2), a
geometric substitution on (2, x_max), and an analytic power-law bound for the
remainder.  Node distances to the singular endpoints are generated exactly
(never as 1-x of a rounded node), and the weight is split as a square root
over the two factors so that individually non-square-integrable blowups never
overflow before they cancel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NoConvergence, PoleError
from .ortho import Params, phi_norm_sq
from .special import gamma_bracket, sinpi

_U_MAX = 6.08  # beyond this the node distance underflows double precision


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and truncation policy for half-line pairings."""

    tol: float = 1e-10
    x_max: float | None = None
    level_max: int = 10
    level_min: int = 4

    def __post_init__(self):
        if self.tol < 1e-12:
            raise DomainError("tol below 1e-12 is not attainable in double precision")


@dataclass(frozen=True)
class PairingResult:
    value: float
    est_error: float
    tail_bound: float
    positive_definite: bool | None = None


@lru_cache(maxsize=32)
def ts_nodes(level: int):
    """Tanh-sinh nodes on (0,1): arrays (t, 1-t, weight), distances exact."""
    h = 1.0 / 2**level
    k = np.arange(-math.floor(_U_MAX / h), math.floor(_U_MAX / h) + 1)
    u = k * h
    ex = np.exp(-np.pi * np.sinh(np.abs(u)))
    small = ex / (1.0 + ex)
    big = 1.0 / (1.0 + ex)
    t = np.where(u >= 0, big, small)
    omt = np.where(u >= 0, small, big)
    w = h * np.pi * np.cosh(u) * t * omt
    return t, omt, w


def _converge(sums: list[float], tol: float) -> tuple[float, float, bool]:
    value = sums[-1]
    if len(sums) < 2:
        return value, abs(value), False
    est = abs(sums[-1] - sums[-2])
    return value, est, est <= tol * max(1.0, abs(value))


def _piece_unit(fn, spec: QuadratureSpec, tol: float):
    """Integrate fn(t, omt, w) -> summand array over the unit interval nodes."""
    sums: list[float] = []
    for level in range(spec.level_min, spec.level_max + 1):
        t, omt, w = ts_nodes(level)
        sums.append(float(np.sum(fn(t, omt, w))))
        value, est, done = _converge(sums, tol)
        if done:
            return value, est
    value, est, done = _converge(sums, tol)
    if not done:
        raise NoConvergence(
            f"tanh-sinh refinement cap level={spec.level_max} reached, est={est:.3g}"
        )
    return value, est


# Node-distance floor.  The sqrt-weight split keeps individual factors finite,
# but t^(-alpha) times a large family coefficient must stay below overflow;
# 1e-160 leaves dropped endpoint mass ~ floor^(1-|alpha|) far below any
# supported tolerance for |alpha| <= 0.9.
_T_FLOOR = 1e-160


def _sample_tail_coef(f, power: float, x_probe: float = 50.0) -> float:
    """Estimate C with |f(x)| ~ C x^(-power) from a single right-side sample."""
    val = abs(float(np.atleast_1d(f.eval_right(np.array([x_probe]), np.array([x_probe - 1.0])))[0]))
    if val == 0.0:
        return 0.0
    return val * x_probe**power


def _auto_x_max(params: Params, f, g, tol: float) -> tuple[float, float, float]:
    """(x_max, q, C) with tail integrand ~ C x^(-q) beyond x_max."""
    q = f.tail_power + g.tail_power - params.alpha - params.beta
    if not q > 1.0 + 1e-9:
        raise DomainError(
            f"tail integrand exponent {q:.6g} <= 1: pairing not integrable at infinity"
        )
    c = _sample_tail_coef(f, f.tail_power) * _sample_tail_coef(g, g.tail_power)
    if c == 0.0:
        return 10.0, q, 0.0
    x_max = (10.0 * c / (tol * (q - 1.0))) ** (1.0 / (q - 1.0))
    return float(np.clip(x_max, 10.0, 1e7)), q, c


def _pairing_pieces(params: Params, f, g, spec: QuadratureSpec):
    a, b = params.alpha, params.beta
    tol = spec.tol
    floor = _T_FLOOR

    def inner(t, omt, w):
        keep = (t >= floor) & (omt >= floor)
        t, omt, w = t[keep], omt[keep], w[keep]
        r = np.sqrt(w * omt**a * t**b)
        return (f.eval_left(t, omt) * r) * (g.eval_left(t, omt) * r)

    i1, e1 = _piece_unit(inner, spec, tol)

    right = getattr(f, "right_support", True) and getattr(g, "right_support", True)
    if not right:
        return i1, 0.0, e1, 0.0, 0.0

    def near(t, omt, w):
        keep = t >= floor
        t, w = t[keep], w[keep]
        x = 1.0 + t
        r = np.sqrt(w * t**a * x**b)
        return (f.eval_right(x, t) * r) * (g.eval_right(x, t) * r)

    i2a, e2a = _piece_unit(near, spec, tol)

    if spec.x_max is not None:
        x_max = spec.x_max
        q = f.tail_power + g.tail_power - a - b
        c = _sample_tail_coef(f, f.tail_power) * _sample_tail_coef(g, g.tail_power)
        tail = c * x_max ** (1.0 - q) / (q - 1.0) if q > 1.0 else math.inf
    else:
        x_max, q, c = _auto_x_max(params, f, g, tol)
        tail = c * x_max ** (1.0 - q) / (q - 1.0)

    if x_max > 2.0:
        rho = x_max / 2.0
        lnrho = math.log(rho)

        def far(t, omt, w):
            x = 2.0 * rho**t
            jac = x * lnrho
            r = np.sqrt(w * (x - 1.0) ** a * x**b * jac)
            return (f.eval_right(x, x - 1.0) * r) * (g.eval_right(x, x - 1.0) * r)

        i2b, e2b = _piece_unit(far, spec, tol)
    else:
        i2b, e2b = 0.0, 0.0

    return i1, i2a + i2b, e1, e2a + e2b, tail


def bilinear_pairing(params: Params, f, g, spec: QuadratureSpec | None = None) -> PairingResult:
    """{f, g}: weight (1-x)^alpha x^beta on (0,1) plus the sine-ratio-weighted
    (x-1)^alpha x^beta integral on (1, x_max), with an analytic tail bound."""
    spec = spec or QuadratureSpec()
    i1, i2, e1, e2, tail = _pairing_pieces(params, f, g, spec)
    if params.theta_integral:
        scale = max(abs(i1), 1.0)
        if abs(i2) > 1e-13 * scale:
            raise DomainError(
                "theta integral: the (1,inf) weight factor diverges but the "
                f"integral is nonzero ({i2:.3g})"
            )
        return PairingResult(value=i1, est_error=e1, tail_bound=0.0)
    ratio = params.pairing_ratio()
    return PairingResult(
        value=i1 + ratio * i2,
        est_error=e1 + abs(ratio) * e2,
        tail_bound=abs(ratio) * tail,
    )


def hermitian_pairing(params: Params, f, g, spec: QuadratureSpec | None = None) -> PairingResult:
    """<f, g>: identical to the bilinear pairing for real-valued inputs, with
    the positivity of the underlying inner product recorded."""
    res = bilinear_pairing(params, f, g, spec)
    return PairingResult(
        value=res.value,
        est_error=res.est_error,
        tail_bound=res.tail_bound,
        positive_definite=params.positive_definite,
    )


# ---------------------------------------------------------------------------
# Closed-form cross-integrals (each half-line summand separately)
# ---------------------------------------------------------------------------

def _a_pq(params: Params, p: float, q: float) -> float:
    s = p + q + params.alpha + params.beta + 1.0
    if s <= 0:
        raise DomainError(f"p+q+alpha+beta+1 = {s:.6g} must be positive")
    return gamma_bracket(
        [2 * p + params.alpha + params.beta + 2.0, 2 * q + params.alpha + params.beta + 2.0]
    ).real / s


def _b_pq(params: Params, p: float, q: float) -> float:
    a, b = params.alpha, params.beta
    return gamma_bracket([q + 1.0, p + a + 1.0], [p + b + 1.0, q + a + b + 1.0]).real


def cross_integral_X(params: Params, p: float, q: float) -> float:
    """Closed form of the (0,1) half of the pairing of Phi_p with Phi_q."""
    if abs(p - q) < 1e-12:
        raise DomainError("cross_integral_X requires p != q (use the norm at p=q)")
    a, b = params.alpha, params.beta
    t1 = gamma_bracket([], [p + b + 1.0, q + a + b + 1.0, -q, -p - a]).real
    t2 = gamma_bracket([], [q + b + 1.0, p + a + b + 1.0, -p, -q - a]).real
    return math.pi * _a_pq(params, p, q) / ((q - p) * sinpi(a)) * (t1 - t2)


def cross_integral_Y(params: Params, p: float, q: float) -> float:
    """Closed form of the (1, inf) half of the pairing of Phi_p with Phi_q."""
    if abs(p - q) < 1e-12:
        raise DomainError("cross_integral_Y requires p != q")
    a = params.alpha
    coef = _a_pq(params, p, q) * sinpi(p) * sinpi(q) / (math.pi * (q - p) * sinpi(a))
    return coef * (_b_pq(params, q, p) - _b_pq(params, p, q))


# ---------------------------------------------------------------------------
# Gram matrix helper
# ---------------------------------------------------------------------------

def gram_matrix(params: Params, size: int, spec: QuadratureSpec | None = None,
                workers: int = 1):
    """Pairings G[m,n] = {Phi_(theta+m), Phi_(theta+n)} for 0 <= m,n < size.

    Returns (G, diag_closed, est_error_matrix).  Pairs are independent jobs;
    workers > 1 maps them over a thread pool (assembly stays single-owner).
    """
    from concurrent.futures import ThreadPoolExecutor

    from .ortho import PhiFunction, SpectralIndex

    spec = spec or QuadratureSpec()
    handles = [PhiFunction(params, SpectralIndex.make(params, n)) for n in range(size)]
    pairs = [(m, n) for m in range(size) for n in range(m, size)]

    def job(mn):
        m, n = mn
        return mn, bilinear_pairing(params, handles[m], handles[n], spec)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, pairs))
    else:
        results = [job(mn) for mn in pairs]

    g = np.zeros((size, size))
    est = np.zeros((size, size))
    for (m, n), res in results:
        g[m, n] = g[n, m] = res.value
        est[m, n] = est[n, m] = res.est_error + res.tail_bound
    diag = np.array([phi_norm_sq(params, h.idx) for h in handles])
    return g, diag, est
