"""The hypergeometric operator, its eigen-equation and boundary conditions,
the symmetry defect, the spectral transform with its Plancherel weight, and
Parseval verification.

The operator implemented is x(1-x) f'' + (beta+1-(alpha+beta+2)x) f', the
form that is formally symmetric for the weight x^beta (1-x)^alpha and has
Phi_p as eigenfunctions with lambda(p) = -p(p+alpha+beta+1); on the
continuous branch p = -(alpha+beta+1)/2 + is this gives
lambda = (alpha+beta+1)^2/4 + s^2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .errors import DomainError, PoleError
from .ortho import (
    LocalExpansion,
    Params,
    PhiFunction,
    PsiFunction,
    S_FLOOR,
    SpectralIndex,
    _phi_left_family,
    n_min,
    phi_norm_sq,
)
from .quadrature import QuadratureSpec, hermitian_pairing, ts_nodes
from .special import sinpi


def apply_D(params: Params, f, x: float, h: float | None = None) -> float:
    """x(1-x) f'' + (beta+1-(alpha+beta+2)x) f' by central differences.

    Default step h = max(1e-5, 1e-4 |x-1|) stays inside one smooth piece.
    The stencil must not straddle an evaluation seam of f (for Phi/Psi the
    branch switch sits at |x-1| = 0.3): a relative jump of ~1e-12 across the
    seam is amplified by 1/h^2.
    """
    if x in (0.0, 1.0):
        raise DomainError("operator sample at a singular point")
    if h is None:
        h = max(1e-5, 1e-4 * abs(x - 1.0))
    stencil = np.array([x - h, x, x + h], dtype=float)
    vals = np.asarray(f(stencil), dtype=float)
    d1 = (vals[2] - vals[0]) / (2.0 * h)
    d2 = (vals[2] - 2.0 * vals[1] + vals[0]) / (h * h)
    a, b = params.alpha, params.beta
    return x * (1.0 - x) * d2 + (b + 1.0 - (a + b + 2.0) * x) * d1


def lambda_of_p(params: Params, p) -> complex | float:
    """Eigenvalue lambda = -p(p+alpha+beta+1)."""
    val = -p * (p + params.alpha + params.beta + 1.0)
    if isinstance(p, complex):
        return val
    return float(val)


def p_of_lambda(params: Params, lam: float, branch: str = "discrete"):
    """Inverse of lambda_of_p.

    branch="discrete": the root with Re p > -(alpha+beta+1)/2.
    branch="continuous": p = -(alpha+beta+1)/2 + i s with s >= 0.
    """
    sig = params.alpha + params.beta + 1.0
    disc = sig * sig / 4.0 - lam
    if branch == "discrete":
        root = cmath.sqrt(disc)
        p = -sig / 2.0 + root
        return p.real if abs(p.imag) < 1e-14 else p
    if branch == "continuous":
        if lam < sig * sig / 4.0:
            raise DomainError("continuous branch requires lambda >= (alpha+beta+1)^2/4")
        return complex(-sig / 2.0, math.sqrt(lam - sig * sig / 4.0))
    raise DomainError(f"unknown branch {branch!r}")


# ---------------------------------------------------------------------------
# Boundary machinery at x = 1
# ---------------------------------------------------------------------------

def symmetry_defect(params: Params, f, g, spec: QuadratureSpec | None = None) -> float:
    """lim {Df,g} - {f,Dg}: the sum of the two one-sided boundary terms at 1.

    From the declared local expansions, the left piece contributes
    alpha (B_f A_g - A_f B_g) and the sine-ratio-weighted right piece
    alpha (A_f B_g - B_f A_g); the sum vanishes exactly on glued data.
    """
    lf = f.local_at_1()
    lg = g.local_at_1()
    a = params.alpha
    left = a * (lf.b_left * lg.a_left - lf.a_left * lg.b_left)
    right = a * (lf.a_right * lg.b_right - lf.b_right * lg.a_right)
    return left + params.pairing_ratio() * right


def symmetry_defect_quadrature(params: Params, f, g, eps: float = 1e-4,
                               spec: QuadratureSpec | None = None) -> float:
    """{Df,g} - {f,Dg} with the integrals truncated at distance eps from 1.

    Slow reference path (finite differences at every node); used to validate
    the closed form of symmetry_defect.
    """
    spec = spec or QuadratureSpec(tol=1e-9)
    a, b = params.alpha, params.beta

    def d_op(handle, x, side):
        h = np.maximum(1e-6, 1e-5 * np.abs(x - 1.0))
        if side == "left":
            vals = [handle.eval_left(xx, 1.0 - xx) for xx in (x - h, x, x + h)]
        else:
            vals = [handle.eval_right(xx, xx - 1.0) for xx in (x - h, x, x + h)]
        d1 = (vals[2] - vals[0]) / (2.0 * h)
        d2 = (vals[2] - 2.0 * vals[1] + vals[0]) / (h * h)
        return x * (1.0 - x) * d2 + (b + 1.0 - (a + b + 2.0) * x) * d1

    def piece(side):
        total_prev = None
        for level in range(spec.level_min, spec.level_max + 1):
            t, omt, w = ts_nodes(level)
            if side == "left":
                # x in (0, 1-eps)
                x = t * (1.0 - eps)
                wt = w * (1.0 - eps)
                weight = (1.0 - x) ** a * x**b
            else:
                # x in (1+eps, X); X from the pair decay
                x_hi = 60.0
                x = 1.0 + eps + t * (x_hi - 1.0 - eps)
                wt = w * (x_hi - 1.0 - eps)
                weight = (x - 1.0) ** a * x**b
            fd = d_op(f, x, side)
            gd = d_op(g, x, side)
            if side == "left":
                fv = f.eval_left(x, 1.0 - x)
                gv = g.eval_left(x, 1.0 - x)
            else:
                fv = f.eval_right(x, x - 1.0)
                gv = g.eval_right(x, x - 1.0)
            total = float(np.sum((fd * gv - fv * gd) * weight * wt))
            if total_prev is not None and abs(total - total_prev) <= 1e-7 * max(1.0, abs(total)):
                return total
            total_prev = total
        return total_prev

    return piece("left") + params.pairing_ratio() * piece("right")


def boundary_check(le: LocalExpansion, params: Params, rtol: float = 1e-9) -> bool:
    """True iff the expansion satisfies the cross-gluing at x = 1."""
    scale = max(abs(le.a_left), abs(le.b_left), abs(le.a_right), abs(le.b_right), 1e-300)
    ratio = params.pairing_ratio()
    return (
        abs(le.b_left - le.b_right) < rtol * scale
        and abs(le.a_right * ratio - le.a_left) < rtol * scale
    )


def boundary_defect(le: LocalExpansion, params: Params) -> float:
    """Magnitude of the gluing violation (0 for members of the domain)."""
    scale = max(abs(le.a_left), abs(le.b_left), abs(le.a_right), abs(le.b_right), 1e-300)
    ratio = params.pairing_ratio()
    return max(abs(le.b_left - le.b_right), abs(le.a_right * ratio - le.a_left)) / scale


# ---------------------------------------------------------------------------
# Plancherel weight and the transform
# ---------------------------------------------------------------------------

def plancherel_weight(params: Params, s):
    """Weight w(s) of the continuous part of the spectral inner product.

    w(s) = sin(theta pi) sin((theta+alpha) pi) / (2 pi Gamma(beta+1)^2)
           * |Gamma(A-is) Gamma(B-is) / (Gamma(2is) cos((G-is) pi))|^2
    with A, B the (alpha+beta+1)/2, (-alpha+beta+1)/2 pair and
    G = (alpha+beta)/2 + theta.
    """
    a, b, th = params.alpha, params.beta, params.theta
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr < S_FLOOR):
        raise DomainError(f"plancherel_weight requires s >= {S_FLOOR}")
    A = (a + b + 1.0) / 2.0
    B = (-a + b + 1.0) / 2.0
    G = (a + b) / 2.0 + th
    z = 1j * s_arr
    lg = (
        loggamma(A - z)
        + loggamma(B - z)
        - loggamma(2.0 * z)
        - np.log(np.cos(np.pi * (G - z)))
    )
    mod2 = np.exp(2.0 * np.real(lg))
    const = sinpi(th) * sinpi(th + a) / (2.0 * math.pi * math.gamma(b + 1.0) ** 2)
    out = const * mod2
    return out[0] if np.ndim(s) == 0 else out


@dataclass(frozen=True)
class SpectralData:
    """Image (a(p), F(s)) of a function under the spectral transform."""

    n_values: np.ndarray     # integer offsets, theta + n = p
    a_values: np.ndarray     # a(p) = <f, Phi_p>
    s_grid: np.ndarray
    f_values: np.ndarray     # F(s) = <f, Psi_s>
    w_values: np.ndarray     # plancherel weight samples

    def __post_init__(self):
        if not np.all(np.isfinite(self.a_values)) or not np.all(np.isfinite(self.f_values)):
            raise DomainError("non-finite spectral data")
        if np.any(np.diff(self.s_grid) <= 0):
            raise DomainError("s grid must be strictly increasing")


def _phi_coefficients(params: Params, f, n_max: int, spec: QuadratureSpec) -> np.ndarray:
    """All a(p) = <f, Phi_p> for n_min <= n <= n_max in one family sweep."""
    a, b = params.alpha, params.beta
    lo = n_min(params)

    def left_part(level):
        t, omt, w = ts_nodes(level)
        keep = (t > 1e-200) & (omt > 1e-200)
        t, omt, w = t[keep], omt[keep], w[keep]
        fam = _phi_left_family(params, n_max, t, omt)
        fv = f.eval_left(t, omt)
        return fam @ (fv * w * omt**a * t**b)

    sums = None
    for level in range(spec.level_min, spec.level_max + 1):
        cur = left_part(level)
        if sums is not None and np.all(
            np.abs(cur - sums) <= spec.tol * np.maximum(1.0, np.abs(cur))
        ):
            sums = cur
            break
        sums = cur
    acc = sums

    if getattr(f, "right_support", True) and not params.theta_integral:
        ratio = params.pairing_ratio()
        for n in range(lo, n_max + 1):
            handle = PhiFunction(params, SpectralIndex.make(params, n))

            class _RightOnly:
                left_support = False
                right_support = True
                tail_power = getattr(f, "tail_power", 2.0)

                def eval_left(self, x, omx):
                    return np.zeros_like(x)

                def eval_right(self, x, xm1):
                    return f.eval_right(x, xm1)

            r = hermitian_pairing(params, _RightOnly(), handle, spec)
            acc[n - lo] += r.value  # pairing applies the ratio internally
    return acc


def _psi_coefficients(params: Params, f, s_grid: np.ndarray,
                      spec: QuadratureSpec) -> np.ndarray:
    """F(s) = <f, Psi_s> for the whole grid, batching the (0,1) integrals.

    Two tanh-sinh levels give the values and their agreement; grid points
    that have not settled are redone with the general adaptive pairing.
    """
    from .ortho import _psi_left_batch

    a, b = params.alpha, params.beta

    def run_batch(s_vals, levels):
        acc = []
        for level in levels:
            t, omt, w = ts_nodes(level)
            keep = (t > 1e-200) & (omt > 1e-200)
            t, omt, w = t[keep], omt[keep], w[keep]
            psi_mat = _psi_left_batch(params, s_vals, t, omt)
            fv = f.eval_left(t, omt) * w * omt**a * t**b
            acc.append(psi_mat @ fv)
        return acc[-1], np.abs(acc[-1] - acc[-2])

    lo_level = max(spec.level_min + 2, 6)
    batch = 64
    out = np.empty_like(s_grid)
    est = np.empty_like(s_grid)
    for start in range(0, s_grid.size, batch):
        vals, errs = run_batch(s_grid[start : start + batch], (lo_level, lo_level + 1))
        out[start : start + batch] = vals
        est[start : start + batch] = errs

    bad = est > spec.tol * np.maximum(1.0, np.abs(out))
    if np.any(bad):
        vals, errs = run_batch(s_grid[bad], (lo_level + 2, lo_level + 3))
        out[bad] = vals
        est[bad] = errs

    right = getattr(f, "right_support", True) and not params.theta_integral
    for i, s in enumerate(s_grid):
        if right or est[i] > spec.tol * max(1.0, abs(out[i])):
            res = hermitian_pairing(params, f, PsiFunction(params, float(s)), spec)
            out[i] = res.value
    return out


def forward_transform(
    params: Params,
    f,
    N: int,
    s_grid: np.ndarray,
    spec: QuadratureSpec | None = None,
) -> SpectralData:
    """Spectral image of f: a(p) against the discrete family up to theta+N,
    F(s) against Psi_s on the given grid.

    The default tolerance allows for the ~1e-9 relative noise floor of the
    large-s Psi pairings (local-expansion cancellation at the window edge)."""
    spec = spec or QuadratureSpec(tol=1e-8)
    s_grid = np.asarray(s_grid, dtype=float)
    a_vals = _phi_coefficients(params, f, N, spec)
    f_vals = _psi_coefficients(params, f, s_grid, spec)
    lo = n_min(params)
    return SpectralData(
        n_values=np.arange(lo, N + 1),
        a_values=np.asarray(a_vals),
        s_grid=s_grid,
        f_values=f_vals,
        w_values=plancherel_weight(params, s_grid),
    )


def spectral_inner(params: Params, u: SpectralData, v: SpectralData) -> float:
    """[(a,F);(b,G)]: normalized discrete sum plus the weighted s-integral."""
    if u.n_values.shape != v.n_values.shape or u.s_grid.shape != v.s_grid.shape:
        raise DomainError("spectral data shapes differ")
    disc = 0.0
    for n, au, av in zip(u.n_values, u.a_values, v.a_values):
        norm = phi_norm_sq(params, SpectralIndex.make(params, int(n)))
        disc += (au / norm) * av
    cont = float(np.trapezoid(u.w_values * u.f_values * v.f_values, u.s_grid))
    return disc + cont


def parseval_check(
    params: Params,
    f,
    g,
    N: int,
    s_grid: np.ndarray,
    spec: QuadratureSpec | None = None,
) -> float:
    """|<f,g> - [Uf, Ug]| with the transform truncated at N and the grid."""
    spec = spec or QuadratureSpec(tol=1e-8)
    lhs = hermitian_pairing(params, f, g, spec).value
    uf = forward_transform(params, f, N, s_grid, spec)
    ug = uf if g is f else forward_transform(params, g, N, s_grid, spec)
    return abs(lhs - spectral_inner(params, uf, ug))
