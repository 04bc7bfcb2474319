"""Gauss hypergeometric engine.

Defining series with term recurrence, the Euler transformation, and the two
connection formulas (expansion around 1 in powers of (1-z) and (1-z)^(c-a-b),
and the modified variant used on the right of the singular point), plus a
region dispatcher.  Parameters may be complex; arguments are real scalars or
arrays (the real fast path keeps everything in float64).

Degenerate connection cases (c-a-b integral) are rejected with
LogarithmicCase, except for terminating series where the exact polynomial is
summed directly and no connection formula is needed.
"""
from __future__ import annotations

import numpy as np

from .errors import LogarithmicCase, NoConvergence, PoleError
from .special import POLE_TOL, gamma_bracket, pole_index

SERIES_TOL = 1e-16
MAX_TERMS = 10**6
# Region thresholds: keep every expansion variable small enough that series
# stay short at double precision.
SERIES_RADIUS = 0.7


def _terminating_index(a, b) -> int | None:
    na, nb = pole_index(a), pole_index(b)
    if na is None:
        return nb
    if nb is None:
        return na
    return min(na, nb)


def _is_complex(*vals) -> bool:
    return any(isinstance(v, complex) and v.imag != 0.0 for v in map(complex, vals))


def f21_series(a, b, c, x, *, tol: float = SERIES_TOL, max_terms: int = MAX_TERMS):
    """F[a,b;c;x] by direct summation.

    Requires |x| < 1 unless the series terminates (a or b a non-positive
    integer), in which case the exact polynomial is summed for any x.
    Truncation: |term| < tol*|partial sum| for 3 consecutive terms.
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)

    n_term = _terminating_index(a, b)
    mc = pole_index(c)
    if mc is not None and (n_term is None or n_term > mc):
        raise PoleError(f"lower parameter c={c} hits a pole before termination")

    cdtype = complex if _is_complex(a, b, c) else float
    if cdtype is complex:
        a, b, c = complex(a), complex(b), complex(c)
    else:
        a, b, c = complex(a).real, complex(b).real, complex(c).real

    if n_term is None and np.any(np.abs(x_arr) >= 1.0):
        raise NoConvergence(f"series argument |x| >= 1 (x={x_arr[np.abs(x_arr) >= 1][0]})")

    total = np.ones_like(x_arr, dtype=cdtype)
    term = np.ones_like(x_arr, dtype=cdtype)
    small_streak = 0
    k = 0
    while True:
        if n_term is not None and k >= n_term:
            break
        if k >= max_terms:
            raise NoConvergence(f"f21_series: {max_terms} terms exceeded")
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        term = term * ratio * x_arr
        total = total + term
        if n_term is None:
            if np.all(np.abs(term) <= tol * np.abs(total)):
                small_streak += 1
                if small_streak >= 3 and k >= 2:
                    break
            else:
                small_streak = 0
        k += 1
    return total[0] if scalar else total


def euler_transform(a, b, c, x):
    """F[a,b;c;x] evaluated through (1-x)^(c-a-b) F[c-a,c-b;c;x]."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr >= 1.0):
        raise NoConvergence("euler_transform requires x < 1")
    e = complex(c) - complex(a) - complex(b)
    omx = 1.0 - x_arr
    if e.imag == 0.0 and not _is_complex(a, b, c):
        pref = omx ** e.real
    else:
        pref = np.exp(e * np.log(omx))
    out = pref * f21_series(complex(c) - complex(a), complex(c) - complex(b), c, x_arr)
    return out[0] if np.ndim(x) == 0 else out


def connect_at_1(a, b, c, z):
    """F[a,b;c;z] via the two-term expansion in (1-z) and (1-z)^(c-a-b).

    Valid for |1-z| < 1.  Terminating series bypass the connection formula
    (exact polynomial); otherwise c-a-b within POLE_TOL of an integer raises
    LogarithmicCase.
    """
    if _terminating_index(a, b) is not None:
        return f21_series(a, b, c, z)
    e = complex(c) - complex(a) - complex(b)
    if abs(e.imag) <= POLE_TOL and abs(e.real - round(e.real)) <= POLE_TOL:
        raise LogarithmicCase(f"c-a-b = {e} is integral")
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    omz = 1.0 - z_arr
    coef_a = gamma_bracket([c, e], [complex(c) - complex(a), complex(c) - complex(b)])
    coef_b = gamma_bracket([c, -e], [a, b])
    u = f21_series(a, b, complex(a) + complex(b) - complex(c) + 1.0, omz)
    v = f21_series(complex(c) - complex(a), complex(c) - complex(b), e + 1.0, omz)
    if np.any(omz < 0.0) or e.imag != 0.0 or _is_complex(a, b, c):
        pw = np.exp(e * np.log(omz.astype(complex)))
    else:
        pw = omz ** e.real
    out = coef_a * u + coef_b * pw * v
    return out[0] if np.ndim(z) == 0 else out


def connect_1_over_x(a, b, c, x):
    """F[a,b;c;1/x] for real x > 1, via the expansion in powers of (1-x) and
    (x-1)^(c-a-b) carrying the factor x^a.

    Series variable is 1-x, so the formula needs 1 < x < 2; production use
    stays inside |x-1| < 0.3.  Terminating series are summed directly at 1/x.
    """
    if _terminating_index(a, b) is not None:
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = f21_series(a, b, c, 1.0 / x_arr)
        return out[0] if np.ndim(x) == 0 else out
    e = complex(c) - complex(a) - complex(b)
    if abs(e.imag) <= POLE_TOL and abs(e.real - round(e.real)) <= POLE_TOL:
        raise LogarithmicCase(f"c-a-b = {e} is integral")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr <= 1.0):
        raise NoConvergence("connect_1_over_x requires x > 1")
    omx = 1.0 - x_arr           # negative
    xm1 = x_arr - 1.0
    a_c, b_c, c_c = complex(a), complex(b), complex(c)
    coef_a = gamma_bracket([c, e], [c_c - a_c, c_c - b_c])
    coef_b = gamma_bracket([c, -e], [a, b])
    u = f21_series(a_c, a_c + 1.0 - c_c, a_c + b_c + 1.0 - c_c, omx)
    v = f21_series(c_c - b_c, 1.0 - b_c, e + 1.0, omx)
    if a_c.imag == 0.0 and not _is_complex(b, c):
        xa = x_arr ** a_c.real
        pw = xm1 ** e.real if e.imag == 0.0 else np.exp(e * np.log(xm1))
    else:
        xa = np.exp(a_c * np.log(x_arr))
        pw = np.exp(e * np.log(xm1.astype(complex)))
    out = coef_a * u * xa + coef_b * v * xa * pw
    return out[0] if np.ndim(x) == 0 else out


def f21_eval(a, b, c, x):
    """Region dispatcher.

    For x in (-1, 1): F[a,b;c;x] by series (|x| <= 0.7) or the connection
    formula at 1 (0.7 < x < 1).  For x > 1 the argument is mapped to w = 1/x
    and the same dispatch applies, so the returned value is F[a,b;c;1/x]
    (the only form the half-line formulas need).
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.ndim(x) == 0
    if np.any(x_arr == 1.0):
        raise NoConvergence("f21_eval undefined at x = 1")
    if np.any(x_arr <= -1.0):
        raise NoConvergence("f21_eval requires x > -1")
    w = np.where(x_arr > 1.0, 1.0 / x_arr, x_arr)
    cdtype = complex if _is_complex(a, b, c) else float
    out = np.empty_like(w, dtype=cdtype)
    near = w > SERIES_RADIUS
    if np.any(~near):
        vals = f21_series(a, b, c, w[~near])
        out[~near] = vals if cdtype is complex else np.real(vals)
    if np.any(near):
        vals = connect_at_1(a, b, c, w[near])
        out[near] = vals if cdtype is complex else np.real(vals)
    return out[0] if scalar else out
