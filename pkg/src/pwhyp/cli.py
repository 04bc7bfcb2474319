"""Batch driver: evaluate the special functions, run the verification suites,
emit machine-readable tables (JSON or CSV) and optionally render figures.

Exit codes: 0 all checks pass, 2 configuration error, 3 numeric failure.
Flags override a key=value config file; PWH_THREADS caps suite parallelism.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import DomainError, NoConvergence, PoleError, PwhypError, StripViolation
from .identities import (
    BetaIdentityParams,
    beta_lhs,
    beta_rhs,
    dbw_closed,
    dbw_integral,
    dougall_closed,
    dougall_sum,
)
from .mellin import (
    barnes_delta,
    barnes_delta_closed,
    barnes_main_integral,
    convolution_parts,
)
from .ortho import (
    Params,
    PhiFunction,
    SpectralIndex,
    XiFunction,
    n_min,
    phi_norm_sq,
    phi_p,
    phi_p_local,
    psi_local,
    psi_s,
)
from .quadrature import QuadratureSpec, bilinear_pairing, gram_matrix
from .spectral import (
    LocalExpansion,
    apply_D,
    boundary_check,
    boundary_defect,
    forward_transform,
    lambda_of_p,
    parseval_check,
    plancherel_weight,
    spectral_inner,
    symmetry_defect,
)
from .hyp import f21_eval

COMMANDS = ("eval", "gram", "norms", "spectral", "parseval", "identities", "mellin", "boundary")


@dataclass
class RunConfig:
    command: str
    params: Params
    tol: float = 1e-8
    fmt: str = "json"
    output: str | None = None
    plot: str | None = None
    extra: dict = field(default_factory=dict)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PWH_THREADS", "1")))
    except ValueError:
        return 1


def _fmt_float(x) -> str:
    return format(float(x), ".17g")


def _emit(cfg: RunConfig, results: list[dict]) -> None:
    if cfg.fmt == "json":
        doc = {
            "meta": {
                "params": {
                    "alpha": cfg.params.alpha,
                    "beta": cfg.params.beta,
                    "theta": cfg.params.theta,
                },
                "tol": cfg.tol,
                "version": __version__,
            },
            "results": results,
        }
        text = json.dumps(doc, indent=2)
    else:
        buf = io.StringIO()
        keys: list[str] = []
        for row in results:
            for k in row:
                if k not in keys:
                    keys.append(k)
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(keys)
        for row in results:
            writer.writerow(
                [_fmt_float(row[k]) if isinstance(row.get(k), float) else row.get(k, "")
                 for k in keys]
            )
        text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
            if cfg.fmt == "json":
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if cfg.fmt == "json":
            sys.stdout.write("\n")


def _check_row(name: str, lhs: float, rhs: float, tol: float, scale: float = 1.0) -> dict:
    residual = abs(lhs - rhs)
    return {
        "name": name,
        "lhs": float(lhs),
        "rhs": float(rhs),
        "residual": float(residual),
        "tol": float(tol * scale),
        "pass": bool(residual <= tol * scale),
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise DomainError(f"grid must be start:stop:step, got {text!r}") from exc
    if step <= 0:
        raise DomainError("grid step must be positive")
    pts = np.arange(start, stop + step / 2.0, step)
    return pts[(pts > 0) & (pts != 1.0)]


def cmd_eval(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    grid = _parse_grid(cfg.extra.get("grid") or "0.05:2.0:0.05")
    rows = []
    if cfg.extra.get("psi"):
        s = float(cfg.extra.get("s") or 1.0)
        label = f"Psi_s, s={s:g}"
        for x in grid:
            try:
                val = float(psi_s(params, s, float(x)))
                rows.append({"x": float(x), "value": val, "status": "ok"})
            except PwhypError as exc:
                rows.append({"x": float(x), "value": math.nan, "status": str(exc)})
    else:
        n = int(cfg.extra.get("n") or 0)
        idx = SpectralIndex.make(params, n)
        label = f"Phi_p, p=theta+{n}"
        for x in grid:
            try:
                val = float(phi_p(params, idx, float(x)))
                rows.append({"x": float(x), "value": val, "status": "ok"})
            except PwhypError as exc:
                rows.append({"x": float(x), "value": math.nan, "status": str(exc)})
    if cfg.plot and rows:
        from .figures import plot_eval_curve

        ok = [r for r in rows if r["status"] == "ok"]
        plot_eval_curve([r["x"] for r in ok], [r["value"] for r in ok], label, cfg.plot)
    return rows, True


def cmd_gram(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    size = int(cfg.extra.get("size") or 6)
    spec = QuadratureSpec(tol=max(cfg.tol * 1e-2, 1e-12))
    g, diag, est = gram_matrix(params, size, spec, workers=_threads())
    scale = np.sqrt(np.abs(np.diag(g)))
    off = np.abs(g / np.outer(scale, scale))
    np.fill_diagonal(off, 0.0)
    max_off = float(np.max(off))
    diag_rel = float(np.max(np.abs(np.diag(g) / diag - 1.0)))
    rows = [
        {
            "name": "gram-matrix",
            "matrix": [[float(v) for v in row] for row in g],
            "closed_form_diagonal": [float(v) for v in diag],
            "est_error": [[float(v) for v in row] for row in est],
            "max_offdiagonal_ratio": max_off,
            "max_diagonal_rel_defect": diag_rel,
            "tol": cfg.tol,
            "pass": bool(max_off < 1e-7 and diag_rel < 1e-8),
        }
    ]
    if cfg.plot:
        from .figures import plot_gram_heatmap

        plot_gram_heatmap(g, cfg.plot)
    return rows, rows[0]["pass"]


def cmd_norms(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    nmax = int(cfg.extra.get("nmax") or 5)
    spec = QuadratureSpec(tol=max(cfg.tol * 1e-2, 1e-12))
    rows = []
    ok = True
    for n in range(nmax + 1):
        idx = SpectralIndex.make(params, n)
        handle = PhiFunction(params, idx)
        quad = bilinear_pairing(params, handle, handle, spec)
        closed = phi_norm_sq(params, idx)
        row = _check_row(f"norm-n{n}", quad.value, closed, 1e-8, abs(closed))
        row["est_error"] = quad.est_error + quad.tail_bound
        rows.append(row)
        ok &= row["pass"]
    return rows, ok


def cmd_spectral(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    nmax = int(cfg.extra.get("nmax") or 4)
    rows = []
    ok = True
    xs = [0.3, 0.8, 1.7, 3.0]
    for n in range(nmax + 1):
        idx = SpectralIndex.make(params, n)
        lam = lambda_of_p(params, idx.p)
        worst = 0.0
        for x in xs:
            res = apply_D(params, lambda xx: phi_p(params, idx, xx), x) - lam * phi_p(params, idx, x)
            worst = max(worst, abs(res) / (1.0 + abs(phi_p(params, idx, x))))
        row = {
            "name": f"eigen-residual-n{n}",
            "lhs": worst,
            "rhs": 0.0,
            "residual": worst,
            "tol": 1e-5,
            "pass": bool(worst < 1e-5),
        }
        rows.append(row)
        ok &= row["pass"]
    sig = params.alpha + params.beta + 1.0
    cut = sig * sig / 4.0
    lams = [lambda_of_p(params, params.theta + n) for n in range(n_min(params), nmax + 1)]
    dichotomy = all(l < cut for l in lams)
    rows.append(
        {
            "name": "spectrum-dichotomy",
            "lhs": max(lams),
            "rhs": cut,
            "residual": 0.0 if dichotomy else max(lams) - cut,
            "tol": 0.0,
            "pass": bool(dichotomy),
        }
    )
    ok &= dichotomy
    if cfg.plot:
        from .figures import plot_spectrum

        s_grid = np.arange(0.05, 20.0, 0.05)
        uf = forward_transform(params, XiFunction(0.6), max(nmax, 5), s_grid)
        plot_spectrum(s_grid, uf.w_values * uf.f_values**2, np.array(lams), cut, cfg.plot)
    return rows, ok


def cmd_parseval(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    mu = float(cfg.extra.get("mu") or 0.6)
    n_cut = int(cfg.extra.get("ncut") or 20)
    s_max = float(cfg.extra.get("smax") or 40.0)
    step = float(cfg.extra.get("step") or 0.05)
    grid = np.concatenate([[1e-6], np.arange(step, s_max + step / 2.0, step)])
    xi = XiFunction(mu)
    lhs = bilinear_pairing(params, xi, xi).value
    uf = forward_transform(params, xi, n_cut, grid)
    rhs = spectral_inner(params, uf, uf)
    rows = [_check_row(f"parseval-xi-{mu:g}", lhs, rhs, 1e-4)]
    if cfg.plot:
        from .figures import plot_spectrum

        lams = [lambda_of_p(params, params.theta + float(n)) for n in uf.n_values]
        sig = params.alpha + params.beta + 1.0
        plot_spectrum(grid, uf.w_values * uf.f_values**2, np.array(lams), sig * sig / 4.0, cfg.plot)
    return rows, rows[0]["pass"]


def cmd_identities(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    mu = float(cfg.extra.get("mu") or 0.1)
    nu = float(cfg.extra.get("nu") or 0.2)
    bp = BetaIdentityParams(params, mu, nu)
    rows = [
        _check_row("beta-identity", beta_lhs(bp), beta_rhs(bp), 1e-5),
        _check_row("dbw-integral", dbw_integral(0.3, 0.4, 0.5, 2.0), dbw_closed(0.3, 0.4, 0.5, 2.0), 1e-6),
        _check_row("dougall-5h5", dougall_sum(0.2, 1.3, 1.4, 1.5), dougall_closed(0.2, 1.3, 1.4, 1.5), 1e-8),
    ]
    ok = all(r["pass"] for r in rows)
    if cfg.plot:
        from .figures import plot_suite_residuals

        plot_suite_residuals(
            [r["name"] for r in rows], [r["residual"] for r in rows],
            [r["tol"] for r in rows], cfg.plot, "identities.png",
        )
    return rows, ok


def cmd_mellin(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    a, b, c = 1.1, 0.4, 2.2
    rows = []
    for x in (0.5, 2.0):
        num = barnes_main_integral(a, b, c, x)
        ref = complex(f21_eval(a, b, c, x))
        if x > 1.0:
            from .special import gamma_bracket

            ref = ref * gamma_bracket([c, 1.0 - b], [c - a, 1.0 + a - b]) * x ** (-a)
        rows.append(_check_row(f"barnes-main-x{x:g}", num.real, ref.real, 1e-7))
    rows.append(
        _check_row("barnes-delta", barnes_delta(1.0, 1.0, 2.0, 2.0).real,
                   barnes_delta_closed(1.0, 1.0, 2.0, 2.0).real, 1e-7)
    )
    lhs, rhs = convolution_parts(params, params.theta, params.theta + 1.0)
    rows.append(_check_row("convolution", lhs, rhs, 1e-6))
    ok = all(r["pass"] for r in rows)
    if cfg.plot:
        from .figures import plot_suite_residuals

        plot_suite_residuals([r["name"] for r in rows], [r["residual"] for r in rows],
                             [r["tol"] for r in rows], cfg.plot, "mellin.png")
    return rows, ok


def cmd_boundary(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    nmax = int(cfg.extra.get("nmax") or 4)
    rows = []
    ok = True
    for n in range(nmax + 1):
        le = phi_p_local(params, SpectralIndex.make(params, n))
        good = boundary_check(le, params)
        rows.append(
            {
                "name": f"gluing-phi-n{n}",
                "lhs": boundary_defect(le, params),
                "rhs": 0.0,
                "residual": boundary_defect(le, params),
                "tol": 1e-9,
                "pass": bool(good),
            }
        )
        ok &= good
    for s in (0.7, 2.0):
        le = psi_local(params, s)
        good = boundary_check(le, params)
        rows.append(
            {
                "name": f"gluing-psi-s{s:g}",
                "lhs": boundary_defect(le, params),
                "rhs": 0.0,
                "residual": boundary_defect(le, params),
                "tol": 1e-9,
                "pass": bool(good),
            }
        )
        ok &= good
    # deliberately broken gluing: the defect must match its closed form
    le = phi_p_local(params, SpectralIndex.make(params, 1))
    broken = LocalExpansion(le.a_left, le.b_left, 2.0 * le.a_right, le.b_right)
    f = PhiFunction(params, SpectralIndex.make(params, 0))

    class _Broken(PhiFunction):
        def local_at_1(self):
            return broken

    g = _Broken(params, SpectralIndex.make(params, 1))
    defect = symmetry_defect(params, f, g)
    lf = f.local_at_1()
    predicted = params.alpha * (
        lf.b_left * broken.a_left - lf.a_left * broken.b_left
    ) + params.pairing_ratio() * params.alpha * (
        lf.a_right * broken.b_right - lf.b_right * broken.a_right
    )
    row = _check_row("perturbed-defect", defect, predicted, 1e-6, max(1.0, abs(predicted)))
    row["pass"] = bool(row["pass"] and abs(defect) > 1e-3)
    rows.append(row)
    ok &= row["pass"]
    if cfg.plot:
        from .figures import plot_suite_residuals

        plot_suite_residuals([r["name"] for r in rows], [r["residual"] for r in rows],
                             [r["tol"] for r in rows], cfg.plot, "boundary.png")
    return rows, ok


_DISPATCH = {
    "eval": cmd_eval,
    "gram": cmd_gram,
    "norms": cmd_norms,
    "spectral": cmd_spectral,
    "parseval": cmd_parseval,
    "identities": cmd_identities,
    "mellin": cmd_mellin,
    "boundary": cmd_boundary,
}


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------

def _read_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"config line not key=value: {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwhyp",
        description="Piece-wise hypergeometric orthogonal system toolkit",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key=value file; flags override it")
    parser.add_argument("--alpha", type=float, default=0.3)
    parser.add_argument("--beta", type=float, default=0.5)
    parser.add_argument("--theta", type=float, default=0.25)
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--output", help="output path (default: stdout)")
    parser.add_argument("--plot", metavar="DIR", help="render figures into DIR")
    parser.add_argument("--phi", action="store_true", help="eval: sample Phi (default)")
    parser.add_argument("--psi", action="store_true", help="eval: sample Psi")
    parser.add_argument("--n", type=int, help="eval: discrete index n")
    parser.add_argument("--s", type=float, help="eval: continuous parameter s")
    parser.add_argument("--grid", help="eval: start:stop:step")
    parser.add_argument("--size", type=int, help="gram: matrix size")
    parser.add_argument("--nmax", type=int, help="norms/spectral/boundary: max index")
    parser.add_argument("--mu", type=float, help="parseval/identities: exponent mu")
    parser.add_argument("--nu", type=float, help="identities: exponent nu")
    parser.add_argument("--ncut", type=int, help="parseval: discrete truncation")
    parser.add_argument("--smax", type=float, help="parseval: grid extent")
    parser.add_argument("--step", type=float, help="parseval: grid step")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.config:
        try:
            file_vals = _read_config(args.config)
        except (OSError, DomainError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        defaults = {k: v for k, v in file_vals.items() if hasattr(args, k)}
        cli_given = {a for a in (argv if argv is not None else sys.argv[1:]) if a.startswith("--")}
        for key, val in defaults.items():
            flag = f"--{key}"
            if any(g == flag or g.startswith(flag + "=") for g in cli_given):
                continue
            cur = getattr(args, key)
            caster = type(cur) if cur is not None else str
            if caster is bool:
                setattr(args, key, val.lower() in ("1", "true", "yes"))
            else:
                try:
                    setattr(args, key, (float if key in ("alpha", "beta", "theta", "tol", "mu", "nu", "s", "smax", "step") else caster)(val))
                except ValueError:
                    setattr(args, key, val)

    try:
        params = Params(alpha=args.alpha, beta=args.beta, theta=args.theta)
    except (DomainError, PoleError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2

    cfg = RunConfig(
        command=args.command,
        params=params,
        tol=args.tol,
        fmt=args.format,
        output=args.output,
        plot=args.plot,
        extra={
            "grid": args.grid,
            "n": args.n,
            "s": args.s,
            "psi": args.psi,
            "size": args.size,
            "nmax": args.nmax,
            "mu": args.mu,
            "nu": args.nu,
            "ncut": args.ncut,
            "smax": args.smax,
            "step": args.step,
        },
    )

    try:
        rows, ok = _DISPATCH[cfg.command](cfg)
    except (DomainError, PoleError, StripViolation) as exc:
        print(f"configuration rejected: {exc}", file=sys.stderr)
        return 2
    except NoConvergence as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    _emit(cfg, rows)
    return 0 if ok else 3


if __name__ == "__main__":
    sys.exit(main())
