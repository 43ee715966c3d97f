"""Command-line front end: ``localize {coeffs,sample,charges,verify,integrate}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import coefficients as co
from . import kernels as kn
from . import quadrature as qd
from . import verify as vf
from .special_fn import DomainError

FORMATS = {
    "coeffs": ("text", "json"),
    "sample": ("csv", "json"),
    "charges": ("json",),
    "verify": ("json",),
    "integrate": ("json", "text"),
}


def _float17(x: float) -> str:
    return format(float(x), ".17g")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="localize", description="Localized Newtonian-kernel toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, family=True, eps=True):
        sp.add_argument("--d", type=int, default=3, help="ambient dimension (default 3)")
        sp.add_argument("--m", type=int, default=2, help="order (default 2)")
        if eps:
            sp.add_argument("--eps", type=float, default=0.1, help="scale parameter (default 0.1)")
        if family:
            sp.add_argument("--family", default="main", choices=[f.value for f in kn.Family])
        sp.add_argument("--format", default=None)
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("coeffs", help="exact coefficient tables")
    common(sp, family=False, eps=False)
    sp.add_argument("--delta", type=float, default=None, help="also evaluate the q's at this δ")

    sp = sub.add_parser("sample", help="kernel values on a rho grid")
    common(sp)
    sp.add_argument("--n", type=int, default=256, help="number of rows")

    sp = sub.add_parser("charges", help="point-charge configuration for the main kernel")
    common(sp, family=False)
    sp.add_argument("--t", type=float, default=None, help="difference step (default (a-1)/(4 m))")
    sp.add_argument("--accuracy", type=int, default=1, help="order of the one-sided differences")

    sp = sub.add_parser("verify", help="run the verification suite")
    sp.add_argument("--filter", default=None, help="only checks whose id starts with this")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--timings", action="store_true", help="record wall-clock seconds per check")

    sp = sub.add_parser("integrate", help="integral of a kernel over its manifold")
    common(sp)
    sp.add_argument("--tol", type=float, default=qd.RTOL, help="relative doubling tolerance")
    return p


def validate(args, parser: argparse.ArgumentParser) -> Optional[kn.KernelParams]:
    """Check every precondition up front; usage errors exit with status 2."""
    fmt = args.format or FORMATS[args.command][0]
    if fmt not in FORMATS[args.command]:
        parser.error(f"--format {fmt} is not available for {args.command} "
                     f"(choose from {', '.join(FORMATS[args.command])})")
    args.format = fmt
    if args.command == "verify":
        return None
    if args.d < 2:
        parser.error(f"--d must be >= 2, got {args.d}")
    if args.m < 1:
        parser.error(f"--m must be >= 1, got {args.m}")
    if args.command == "coeffs":
        if args.delta is not None and not 0.0 <= args.delta < 1.0:
            parser.error(f"--delta must lie in [0, 1), got {args.delta}")
        return None
    if not math.isfinite(args.eps):
        parser.error("--eps must be finite")
    family = getattr(args, "family", "main")
    try:
        params = kn.KernelParams(args.d, args.m, args.eps, kn.Family(family))
    except DomainError as exc:
        parser.error(str(exc))
    if args.command == "sample" and args.n < 2:
        parser.error(f"--n must be >= 2, got {args.n}")
    if args.command == "charges":
        if args.accuracy < 1:
            parser.error("--accuracy must be >= 1")
        if args.t is not None:
            if not 0 < args.t < args.eps / args.m:
                parser.error(f"--t must lie in (0, eps/m) = (0, {args.eps / args.m:g}), got {args.t}")
            if params.a - (args.m + args.accuracy - 1) * args.t <= 1.0:
                parser.error("--t is too large for this --accuracy: a pole would reach the sphere")
    if args.command == "integrate" and not 0 < args.tol < 1:
        parser.error(f"--tol must lie in (0, 1), got {args.tol}")
    return params


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        sys.stderr.write(f"localize: cannot write {out}: {exc.strerror}\n")
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_coeffs(d: int, m: int, delta: Optional[float] = None, fmt: str = "text") -> str:
    sol = co.solve_q(d, m)
    s1 = co.s1_coefficients(m) if d == 2 else None
    if fmt == "json":
        doc = json.loads(sol.to_json())
        if delta is not None:
            doc["delta"] = delta
            doc["values"] = co.eval_q(sol, delta)
        if s1 is not None:
            doc["s1"] = json.loads(s1.to_json())
        return json.dumps(doc, indent=1)
    lines = [f"d = {d}, m = {m}"]
    lines += [f"q_{ell} = {p}" for ell, p in enumerate(sol.q)]
    lines.append(f"a^(d-2) F(a eta, 0) = {co.center_value_poly(sol)}")
    if delta is not None:
        vals = ", ".join(repr(v) for v in co.eval_q(sol, delta))
        lines.append(f"q(δ={delta!r}) = ({vals})")
    if s1 is not None:
        lines += [f"Q_{ell} = {p}" for ell, p in enumerate(s1.Q, start=1)]
        for k, row in enumerate(s1.A):
            lines.append(f"A_{k},* = " + " ".join(str(v) for v in row))
        for k, b in enumerate(s1.beta, start=1):
            lines.append(f"beta_{m - 1},{k - 1} = ({b}) pi")
    return "\n".join(lines) + "\n"


def sample_grid(params: kn.KernelParams, n: int) -> np.ndarray:
    """n distinct radii: geometric near the peak, uniform further out, rho = 0 included."""
    hi = 50.0 * params.eps if params.family is kn.Family.FLAT else math.pi
    n_geo = n // 2
    geo = np.geomspace(params.eps / 16, hi, n_geo + 1)[:-1] if n_geo else np.empty(0)
    uni = np.linspace(0.0, hi, n - n_geo)
    return np.sort(np.concatenate([geo, uni]))


def cmd_sample(params: kn.KernelParams, n: int, fmt: str = "csv") -> str:
    rho = sample_grid(params, n)
    kernel = kn.ZonalKernel(params)
    if params.family is kn.Family.FLAT:
        t = np.full_like(rho, np.nan)
        theta = np.full_like(rho, np.nan)
        raw = kernel.radial(rho)
    else:
        t = np.cos(rho)
        theta = np.degrees(rho)
        raw = kernel(t)
    norm = qd.normalize_kernel(kernel).normalization
    rows = [(th, r, tt, v, v / norm) for th, r, tt, v in zip(theta, rho, t, raw)]
    if fmt == "json":
        return json.dumps({"params": _params_dict(params), "integral": norm,
                           "rows": [dict(zip(("theta", "rho", "t", "value", "normalized"),
                                             [None if math.isnan(x) else float(x) for x in row]))
                                    for row in rows]}, indent=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "rho", "t", "value", "normalized"])
    for row in rows:
        w.writerow(["" if math.isnan(x) else _float17(x) for x in row])
    return buf.getvalue()


def _params_dict(params: kn.KernelParams) -> dict:
    return {"family": params.family.value, "d": params.d, "m": params.m, "eps": params.eps}


def cmd_charges(params: kn.KernelParams, t: Optional[float] = None, accuracy: int = 1) -> str:
    spec = kn.expansion_spec(params)
    cfg = kn.to_point_charges(spec, t, accuracy)
    x = vf.sphere_sample(params.d, 512, params.eps)
    exact = kn.zonal_closed(params)(np.clip(x @ kn.default_eta(params.d), -1.0, 1.0))
    dev = float(np.max(np.abs(kn.eval_point_charges(cfg, x) - exact)))
    doc = cfg.to_dict()
    doc["t"] = cfg.terms[0][0] - cfg.terms[1][0] if len(cfg.terms) > 1 else t
    doc["accuracy"] = accuracy
    doc["sup_deviation"] = dev
    doc["params"] = _params_dict(params)
    return json.dumps(doc, indent=1)


def cmd_verify(filter_prefix: Optional[str] = None, seed: int = 0, timings: bool = False):
    reports = vf.run_suite(filter_prefix, seed)
    return vf.reports_to_json(reports, timings), reports


def cmd_integrate(params: kn.KernelParams, tol: float = qd.RTOL, fmt: str = "json") -> str:
    kernel = kn.ZonalKernel(params)
    if params.family is kn.Family.FLAT:
        est = qd.flat_integral_estimate(kernel, rtol=tol)
    else:
        est = qd.zonal_integral_estimate(kernel, params.d, params.eps, rtol=tol)
    if fmt == "text":
        return f"{_float17(est.value)}\n"
    return json.dumps({"params": _params_dict(params), "integral": est.value,
                       "nodes": est.nodes, "rel_change": est.rel_change}, indent=1)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = validate(args, parser)
    if args.command == "coeffs":
        _emit(cmd_coeffs(args.d, args.m, args.delta, args.format), args.out)
    elif args.command == "sample":
        _emit(cmd_sample(params, args.n, args.format), args.out)
    elif args.command == "charges":
        _emit(cmd_charges(params, args.t, args.accuracy), args.out)
    elif args.command == "integrate":
        _emit(cmd_integrate(params, args.tol, args.format), args.out)
    elif args.command == "verify":
        text, reports = cmd_verify(args.filter, args.seed, args.timings)
        if not reports:
            sys.stderr.write(f"localize: no check id starts with {args.filter!r}\n")
            return 1
        _emit(text, args.out)
        failed = [r for r in reports if not r.passed]
        sys.stderr.write(f"{len(reports) - len(failed)}/{len(reports)} checks passed\n")
        for r in failed:
            sys.stderr.write(r.line() + "\n")
        return 1 if failed else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
