"""Verification harness.

Every check returns a :class:`CheckReport`; :func:`run_suite` runs the
default battery (optionally filtered by id prefix) and aggregates it.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.stats import qmc

from . import coefficients as co
from . import kernels as kn
from .quadrature import flat_integral, zonal_integral
from .special_fn import DomainError, PolyRational, surface_area

# ---------------------------------------------------------------------------
# reference data
# ---------------------------------------------------------------------------

#: ballot numbers alpha_ell(m), rows m = 1..10, columns ell = 1..10
TABLE1 = (
    (1, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (1, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 2, 1, 0, 0, 0, 0, 0, 0, 0),
    (5, 5, 3, 1, 0, 0, 0, 0, 0, 0),
    (14, 14, 9, 4, 1, 0, 0, 0, 0, 0),
    (42, 42, 28, 14, 5, 1, 0, 0, 0, 0),
    (132, 132, 90, 48, 20, 6, 1, 0, 0, 0),
    (429, 429, 297, 165, 75, 27, 7, 1, 0, 0),
    (1430, 1430, 1001, 572, 275, 110, 35, 8, 1, 0),
    (4862, 4862, 3432, 2002, 1001, 429, 154, 44, 9, 1),
)

F = Fraction


def reference_q(d: int, m: int) -> list:
    """Hand-derived closed forms of q_0..q_m (coefficient lists in δ) for m <= 4."""
    d = F(d)
    if m == 1:
        return [[F(-1, 2)], [1]]
    if m == 2:
        return [[F(-1, 2), d / 8], [1, -d / 2], [1]]
    if m == 3:
        return [[-1, (d + 2) / 4, -d * (d + 2) / 48],
                [2, -(d + 1), d * (d + 2) / 8],
                [2, -(d + 2) / 2],
                [1]]
    if m == 4:
        return [[F(-5, 2), 5 * (d + 4) / 8, -(d + 2) * (d + 4) / 16, d * (d + 2) * (d + 4) / 384],
                [5, -5 * (d + 2) / 2, (3 * d + 2) * (d + 4) / 8, -d * (d + 2) * (d + 4) / 48],
                [5, -(3 * d + 10) / 2, (d + 2) * (d + 4) / 8],
                [3, -(d + 4) / 2],
                [1]]
    raise ValueError("closed forms are only available for m <= 4")


def reference_center(d: int, m: int) -> list:
    """Closed form of a^(d-2) times the centre value, as coefficients in δ, for m <= 4."""
    d = F(d)
    if m == 1:
        return [F(1, 2)]
    if m == 2:
        return [F(1, 2), (d - 4) / 8]
    if m == 3:
        return [1, (d - 6) / 4, (d - 4) * (d - 6) / 48]
    if m == 4:
        return [F(5, 2), 5 * (d - 8) / 8, (d - 6) * (d - 8) / 16, (d - 4) * (d - 6) * (d - 8) / 384]
    raise ValueError("closed forms are only available for m <= 4")


# ---------------------------------------------------------------------------
# report type
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    id: str
    params: dict
    measured: object
    reference: object
    tol: Optional[float]
    passed: bool
    seconds: Optional[float] = None
    detail: dict = field(default_factory=dict)

    def to_dict(self, timings: bool = True) -> dict:
        return {"id": self.id, "params": self.params, "measured": _jsonable(self.measured),
                "reference": _jsonable(self.reference), "tol": self.tol, "pass": bool(self.passed),
                "seconds": self.seconds if timings else None}

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.id}: measured={_short(self.measured)} reference={_short(self.reference)} tol={self.tol}"


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 6:
        return f"[{len(v)} values]"
    return str(_jsonable(v))


def _timed(fn: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.seconds = time.perf_counter() - t0
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# ---------------------------------------------------------------------------
# sample points
# ---------------------------------------------------------------------------

def sphere_sample(d: int, n: int, eps: float, eta=None) -> np.ndarray:
    """n points on S^{d-1}: half quasi-uniform, half on a geodesic ladder towards eta.

    The ladder rho = eps 2^(k/4) resolves the eps-scale peak that uniform
    points miss in higher dimensions.
    """
    eta = kn.default_eta(d) if eta is None else eta
    n_ladder = n // 2
    rho = np.concatenate([[0.0], np.geomspace(eps / 16, math.pi, n_ladder - 1)])
    ladder = kn.sphere_points(d, np.cos(rho), eta)
    n_uni = n - n_ladder
    if d == 2:
        th = 2 * math.pi * (np.arange(n_uni) + 0.5) / n_uni
        uni = np.stack([np.cos(th), np.sin(th)], axis=-1)
    else:
        from scipy.special import ndtri
        h = qmc.Halton(d=d, scramble=False).random(n_uni + 1)[1:]
        g = ndtri(np.clip(h, 1e-12, 1 - 1e-12))
        uni = g / np.linalg.norm(g, axis=-1, keepdims=True)
    return np.concatenate([ladder, uni])


def disk_sample(k: int, n: int, radius: float) -> np.ndarray:
    """n quasi-uniform points in the k-dimensional ball of the given radius."""
    if k == 1:
        return np.linspace(-radius, radius, n)[:, None]
    pts = []
    h = qmc.Halton(d=k, scramble=False)
    while len(pts) < n:
        for p in 2 * h.random(4 * n) - 1:
            if p @ p <= 1:
                pts.append(p)
                if len(pts) == n:
                    break
    out = radius * np.array(pts)
    out[0] = 0.0
    return out


FLAT_SAMPLE_RADIUS = 8.0


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

@_timed
def regen_table1() -> CheckReport:
    closed = [[co.ballot(ell, m) for ell in range(1, 11)] for m in range(1, 11)]
    recursive = [[co.ballot_recursive(ell, m) for ell in range(1, 11)] for m in range(1, 11)]
    expected = [list(r) for r in TABLE1]
    mismatches = sum(closed[i][j] != expected[i][j] or recursive[i][j] != expected[i][j]
                     for i in range(10) for j in range(10))
    return CheckReport("table1", {"entries": 100}, closed, expected, 0.0, mismatches == 0,
                       detail={"mismatches": mismatches})


@_timed
def check_reference_q(m: int, d_values: Iterable[int] = range(2, 13)) -> CheckReport:
    """Exact comparison of solve_q and the centre value with the closed forms.

    Both sides are polynomials in d of degree <= m-1, so agreement on more
    than m integer values of d is agreement as polynomials in (d, δ).
    """
    bad = []
    d_values = list(d_values)
    for d in d_values:
        sol = co.solve_q(d, m)
        ref = reference_q(d, m)
        for ell in range(m + 1):
            if sol.q[ell] != PolyRational(tuple(ref[ell])):
                bad.append((d, f"q{ell}"))
        if co.center_value_poly(sol) != PolyRational(tuple(reference_center(d, m))):
            bad.append((d, "center"))
    return CheckReport(f"closed_form_q.m={m}", {"m": m, "d": d_values}, len(bad), 0, 0.0, not bad,
                       detail={"mismatches": bad})


@_timed
def check_q_system(d: int, m: int) -> CheckReport:
    """Residual of the solved q's in every row of the triangular system (exact)."""
    sol = co.solve_q(d, m)
    rows = co.system_rows(d, m)
    rhs = co.system_rhs(m)
    nonzero = 0
    for i, row in enumerate(rows):
        acc = PolyRational()
        for j, c in enumerate(row):
            acc = acc + c * sol.q[j]
        nonzero += not (acc - rhs[i]).is_zero()
    return CheckReport(f"q_system.d={d}.m={m}", {"d": d, "m": m}, nonzero, 0, 0.0, nonzero == 0)


def _equivalence_values(family: str, d: int, m: int, eps: float, n_points: int):
    params = kn.KernelParams(d, m, eps, kn.Family(family))
    if params.family is kn.Family.FLAT:
        x = disk_sample(d - 1, n_points, FLAT_SAMPLE_RADIUS * eps)
        closed = kn.flat_closed(params, x)
        expansion = kn.flat_expansion(params, kn.embed_flat(x))
    else:
        eta = kn.default_eta(d)
        x = sphere_sample(d, n_points, eps, eta)
        closed = kn.zonal_closed(params)(np.clip(x @ eta, -1.0, 1.0))
        expansion = kn.expansion_eval(kn.expansion_spec(params), x)
    return closed, expansion


@_timed
def check_equivalence(family: str, d: int, m: int, eps: float, n_points: int = 512,
                      tol: float = 1e-8) -> CheckReport:
    """Closed form against the Newtonian derivative expansion on the manifold."""
    closed, expansion = _equivalence_values(family, d, m, eps, n_points)
    dev = float(np.max(np.abs(closed - expansion) / np.maximum(1.0, np.abs(closed))))
    return CheckReport(f"equivalence.{family}.d={d}.m={m}.eps={eps}",
                       {"family": family, "d": d, "m": m, "eps": eps, "n_points": n_points},
                       dev, 0.0, tol, dev <= tol)


def rho_grid(eps: float) -> np.ndarray:
    k = np.arange(-16, 200)
    g = eps * 2.0 ** (k / 4)
    g = g[g <= math.pi]
    return np.unique(np.concatenate([[0.0], g, [math.pi]]))


def localization_sup(family: str, d: int, m: int, eps: float, exponent: float) -> float:
    """sup over the rho-grid of |K| eps^(d-1) (1 + rho/eps)^exponent."""
    rho = rho_grid(eps)
    if family == "single_derivative":
        vals = kn.single_derivative_zonal(d, m, eps, np.cos(rho))
    elif family == "flat":
        vals = kn.flat_radial(kn.KernelParams(d, m, eps, kn.Family.FLAT), rho)
    else:
        params = kn.KernelParams(d, m, eps, kn.Family(family))
        vals = kn.zonal_closed(params)(np.cos(rho))
    return float(np.max(np.abs(vals) * eps ** (d - 1) * (1 + rho / eps) ** exponent))


def localization_exponent(family: str, d: int, m: int) -> int:
    if family == "colzani":
        return m + d - 1
    if family in ("main", "flat"):
        return 2 * m + d - 2
    if family == "s1_second":
        return 2 * m
    if family == "single_derivative":
        return m + d - 2
    raise ValueError(family)


EPS_LADDER = (0.2, 0.1, 0.05, 0.025)


@_timed
def fit_localization_constant(family: str, d: int, m: int, exponent: Optional[float] = None,
                              eps_list: Sequence[float] = EPS_LADDER) -> CheckReport:
    """Fitted constants c(eps) must agree within a factor 2 across eps."""
    if exponent is None:
        exponent = localization_exponent(family, d, m)
    c = [localization_sup(family, d, m, e, exponent) for e in eps_list]
    ratio = max(c) / min(c)
    return CheckReport(f"localization.{family}.d={d}.m={m}",
                       {"family": family, "d": d, "m": m, "exponent": exponent, "eps": list(eps_list)},
                       ratio, 1.0, 2.0, ratio <= 2.0, detail={"c_hat": c})


@_timed
def check_single_derivative_blowup(d: int, m: int,
                                   eps_list: Sequence[float] = EPS_LADDER) -> CheckReport:
    """A lone m-th derivative must lose a factor ~2^(m-1) per halving of eps."""
    exponent = localization_exponent("single_derivative", d, m)
    c = [localization_sup("single_derivative", d, m, e, exponent) for e in eps_list]
    ratios = [c[i + 1] / c[i] for i in range(len(c) - 1)]
    halving = [eps_list[i] / eps_list[i + 1] for i in range(len(c) - 1)]
    expected = [h ** (m - 1) for h in halving]
    ok = all(e / 2 <= r <= 2 * e for r, e in zip(ratios, expected))
    slope = loglog_slope(eps_list, c)
    return CheckReport(f"negative_control.d={d}.m={m}", {"d": d, "m": m, "eps": list(eps_list)},
                       ratios, expected, 2.0, ok, detail={"c_hat": c, "slope": slope})


@_timed
def check_center_asymptotics(d: int, m: int,
                             eps_list: Sequence[float] = (0.01, 0.005, 0.0025, 0.00125)) -> CheckReport:
    limit = 0.5 * math.factorial(2 * m - 2) / (math.factorial(m) * math.factorial(m - 1))
    errs = []
    for e in eps_list:
        params = kn.KernelParams(d, m, e, kn.Family.MAIN)
        value = kn.expansion_eval(kn.expansion_spec(params), np.zeros(d))
        errs.append(abs(value - limit))
    exact_ok = True
    if m <= 4:
        exact_ok = co.center_value_poly(co.solve_q(d, m)) == PolyRational(tuple(reference_center(d, m)))
    if max(errs) < 1e-13:
        order = math.inf  # the centre value equals its limit identically
    else:
        order = loglog_slope(eps_list, errs)
    return CheckReport(f"center.d={d}.m={m}", {"d": d, "m": m, "eps": list(eps_list)},
                       order, 0.9, None, exact_ok and order >= 0.9,
                       detail={"errors": errs, "exact_match": exact_ok})


def fourier_closed(m: int, eps: float, v: float) -> float:
    s = abs(v) * eps / (2 * math.pi)
    return math.exp(-s) * sum(math.pi * float(co.coeff_beta(m - 1, k - 1)) * s ** (k - 1)
                              for k in range(1, m + 1))


def fourier_numeric(m: int, eps: float, v: float) -> float:
    """2 int_0^inf (1+s^2)^-m cos(b v s) ds after scaling u = b s, b = eps / 2 pi."""
    w = eps / (2 * math.pi) * abs(v)
    f = lambda s: (1.0 + s * s) ** (-m)
    if w == 0:
        val = quad(f, 0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=500)[0]
    else:
        # full_output keeps QAWF from warning about slow cycle convergence for tiny w
        val = quad(f, 0, np.inf, weight="cos", wvar=w, epsabs=1e-13, limlst=200, full_output=1)[0]
    return 2.0 * val


@_timed
def check_fourier_lemma(m: int, eps: float, v_list: Sequence[float] = (0.0, 2 * math.pi, 4 * math.pi),
                        tol: float = 1e-8) -> CheckReport:
    num = [fourier_numeric(m, eps, v) for v in v_list]
    closed = [fourier_closed(m, eps, v) for v in v_list]
    dev = max(abs(a - b) for a, b in zip(num, closed))
    return CheckReport(f"fourier.m={m}.eps={eps}", {"m": m, "eps": eps, "v": list(v_list)},
                       num, closed, tol, dev <= tol, detail={"max_abs_dev": dev})


def fd_deviation(spec: kn.ExpansionSpec, t: float, x: np.ndarray, accuracy: int = 1) -> float:
    cfg = kn.to_point_charges(spec, t, accuracy)
    return float(np.max(np.abs(kn.eval_point_charges(cfg, x) - kn.expansion_eval(spec, x))))


@_timed
def check_fd_reduction(d: int, m: int, eps: float, t_list: Optional[Sequence[float]] = None,
                       accuracy: int = 1, sup_tol: Optional[float] = None) -> CheckReport:
    """Point charges converge to the expansion as the difference step shrinks.

    Passes when the fitted order is >= 0.9 and, if ``sup_tol`` is given, the
    deviation at the smallest step is within it.
    """
    params = kn.KernelParams(d, m, eps, kn.Family.MAIN)
    spec = kn.expansion_spec(params)
    if t_list is None:
        t_list = [eps / 2**k for k in range(7, 11)]
    if any(not 0 < t < eps / m for t in t_list):
        raise DomainError(f"every step must lie in (0, eps/m) = (0, {eps / m:g})")
    x = sphere_sample(d, 512, eps)
    errs = [fd_deviation(spec, t, x, accuracy) for t in t_list]
    order = loglog_slope(t_list, errs)
    ok = order >= 0.9
    if sup_tol is not None:
        ok = ok and errs[-1] <= sup_tol
    radii = [a for a, _ in kn.to_point_charges(spec, min(t_list), accuracy).terms]
    ok = ok and all(a > 1 for a in radii)
    return CheckReport(f"fd.d={d}.m={m}.eps={eps}.p={accuracy}",
                       {"d": d, "m": m, "eps": eps, "t": list(t_list), "accuracy": accuracy},
                       {"order": order, "sup_dev_smallest_t": errs[-1]},
                       {"order_min": 0.9, "sup_tol": sup_tol}, sup_tol, ok,
                       detail={"errors": errs})


def random_config(d: int, n_poles: int, rng: np.random.Generator) -> kn.PointChargeConfig:
    radii = np.sort(rng.uniform(1.05, 3.0, n_poles))[::-1]
    weights = rng.normal(size=n_poles)
    eta = rng.normal(size=d)
    eta /= np.linalg.norm(eta)
    kind = "log" if d == 2 else "power"
    return kn.PointChargeConfig(d, tuple(eta), tuple(zip(radii, weights)), float(rng.normal()), kind)


@_timed
def check_pole_inversion(d: int, config: Optional[kn.PointChargeConfig] = None, seed: int = 0,
                         tol: float = 1e-12) -> CheckReport:
    rng = np.random.default_rng(seed)
    if config is None:
        config = random_config(d, 5, rng)
    x = rng.normal(size=(256, d))
    x /= np.linalg.norm(x, axis=-1, keepdims=True)
    inv = kn.invert_poles(config)
    dev = float(np.max(np.abs(kn.eval_point_charges(config, x) - kn.eval_point_charges(inv, x))))
    back = kn.invert_poles(inv)
    roundtrip = max(
        max(abs(a - b) for (a, _), (b, _) in zip(sorted(config.terms), sorted(back.terms))),
        max(abs(a - b) for (_, a), (_, b) in zip(sorted(config.terms), sorted(back.terms))),
        abs(config.constant - back.constant))
    return CheckReport(f"inversion.d={d}.seed={seed}", {"d": d, "seed": seed, "poles": len(config.terms)},
                       dev, 0.0, tol, dev <= tol and roundtrip <= 1e-13,
                       detail={"roundtrip": roundtrip})


NORMALIZATION_CASES = (
    [("colzani", d, m, e) for d in (2, 3, 4, 5) for m in (1, 2, 3, 4) for e in (1.0, 0.5, 0.1)]
    + [("s1_second", 2, m, e) for m in (1, 2, 3, 4, 5) for e in (0.5, 0.1)]
    + [("main", 3, 1, 1.0)]
    + [("flat", 3, 1, e) for e in (2.0, 1.0, 0.1, 0.01)]
)


def normalization_reference(family: str, d: int, m: int, eps: float):
    if family == "colzani":
        return 1.0, 1e-10
    if family == "s1_second":
        return math.pi * math.factorial(2 * m - 2) / (math.factorial(m - 1) * math.factorial(m)), 1e-9
    if family == "main" and (d, m, eps) == (3, 1, 1.0):
        return math.pi, 1e-10
    if family == "flat" and (d, m) == (3, 1):
        return 2 * math.pi, 1e-9
    raise ValueError("no reference integral for these parameters")


@_timed
def check_normalization(family: str, d: int, m: int, eps: float) -> CheckReport:
    ref, tol = normalization_reference(family, d, m, eps)
    kernel = kn.make_kernel(family, d, m, eps)
    val = flat_integral(kernel) if family == "flat" else zonal_integral(kernel)
    return CheckReport(f"normalization.{family}.d={d}.m={m}.eps={eps}",
                       {"family": family, "d": d, "m": m, "eps": eps}, val, ref, tol,
                       abs(val - ref) <= tol)


@_timed
def check_mean_value(d: int, m: int, eps: float, tol: float = 1e-10) -> CheckReport:
    """Sphere average of the main kernel equals the expansion at the origin."""
    params = kn.KernelParams(d, m, eps, kn.Family.MAIN)
    integral = zonal_integral(kn.ZonalKernel(params))
    avg = integral / surface_area(d)
    centre = kn.expansion_eval(kn.expansion_spec(params), np.zeros(d))
    dev = abs(avg - centre) / max(1.0, abs(centre))
    return CheckReport(f"mean_value.d={d}.m={m}.eps={eps}", {"d": d, "m": m, "eps": eps},
                       avg, centre, tol, dev <= tol)


def discrete_laplacian(f: Callable, x: np.ndarray, h: float) -> np.ndarray:
    d = x.shape[-1]
    acc = -2.0 * d * f(x)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        acc = acc + f(x + e) + f(x - e)
    return acc / (h * h)


@_timed
def check_harmonicity(family: str, d: int, m: int, eps: float, seed: int = 0,
                      h_list: Sequence[float] = (0.08, 0.04, 0.02, 0.01)) -> CheckReport:
    """The (2d+1)-point Laplacian of the expansion decays like h^2."""
    params = kn.KernelParams(d, m, eps, kn.Family(family))
    spec = kn.expansion_spec(params)
    rng = np.random.default_rng(seed)
    if params.family is kn.Family.FLAT:
        x = rng.uniform(-1, 1, size=(32, d)) * eps
        x[:, -1] = np.abs(x[:, -1])  # stay on the side away from the pole
    else:
        x = rng.normal(size=(32, d))
        x *= (rng.uniform(0, 0.6, size=(32, 1)) / np.linalg.norm(x, axis=-1, keepdims=True))
    f = lambda y: kn.expansion_eval(spec, y)
    res = [float(np.max(np.abs(discrete_laplacian(f, x, h)))) for h in h_list]
    order = loglog_slope(h_list, res)
    return CheckReport(f"harmonic.{family}.d={d}.m={m}.eps={eps}",
                       {"family": family, "d": d, "m": m, "eps": eps, "h": list(h_list)},
                       order, 2.0, 0.2, order >= 1.8, detail={"residuals": res})


@_timed
def check_distance_comparability(n: int = 100) -> CheckReport:
    """(eps + rho)/5 <= |x - a eta| <= 2 (eps + rho) for a = 1 + eps, eps <= 1."""
    eps = np.linspace(1e-3, 1.0, n)[:, None]
    rho = np.linspace(0.0, math.pi, n)[None, :]
    a = 1.0 + eps
    dist = np.sqrt(np.sin(rho) ** 2 + (a - np.cos(rho)) ** 2)
    lo = dist / (eps + rho)
    return CheckReport("distance_comparability", {"grid": n * n},
                       [float(lo.min()), float(lo.max())], [0.2, 2.0], None,
                       bool(lo.min() >= 0.2 and lo.max() <= 2.0))


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

def default_checks(seed: int = 0) -> list:
    """(id prefix, thunk) pairs for the full battery."""
    jobs = [("table1", regen_table1)]
    for m in (1, 2, 3, 4):
        jobs.append((f"closed_form_q.m={m}", lambda m=m: check_reference_q(m)))
    for d in range(2, 7):
        for m in range(1, 9):
            jobs.append((f"q_system.d={d}.m={m}", lambda d=d, m=m: check_q_system(d, m)))
    for d in (2, 3, 4, 5):
        for m in range(1, 6):
            for e in (0.5, 0.1, 0.02):
                jobs.append((f"equivalence.main.d={d}.m={m}.eps={e}",
                             lambda d=d, m=m, e=e: check_equivalence("main", d, m, e)))
    for m in range(1, 6):
        for e in (0.5, 0.1):
            jobs.append((f"equivalence.s1_second.d=2.m={m}.eps={e}",
                         lambda m=m, e=e: check_equivalence("s1_second", 2, m, e)))
    for d in (2, 3, 4, 5):
        for m in range(1, 5):
            for e in (1.0, 0.1):
                jobs.append((f"equivalence.flat.d={d}.m={m}.eps={e}",
                             lambda d=d, m=m, e=e: check_equivalence("flat", d, m, e)))
    for fam, d, m, e in NORMALIZATION_CASES:
        jobs.append((f"normalization.{fam}.d={d}.m={m}.eps={e}",
                     lambda fam=fam, d=d, m=m, e=e: check_normalization(fam, d, m, e)))
    for fam in ("colzani", "main", "flat"):
        for d in (2, 3, 4):
            for m in range(1, 5):
                jobs.append((f"localization.{fam}.d={d}.m={m}",
                             lambda fam=fam, d=d, m=m: fit_localization_constant(fam, d, m)))
    for m in range(1, 5):
        jobs.append((f"localization.s1_second.d=2.m={m}",
                     lambda m=m: fit_localization_constant("s1_second", 2, m)))
    for d in (2, 3, 4):
        for m in (2, 3, 4):
            jobs.append((f"negative_control.d={d}.m={m}",
                         lambda d=d, m=m: check_single_derivative_blowup(d, m)))
    for d in (2, 3, 4, 5):
        for m in range(1, 6):
            jobs.append((f"center.d={d}.m={m}", lambda d=d, m=m: check_center_asymptotics(d, m)))
    for m in (1, 2, 3, 4):
        for e in (0.5, 0.1):
            jobs.append((f"fourier.m={m}.eps={e}", lambda m=m, e=e: check_fourier_lemma(m, e)))
    jobs.append(("fd.d=3.m=2.eps=0.5.p=1", lambda: check_fd_reduction(3, 2, 0.5, accuracy=1)))
    jobs.append(("fd.d=3.m=2.eps=0.5.p=3",
                 lambda: check_fd_reduction(3, 2, 0.5, accuracy=3, sup_tol=1e-6)))
    for d in (2, 3, 4):
        for m in (1, 3):
            jobs.append((f"fd.d={d}.m={m}.eps=0.5.p=1",
                         lambda d=d, m=m: check_fd_reduction(d, m, 0.5, accuracy=1)))
    for d in (2, 3, 4, 5):
        jobs.append((f"inversion.d={d}.seed={seed}", lambda d=d: check_pole_inversion(d, seed=seed)))
    for d in (2, 3, 4, 5):
        for m in (1, 2, 3, 4):
            for e in (1.0, 0.5, 0.1):
                jobs.append((f"mean_value.d={d}.m={m}.eps={e}",
                             lambda d=d, m=m, e=e: check_mean_value(d, m, e)))
    for fam, d, m, e in (("main", 2, 3, 0.5), ("main", 3, 2, 0.5), ("main", 4, 3, 0.5),
                         ("main", 5, 2, 0.5), ("s1_second", 2, 3, 0.5), ("flat", 3, 2, 1.0)):
        jobs.append((f"harmonic.{fam}.d={d}.m={m}.eps={e}",
                     lambda fam=fam, d=d, m=m, e=e: check_harmonicity(fam, d, m, e, seed=seed)))
    jobs.append(("distance_comparability", check_distance_comparability))
    return jobs


def thread_count() -> int:
    env = os.environ.get("LOCALIZE_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def run_suite(filter_prefix: Optional[str] = None, seed: int = 0,
              threads: Optional[int] = None) -> list:
    """Run every check whose id starts with ``filter_prefix``; results sorted by id."""
    jobs = [(i, fn) for i, fn in default_checks(seed)
            if not filter_prefix or i.startswith(filter_prefix)]
    threads = threads or thread_count()
    if threads == 1:
        reports = [fn() for _, fn in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda job: job[1](), jobs))
    return sorted(reports, key=lambda r: r.id)


def reports_to_json(reports: Sequence[CheckReport], timings: bool = False) -> str:
    return json.dumps([r.to_dict(timings) for r in reports], indent=1, sort_keys=True)


def all_passed(reports: Sequence[CheckReport]) -> bool:
    return all(r.passed for r in reports)
