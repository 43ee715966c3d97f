"""Localized zonal kernels on the sphere and on R^{d-1}.

Each family has a closed form (evaluated on the manifold) and an expansion
into directional derivatives of a Newtonian kernel, harmonic off a single
pole. Point-charge configurations turn the derivatives into finite
differences, i.e. into plain sums of shifted Newtonian kernels.

Points are numpy arrays with the coordinate axis last; every evaluator is
vectorized over the leading axes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .coefficients import eval_q, s1_coefficients, solve_q
from .special_fn import (DomainError, PolyRational, binom, chebyshev_t, gegenbauer_c,
                         pochhammer, surface_area)


class SingularityError(ArithmeticError):
    """Evaluation requested at a pole."""


class PoleInsideError(ValueError):
    """A finite-difference step would move a pole onto or across the manifold."""


class Family(str, Enum):
    COLZANI = "colzani"
    MAIN = "main"
    S1_SECOND = "s1_second"
    FLAT = "flat"


SPHERE_FAMILIES = (Family.COLZANI, Family.MAIN, Family.S1_SECOND)


@dataclass(frozen=True)
class KernelParams:
    d: int
    m: int
    eps: float
    family: Family = Family.MAIN

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.d < 2:
            raise DomainError(f"d must be >= 2, got {self.d}")
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if self.family in SPHERE_FAMILIES and self.eps > 1:
            raise DomainError(f"eps must lie in (0, 1] for {self.family.value}, got {self.eps}")
        if self.family is Family.S1_SECOND and self.d != 2:
            raise DomainError("the s1_second family lives on S^1 only (d = 2)")

    @property
    def a(self) -> float:
        """Pole radius: e^eps for s1_second, 1 + eps otherwise."""
        if self.family is Family.S1_SECOND:
            return math.exp(self.eps)
        return 1.0 + self.eps

    @property
    def delta(self) -> float:
        return 1.0 - self.a ** -2


def default_eta(d: int) -> np.ndarray:
    eta = np.zeros(d)
    eta[-1] = 1.0
    return eta


def flat_eta(d: int) -> np.ndarray:
    return -default_eta(d)


def sphere_points(d: int, t, eta: Optional[np.ndarray] = None) -> np.ndarray:
    """Points x on S^{d-1} with x . eta = t, all in the plane of eta and e_1."""
    eta = default_eta(d) if eta is None else np.asarray(eta, dtype=float)
    t = np.asarray(t, dtype=float)
    # unit vector orthogonal to eta
    e = np.zeros(d)
    e[0] = 1.0
    e = e - (e @ eta) * eta
    if np.linalg.norm(e) < 1e-12:
        e = np.zeros(d)
        e[1] = 1.0
        e = e - (e @ eta) * eta
    e /= np.linalg.norm(e)
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    return s[..., None] * e + t[..., None] * eta


def _dist_sq_sphere(a: float, t):
    # |x - a eta|^2 for x on the sphere, written to avoid cancellation near t = 1
    t = np.asarray(t, dtype=float)
    return (a - 1.0) ** 2 + 2.0 * a * (1.0 - t)


# ---------------------------------------------------------------------------
# closed zonal forms
# ---------------------------------------------------------------------------

def poisson_zonal(d: int, a: float, t):
    """Poisson kernel of the ball of radius a, pole a*eta, restricted to the sphere."""
    if not a > 1:
        raise DomainError(f"Poisson pole radius must exceed 1, got {a}")
    return (a * a - 1.0) / (a * surface_area(d)) * _dist_sq_sphere(a, t) ** (-d / 2)


def colzani_zonal(params: KernelParams, t):
    if params.family is not Family.COLZANI:
        raise DomainError("colzani_zonal needs family=colzani")
    d, m, eps = params.d, params.m, params.eps
    out = 0.0
    for j in range(1, m + 1):
        aj = 1.0 + j * eps
        out = out + (-1) ** (j + 1) * binom(m, j) * aj ** (d - 1) * poisson_zonal(d, aj, t)
    return out


def main_prefactor(params: KernelParams) -> float:
    d, m = params.d, params.m
    a, delta = params.a, params.delta
    c = float(pochhammer(math.ldexp(d, -1), m - 1)) / (2.0 * math.factorial(m))
    return c * a ** (2 * m) * delta ** (2 * m - 1)


def main_zonal(params: KernelParams, t):
    if params.family is not Family.MAIN:
        raise DomainError("main_zonal needs family=main")
    d, m = params.d, params.m
    return main_prefactor(params) * _dist_sq_sphere(params.a, t) ** (-d / 2 + 1 - m)


def s1_tail_bound(m: int, eps: float, n_terms: int) -> float:
    """Upper bound for the omitted |n| > N terms of the S^1 series (prefactor included)."""
    s0 = 2.0 * math.pi * n_terms - math.pi
    return (4.0 ** (m - 1) / m) * 2.0 * eps ** (2 * m - 1) * s0 ** (1 - 2 * m) / (2 * m - 1)


S1_TOL = 1e-12
S1_MAX_TERMS = 64


def s1_series(params: KernelParams, rho, tol: float = S1_TOL, n_terms: Optional[int] = None):
    """Periodized S^1 kernel at geodesic distance rho in [0, pi].

    Sums |n| <= N directly. N comes from the integral tail bound; when that
    would exceed ``S1_MAX_TERMS`` the remaining tail is added through its
    convergent expansion in Hurwitz zeta values instead.
    """
    if params.family is not Family.S1_SECOND:
        raise DomainError("s1_series needs family=s1_second")
    m, eps = params.m, params.eps
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < -1e-15) or np.any(rho > math.pi + 1e-12):
        raise DomainError("rho must lie in [0, pi]")
    if n_terms is None:
        n_terms = 1
        while s1_tail_bound(m, eps, n_terms) > tol and n_terms < S1_MAX_TERMS:
            n_terms *= 2
        add_tail = s1_tail_bound(m, eps, n_terms) > tol
    else:
        add_tail = False
    n = np.arange(-n_terms, n_terms + 1, dtype=float)
    s = (rho[..., None] + 2.0 * math.pi * n) / eps
    total = np.sum((1.0 + s * s) ** (-m), axis=-1) / eps
    if add_tail:
        total = total + _s1_tail(m, eps, rho, n_terms)
    out = (4.0 ** (m - 1) / m) * total
    return out if out.ndim else float(out)


def _s1_tail(m: int, eps: float, rho, n_terms: int):
    # sum_{n > N} over both signs of eps^{-1} (1 + ((rho + 2 pi n)/eps)^2)^{-m}
    # = eps^{2m-1} sum_j C(-m, j) eps^{2j} (2 pi)^{-2m-2j} [zeta(2m+2j, N+1 +- rho/2pi)]
    q_plus = n_terms + 1 + rho / (2 * math.pi)
    q_minus = n_terms + 1 - rho / (2 * math.pi)
    ratio = (eps / (2 * math.pi * n_terms)) ** 2
    out = np.zeros_like(rho)
    coef = 1.0
    j = 0
    while True:
        p = 2 * m + 2 * j
        term = coef * eps ** (2 * m - 1 + 2 * j) * (2 * math.pi) ** (-p) * (
            hurwitz_zeta(p, q_plus) + hurwitz_zeta(p, q_minus))
        out = out + term
        if np.max(np.abs(term)) < 1e-18 * max(1.0, float(np.max(np.abs(out)))) or j > 60:
            break
        coef *= -(m + j) / (j + 1)
        j += 1
        if ratio ** j < 1e-20:
            break
    return out


def s1_zonal(params: KernelParams, t):
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    return s1_series(params, np.arccos(t))


def flat_prefactor(params: KernelParams) -> float:
    d, m = params.d, params.m
    return 4.0 ** (m - 1) * float(pochhammer(math.ldexp(d, -1), m - 1)) / math.factorial(m)


def flat_radial(params: KernelParams, r):
    """Flat kernel as a function of |x| for x in R^{d-1}."""
    d, m, eps = params.d, params.m, params.eps
    r = np.asarray(r, dtype=float)
    return flat_prefactor(params) * eps ** (2 * m - 1) * (r * r + eps * eps) ** (-(2 * m + d - 2) / 2)


def flat_closed(params: KernelParams, x):
    """Flat kernel at points x of R^{d-1} (trailing axis of length d-1)."""
    if params.family is not Family.FLAT:
        raise DomainError("flat_closed needs family=flat")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != params.d - 1:
        raise DomainError(f"points must have {params.d - 1} coordinates")
    return flat_radial(params, np.linalg.norm(x, axis=-1))


def zonal_closed(params: KernelParams) -> Callable:
    """Closed-form evaluator t -> K(t) for a sphere family."""
    if params.family is Family.COLZANI:
        return lambda t: colzani_zonal(params, t)
    if params.family is Family.MAIN:
        return lambda t: main_zonal(params, t)
    if params.family is Family.S1_SECOND:
        return lambda t: s1_zonal(params, t)
    raise DomainError("the flat family is not zonal on a sphere")


@dataclass(frozen=True)
class ZonalKernel:
    """A kernel instance; ``scale`` multiplies the raw closed form.

    ``normalization`` is the integral of the raw kernel once known.
    """

    params: KernelParams
    scale: float = 1.0
    normalization: Optional[float] = None

    def __post_init__(self):
        if self.normalization is not None and not self.normalization > 0:
            raise DomainError("normalization must be positive")

    def __call__(self, t):
        """Value at t = x . eta (sphere families)."""
        return self.scale * zonal_closed(self.params)(t)

    def radial(self, r):
        """Value at distance r from the origin of R^{d-1} (flat family)."""
        if self.params.family is not Family.FLAT:
            raise DomainError("radial() is only defined for the flat family")
        return self.scale * flat_radial(self.params, r)

    def at_points(self, x):
        x = np.asarray(x, dtype=float)
        if self.params.family is Family.FLAT:
            return self.scale * flat_closed(self.params, x)
        return self(x @ default_eta(self.params.d))


def make_kernel(family, d: int, m: int, eps: float) -> ZonalKernel:
    return ZonalKernel(KernelParams(d, m, eps, Family(family)))


# ---------------------------------------------------------------------------
# derivative expansions
# ---------------------------------------------------------------------------

def newton_kernel(d: int, x, pole):
    """|x - pole|^{2-d} for d > 2, ln(1/|x - pole|) for d = 2."""
    r = np.linalg.norm(np.asarray(x, dtype=float) - pole, axis=-1)
    if np.any(r == 0):
        raise SingularityError("evaluation at a pole")
    return -np.log(r) if d == 2 else r ** (2.0 - d)


def newton_derivative(d: int, ell: int, x, pole, eta):
    """(eta . grad)^ell of the Newtonian kernel with the given pole, at x.

    Uses the Gegenbauer (d > 2) or Chebyshev (d = 2) closed form of the
    repeated directional derivative.
    """
    x = np.asarray(x, dtype=float)
    diff = np.asarray(pole, dtype=float) - x
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r == 0):
        raise SingularityError("evaluation at a pole")
    if ell == 0:
        return -np.log(r) if d == 2 else r ** (2.0 - d)
    cos_g = np.clip((diff @ eta) / r, -1.0, 1.0)
    if d == 2:
        return math.factorial(ell - 1) * chebyshev_t(ell, cos_g) * r ** (-float(ell))
    return math.factorial(ell) * gegenbauer_c(ell, d / 2 - 1, cos_g) * r ** (2.0 - d - ell)


@dataclass(frozen=True)
class ExpansionSpec:
    """constant + sum_ell weights[ell] (eta . grad)^ell N(x - a eta).

    ``weights[0]`` multiplies the undifferentiated Newtonian kernel. ``boundary``
    is the radius the poles must stay beyond: 1 for the sphere, 0 for the
    flat family (where ``a`` is the distance below the hyperplane).
    """

    params: KernelParams
    eta: tuple
    a: float
    weights: tuple
    constant: float = 0.0
    boundary: float = 1.0

    def __post_init__(self):
        if self.weights[-1] == 0:
            raise DomainError("top-order weight must be nonzero")

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def pole(self) -> np.ndarray:
        return self.a * np.asarray(self.eta)


def main_expansion_spec(params: KernelParams, eta=None) -> ExpansionSpec:
    if params.family is not Family.MAIN:
        raise DomainError("main_expansion_spec needs family=main")
    d, m, a, delta = params.d, params.m, params.a, params.delta
    eta = default_eta(d) if eta is None else np.asarray(eta, dtype=float)
    q = eval_q(solve_q(d, m), delta)
    denom = 1.0 if d == 2 else float(d - 2)
    weights = [0.0 if d == 2 else q[0]]
    for ell in range(1, m + 1):
        weights.append(q[ell] * delta ** (ell - 1) * a**ell / (math.factorial(ell) * denom))
    constant = q[0] if d == 2 else 0.0
    return ExpansionSpec(params, tuple(eta), a, tuple(weights), constant)


def s1_expansion_spec(params: KernelParams, eta=None) -> ExpansionSpec:
    if params.family is not Family.S1_SECOND:
        raise DomainError("s1_expansion_spec needs family=s1_second")
    m, eps, a = params.m, params.eps, params.a
    eta = default_eta(2) if eta is None else np.asarray(eta, dtype=float)
    Q = s1_coefficients(m).Q
    u = 2.0 * eps
    weights = [0.0]
    for ell in range(1, m + 1):
        weights.append(Q[ell - 1](u) * u ** (ell - 1) * a**ell / math.factorial(ell))
    constant = -0.5 * math.factorial(2 * m - 2) / (math.factorial(m) * math.factorial(m - 1))
    return ExpansionSpec(params, tuple(eta), a, tuple(weights), constant)


def flat_expansion_spec(params: KernelParams) -> ExpansionSpec:
    """Expansion in powers of d/dx_d, rewritten along eta = -e_d (d/dx_d = -eta . grad)."""
    if params.family is not Family.FLAT:
        raise DomainError("flat_expansion_spec needs family=flat")
    d, m, eps = params.d, params.m, params.eps
    denom = 1.0 if d == 2 else float(d - 2)
    weights = [0.0]
    for ell in range(1, m + 1):
        c = ((-1) ** ell * 2 ** (ell - 1) * math.factorial(2 * m - ell - 1)
             / (math.factorial(ell - 1) * math.factorial(m) * math.factorial(m - ell) * denom))
        weights.append((-1) ** ell * c * eps ** (ell - 1))
    return ExpansionSpec(params, tuple(flat_eta(d)), eps, tuple(weights), 0.0, boundary=0.0)


def expansion_spec(params: KernelParams) -> ExpansionSpec:
    builders = {Family.MAIN: main_expansion_spec, Family.S1_SECOND: s1_expansion_spec,
                Family.FLAT: flat_expansion_spec}
    if params.family not in builders:
        raise DomainError(f"no single-pole expansion for family {params.family.value}")
    return builders[params.family](params)


def expansion_eval(spec: ExpansionSpec, x):
    """Harmonic expansion at arbitrary points x of R^d (off the pole)."""
    x = np.asarray(x, dtype=float)
    eta = np.asarray(spec.eta)
    pole = spec.pole
    out = spec.constant + np.zeros(x.shape[:-1])
    for ell, w in enumerate(spec.weights):
        if w != 0.0:
            out = out + w * newton_derivative(spec.d, ell, x, pole, eta)
    return out if out.ndim else float(out)


def s1_expansion(params: KernelParams, x):
    return expansion_eval(s1_expansion_spec(params), x)


def flat_expansion(params: KernelParams, x):
    """Flat expansion at points of R^d; embed R^{d-1} points with x_d = 0."""
    return expansion_eval(flat_expansion_spec(params), x)


def embed_flat(x) -> np.ndarray:
    """Append x_d = 0 to points of R^{d-1}."""
    x = np.asarray(x, dtype=float)
    return np.concatenate([x, np.zeros(x.shape[:-1] + (1,))], axis=-1)


def center_value_closed(params: KernelParams) -> float:
    """Expansion of the main family at the origin from the Gegenbauer value at 1."""
    d, m, a, delta = params.d, params.m, params.a, params.delta
    q = eval_q(solve_q(d, m), delta)
    s = q[0]
    for ell in range(1, m + 1):
        s += float(pochhammer(d - 1, ell - 1)) / math.factorial(ell) * q[ell] * delta ** (ell - 1)
    return a ** (2 - d) * s


def single_derivative_zonal(d: int, m: int, eps: float, t):
    """Unit-integral kernel c* (eta . grad)^m N(x - a eta) on the sphere, a = 1 + eps."""
    a = 1.0 + eps
    eta = default_eta(d)
    x = sphere_points(d, t, eta)
    raw = newton_derivative(d, m, x, a * eta, eta)
    # integral equals omega_d times the value at the origin (harmonic in the ball)
    if d == 2:
        integral = surface_area(2) * math.factorial(m - 1) * a ** (-m)
    else:
        integral = surface_area(d) * math.factorial(m) * binom(m + d - 3, m) * a ** (2 - d - m)
    return raw / integral


# ---------------------------------------------------------------------------
# point charges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointChargeConfig:
    """b_0 + sum b_nu N(x - a_nu eta); N is r^{2-d} (kind 'power') or ln(1/r) (kind 'log')."""

    d: int
    eta: tuple
    terms: tuple            # ((a_nu, b_nu), ...)
    constant: float = 0.0
    kind: str = "power"

    def __post_init__(self):
        if self.kind not in ("power", "log"):
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if (self.kind == "log") != (self.d == 2):
            raise DomainError("kind must be 'log' exactly when d = 2")
        object.__setattr__(self, "eta", tuple(float(v) for v in self.eta))
        object.__setattr__(self, "terms", tuple((float(a), float(b)) for a, b in self.terms))

    @property
    def radii(self) -> list:
        return [a for a, _ in self.terms]

    def to_dict(self) -> dict:
        return {"d": self.d, "eta": list(self.eta), "kind": self.kind,
                "constant": self.constant,
                "terms": [{"a": a, "b": b} for a, b in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "PointChargeConfig":
        terms = tuple((float(t["a"]), float(t["b"])) for t in doc["terms"])
        return cls(int(doc["d"]), tuple(doc["eta"]), terms, float(doc["constant"]), doc["kind"])

    @classmethod
    def from_json(cls, text: str) -> "PointChargeConfig":
        return cls.from_dict(json.loads(text))


@lru_cache(maxsize=None)
def one_sided_stencil(ell: int, accuracy: int = 1) -> tuple:
    """Weights c_k, k = 0..ell+accuracy-1, with

        f^(ell)(0) = t^-ell sum_k c_k f(k t) + O(t^accuracy).

    accuracy = 1 gives the plain forward difference (-1)^(ell-k) C(ell, k).
    """
    if ell < 0 or accuracy < 1:
        raise DomainError("need ell >= 0 and accuracy >= 1")
    n = ell + accuracy if ell > 0 else 1
    nodes = range(n)
    out = []
    for k in nodes:
        # Lagrange basis polynomial through the integer nodes
        basis = PolyRational.const(1, "s")
        for j in nodes:
            if j != k:
                basis = basis * PolyRational((Fraction(-j, k - j), Fraction(1, k - j)), "s")
        out.append(basis.coeff(ell) * math.factorial(ell))
    return tuple(out)


def to_point_charges(spec: ExpansionSpec, t: Optional[float] = None,
                     accuracy: int = 1) -> PointChargeConfig:
    """Replace each (eta . grad)^ell by a one-sided difference with shared step t.

    Differences shift x along +eta, i.e. the poles move to (a - k t) eta. With
    ``accuracy`` = p the error is O(t^p) and the configuration has m + p poles
    (m + 1 for the default first-order scheme).
    """
    m = len(spec.weights) - 1
    n_poles = m + accuracy
    if t is None:
        t = (spec.a - spec.boundary) / (4 * (n_poles - 1))
    if not t > 0:
        raise DomainError(f"step must be positive, got {t}")
    if spec.a - (n_poles - 1) * t <= spec.boundary:
        raise PoleInsideError(
            f"step t={t} moves pole {spec.a - (n_poles - 1) * t} past the boundary {spec.boundary}")
    charge = np.zeros(n_poles)
    for ell, w in enumerate(spec.weights):
        if w == 0.0:
            continue
        for k, c in enumerate(one_sided_stencil(ell, accuracy)):
            charge[k] += w * float(c) * t ** (-ell)
    terms = tuple((spec.a - k * t, float(charge[k])) for k in range(n_poles))
    kind = "log" if spec.d == 2 else "power"
    return PointChargeConfig(spec.d, spec.eta, terms, spec.constant, kind)


def eval_point_charges(config: PointChargeConfig, x):
    x = np.asarray(x, dtype=float)
    eta = np.asarray(config.eta)
    out = config.constant + np.zeros(x.shape[:-1])
    for a, b in config.terms:
        out = out + b * newton_kernel(config.d, x, a * eta)
    return out if out.ndim else float(out)


def invert_poles(config: PointChargeConfig) -> PointChargeConfig:
    """Reflect every pole a -> 1/a keeping the trace on the unit sphere."""
    radii = config.radii
    if any(a == 1.0 for a in radii):
        raise DomainError("a pole on the unit sphere cannot be inverted")
    if radii and not (all(a > 1 for a in radii) or all(0 < a < 1 for a in radii)):
        raise DomainError("poles must be all outside or all inside the unit ball")
    terms = []
    constant = config.constant
    for a, b in config.terms:
        if config.d == 2:
            terms.append((1.0 / a, b))
            constant += b * math.log(1.0 / a)
        else:
            terms.append((1.0 / a, b * a ** (2 - config.d)))
    terms.sort(key=lambda term: -term[0])
    return PointChargeConfig(config.d, config.eta, tuple(terms), constant, config.kind)
