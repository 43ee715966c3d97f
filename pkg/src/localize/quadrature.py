"""Certified integration of zonal kernels over S^{d-1} and radial kernels over R^{d-1}.

A zonal function integrates as

    int_S K(x . eta) dsigma(x) = omega_{d-1} int_{-1}^{1} K(u) (1 - u^2)^{(d-3)/2} du,

so everything reduces to symmetric Gauss-Jacobi rules. Convergence is
certified by doubling the node count until two consecutive estimates agree.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

from .kernels import Family, ZonalKernel, flat_prefactor
from .special_fn import DomainError, surface_area

log = logging.getLogger(__name__)

RTOL = 1e-11
MAX_NODES = 2**22
NEWTON_MAX_ITER = 100


class QuadratureError(ArithmeticError):
    """Node iteration or integral doubling failed to converge."""


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    newton_converged: bool = True

    @property
    def n(self) -> int:
        return len(self.nodes)

    def integrate(self, f: Callable) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def jacobi_moment(alpha: float) -> float:
    """int_{-1}^{1} (1 - u^2)^alpha du."""
    return math.exp(betaln(0.5, alpha + 1.0))


def _recurrence(n: int, alpha: float) -> np.ndarray:
    """Off-diagonal entries b_1..b_n of the orthonormal three-term recurrence."""
    k = np.arange(1, n + 1, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        beta = k * (k + 2 * alpha) / ((2 * k + 2 * alpha + 1) * (2 * k + 2 * alpha - 1))
    beta[0] = 1.0 / (3.0 + 2.0 * alpha)
    return np.sqrt(beta)


def _orthonormal_eval(x: np.ndarray, n: int, alpha: float, b: np.ndarray):
    """p_n, p_n' and sum_{k<n} p_k^2 at x."""
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(jacobi_moment(alpha)))
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    christoffel = np.zeros_like(x)
    b_prev = 0.0
    for k in range(n):
        christoffel += p * p
        p_next = (x * p - b_prev * p_prev) / b[k]
        dp_next = (p + x * dp - b_prev * dp_prev) / b[k]
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
        b_prev = b[k]
    return p, dp, christoffel


@lru_cache(maxsize=64)
def gauss_jacobi(n: int, alpha: float) -> QuadratureRule:
    """n-point Gauss rule for the weight (1 - u^2)^alpha on [-1, 1].

    Newton iteration on the orthonormal recurrence from asymptotic initial
    guesses; falls back to the eigenvalues of the Jacobi matrix.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not alpha > -1:
        raise DomainError(f"need alpha > -1, got {alpha}")
    alpha = float(alpha)
    b = _recurrence(n, alpha)
    k = np.arange(1, n + 1, dtype=float)
    x = np.cos((k + alpha / 2 - 0.25) * math.pi / (n + alpha + 0.5))[::-1].copy()
    converged = False
    for _ in range(NEWTON_MAX_ITER):
        p, dp, _ = _orthonormal_eval(x, n, alpha, b)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            converged = True
            break
    if converged:
        converged = bool(np.all(np.diff(x) > 0) and x[0] > -1 and x[-1] < 1)
    if not converged:
        log.warning("Newton iteration for %d-point rule (alpha=%g) failed; "
                    "using Jacobi-matrix eigenvalues", n, alpha)
        x = eigh_tridiagonal(np.zeros(n), b[:-1], eigvals_only=True)
        x = np.sort(x)
        if not (np.all(np.diff(x) > 0) and x[0] > -1 and x[-1] < 1):
            raise QuadratureError(f"no valid nodes for n={n}, alpha={alpha}: "
                                  f"min gap {np.min(np.diff(x)) if n > 1 else 0}")
    # enforce the symmetry of the weight
    x = 0.5 * (x - x[::-1])
    _, _, christoffel = _orthonormal_eval(x, n, alpha, b)
    w = 1.0 / christoffel
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, alpha, converged)


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    nodes: int
    previous: float

    @property
    def rel_change(self) -> float:
        return abs(self.value - self.previous) / max(abs(self.value), 1e-300)


def _omega_below(d: int) -> float:
    # measure of S^{d-2}; S^0 is two points
    return 2.0 if d == 2 else surface_area(d - 1)


def zonal_integral_estimate(f: Callable, d: int, eps: float, rtol: float = RTOL,
                            n_start: int | None = None) -> IntegralEstimate:
    """Doubling Gauss-Jacobi integration of a zonal function t -> f(t) over S^{d-1}."""
    alpha = (d - 3) / 2
    n = n_start or max(64, math.ceil(16.0 / eps))
    omega = _omega_below(d)
    prev = omega * gauss_jacobi(n, alpha).integrate(f)
    while 2 * n <= MAX_NODES:
        n *= 2
        cur = omega * gauss_jacobi(n, alpha).integrate(f)
        if abs(cur - prev) <= rtol * abs(cur):
            return IntegralEstimate(cur, n, prev)
        prev = cur
    raise QuadratureError(f"zonal integral did not converge by n={MAX_NODES} (last={prev})")


def zonal_integral(kernel: ZonalKernel) -> float:
    """Integral of a sphere-family kernel over S^{d-1}."""
    p = kernel.params
    if p.family is Family.FLAT:
        raise DomainError("zonal_integral needs a sphere family")
    return zonal_integral_estimate(kernel, p.d, p.eps).value


def _radial_tail(d: int, m: int, eps: float, R: float) -> float:
    """int_R^inf r^{d-2} (r^2 + eps^2)^{-(2m+d-2)/2} dr by its binomial series in (eps/R)^2."""
    p = (2 * m + d - 2) / 2
    x = (eps / R) ** 2
    total = 0.0
    coef = 1.0
    for j in range(200):
        term = coef * x**j * R ** (1 - 2 * m) / (2 * m + 2 * j - 1)
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
        coef *= -(p + j) / (j + 1)
    return total


def flat_integral_estimate(kernel: ZonalKernel, rtol: float = RTOL) -> IntegralEstimate:
    p = kernel.params
    if p.family is not Family.FLAT:
        raise DomainError("flat_integral needs the flat family")
    d, m, eps = p.d, p.m, p.eps
    R = 100.0 * eps
    edges = [0.0, eps]
    while edges[-1] * 2 < R:
        edges.append(edges[-1] * 2)
    edges.append(R)
    edges = np.array(edges)
    # the integrand beyond R is an exact power series, so the tail is added analytically
    scale = kernel.scale * flat_prefactor(p) * eps ** (2 * m - 1)
    tail = scale * _radial_tail(d, m, eps, R)
    omega = _omega_below(d)

    def panels(n):
        rule = gauss_jacobi(n, 0.0)
        lo, hi = edges[:-1, None], edges[1:, None]
        r = 0.5 * (hi - lo) * rule.nodes + 0.5 * (hi + lo)
        vals = kernel.radial(r) * r ** (d - 2)
        return float(np.sum(0.5 * (hi - lo)[:, 0] * (vals @ rule.weights)))

    n = 16
    prev = omega * (panels(n) + tail)
    while 2 * n <= MAX_NODES:
        n *= 2
        cur = omega * (panels(n) + tail)
        if abs(cur - prev) <= rtol * abs(cur):
            return IntegralEstimate(cur, n, prev)
        prev = cur
    raise QuadratureError(f"flat integral did not converge by n={MAX_NODES}")


def flat_integral(kernel: ZonalKernel) -> float:
    """Integral of the flat kernel over R^{d-1}."""
    return flat_integral_estimate(kernel).value


def kernel_integral(kernel: ZonalKernel) -> float:
    if kernel.params.family is Family.FLAT:
        return flat_integral(kernel)
    return zonal_integral(kernel)


def normalize_kernel(kernel: ZonalKernel) -> ZonalKernel:
    """Rescale so the integral over the manifold is one."""
    raw = ZonalKernel(kernel.params)
    integral = kernel_integral(raw)
    if not integral > 0:
        raise NormalizationError(f"kernel integral {integral} is not positive")
    return ZonalKernel(kernel.params, scale=1.0 / integral, normalization=integral)
