"""Exact and floating-point special-function primitives.

Exact quantities (Pochhammer symbols, Stirling numbers, polynomial
coefficients) live in :class:`fractions.Fraction`; floats only appear in the
polynomial evaluators that kernels call at evaluation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np



class DomainError(ValueError):
    """An argument lies outside the domain of a primitive."""


def as_fraction(x) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: every exact table must be built from exact inputs.
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a rational number")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def pochhammer(u, k: int):
    """Rising factorial (u)_k = u (u+1) ... (u+k-1), with (u)_0 = 1.

    Exact when ``u`` is an int or Fraction, float otherwise.
    """
    if k < 0:
        raise DomainError(f"pochhammer needs k >= 0, got {k}")
    if isinstance(u, float):
        out = 1.0
    else:
        u = as_fraction(u)
        out = Fraction(1)
    for i in range(k):
        out *= u + i
    return out


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def stirling2(k: int, nu: int) -> int:
    """Stirling number of the second kind S(k, nu).

    Defined through u^k = sum_nu S(k, nu) u(u-1)...(u-nu+1).
    """
    if k < 0 or nu < 0:
        raise DomainError("stirling2 arguments must be nonnegative")
    if nu > k:
        raise DomainError(f"stirling2 needs nu <= k, got k={k}, nu={nu}")
    if k == 0:
        return 1
    if nu == 0:
        return 0
    if nu == k:
        return 1
    return nu * stirling2(k - 1, nu) + stirling2(k - 1, nu - 1)


def _gamma_half_integer(d: int) -> float:
    """Gamma(d/2) for an integer d >= 1 via closed forms."""
    if d % 2 == 0:
        return float(math.factorial(d // 2 - 1))
    # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
    n = (d - 1) // 2
    return math.factorial(2 * n) / (4**n * math.factorial(n)) * math.sqrt(math.pi)


def surface_area(d: int) -> float:
    """Measure omega_d = 2 pi^(d/2) / Gamma(d/2) of the unit sphere in R^d."""
    if d < 2:
        raise DomainError(f"surface_area needs d >= 2, got {d}")
    return 2.0 * math.pi ** (d / 2) / _gamma_half_integer(d)


def gegenbauer_c(ell: int, mu, t):
    """Gegenbauer polynomial C_ell^(mu)(t) by the three-term recurrence.

    ``t`` may be a scalar or a numpy array.
    """
    if ell < 0:
        raise DomainError(f"degree must be nonnegative, got {ell}")
    mu = float(mu)
    if mu <= 0:
        raise DomainError(f"gegenbauer_c needs mu > 0, got {mu}")
    t = np.asarray(t, dtype=float)
    c_prev = np.ones_like(t)
    if ell == 0:
        return c_prev if c_prev.ndim else float(c_prev)
    c = 2.0 * mu * t
    for n in range(2, ell + 1):
        c, c_prev = (2.0 * t * (n + mu - 1.0) * c - (n + 2.0 * mu - 2.0) * c_prev) / n, c
    return c if c.ndim else float(c)


def gegenbauer_c_explicit(ell: int, mu, t):
    """Explicit finite sum for C_ell^(mu)(t); cross-check only (cancels for large ell)."""
    t = np.asarray(t, dtype=float)
    mu_f = float(mu)
    total = np.zeros_like(t)
    for s in range(ell // 2 + 1):
        coef = (-1) ** s * float(pochhammer(mu_f, ell - s)) / (
            math.factorial(s) * math.factorial(ell - 2 * s))
        total = total + coef * (2.0 * t) ** (ell - 2 * s)
    return total if total.ndim else float(total)


def chebyshev_t(ell: int, t):
    """Chebyshev polynomial of the first kind T_ell(t) by recurrence."""
    if ell < 0:
        raise DomainError(f"degree must be nonnegative, got {ell}")
    t = np.asarray(t, dtype=float)
    c_prev = np.ones_like(t)
    if ell == 0:
        return c_prev if c_prev.ndim else float(c_prev)
    c = t.copy()
    for _ in range(2, ell + 1):
        c, c_prev = 2.0 * t * c - c_prev, c
    return c if c.ndim else float(c)


def chebyshev_t_explicit(ell: int, t):
    t = np.asarray(t, dtype=float)
    if ell == 0:
        out = np.ones_like(t)
    else:
        out = np.zeros_like(t)
        for s in range(ell // 2 + 1):
            coef = (-1) ** s * math.factorial(ell - s - 1) / (
                math.factorial(s) * math.factorial(ell - 2 * s))
            out = out + coef * (2.0 * t) ** (ell - 2 * s)
        out = out * (ell / 2.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PolyRational:
    """Univariate polynomial with exact rational coefficients (ascending degree)."""

    coeffs: tuple = ()
    var: str = "δ"

    def __post_init__(self):
        cs = [as_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def const(cls, c, var: str = "δ") -> "PolyRational":
        return cls((c,), var)

    @classmethod
    def monomial(cls, k: int, c=1, var: str = "δ") -> "PolyRational":
        return cls((0,) * k + (c,), var)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def _lift(self, other) -> "PolyRational":
        if isinstance(other, PolyRational):
            return other
        return PolyRational.const(other, self.var)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyRational(tuple(self.coeff(k) + other.coeff(k) for k in range(n)), self.var)

    __radd__ = __add__

    def __neg__(self):
        return PolyRational(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return PolyRational((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyRational(tuple(out), self.var)

    __rmul__ = __mul__

    def __call__(self, x):
        """Horner evaluation; exact for rational ``x``, float otherwise."""
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc if acc.ndim else float(acc)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                pw = self.var if k == 1 else f"{self.var}^{k}"
                body = pw if mag == 1 else f"({mag}){pw}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_pairs(self) -> list:
        """Coefficients as [numerator, denominator] decimal-string pairs."""
        return [[str(c.numerator), str(c.denominator)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[str]], var: str = "δ") -> "PolyRational":
        return cls(tuple(Fraction(int(p), int(q)) for p, q in pairs), var)
