"""Exact coefficient families for the localized kernels.

All tables here are built over :class:`fractions.Fraction`; nothing in this
module touches floating point except :func:`eval_q`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .special_fn import DomainError, PolyRational, binom, pochhammer, stirling2


# ---------------------------------------------------------------------------
# ballot numbers
# ---------------------------------------------------------------------------

def ballot(ell: int, m: int) -> int:
    """Ballot number ell (2m-ell-1)! / (m! (m-ell)!), zero for ell > m."""
    if ell < 1:
        raise DomainError(f"ballot needs ell >= 1, got {ell}")
    if m < 1:
        raise DomainError(f"ballot needs m >= 1, got {m}")
    if ell > m:
        return 0
    num = ell * math.factorial(2 * m - ell - 1)
    den = math.factorial(m) * math.factorial(m - ell)
    q, r = divmod(num, den)
    assert r == 0
    return q


@lru_cache(maxsize=None)
def _ballot_row_recursive(m: int) -> tuple:
    # row[k] = alpha_k(m) for k = 0..m+1 (index 0 unused)
    row = [0] * (m + 2)
    row[m] = 1
    if m >= 3:
        prev = _ballot_row_recursive(m - 1)
        for k in range(m - 1, 1, -1):
            row[k] = row[k + 1] + prev[k - 1]
    if m >= 2:
        row[1] = row[2]
    return tuple(row)


def ballot_recursive(ell: int, m: int) -> int:
    """Ballot number from the descending recursion in (m, ell)."""
    if ell < 1:
        raise DomainError(f"ballot needs ell >= 1, got {ell}")
    if m < 1:
        raise DomainError(f"ballot needs m >= 1, got {m}")
    if ell > m:
        return 0
    return _ballot_row_recursive(m)[ell]


def forward_difference(seq, start: int, order: int) -> int:
    """Forward difference sum_k (-1)^(order+k) C(order, k) seq(start + k)."""
    return sum((-1) ** (order + k) * binom(order, k) * seq(start + k) for k in range(order + 1))


# ---------------------------------------------------------------------------
# q-system for the main kernel
# ---------------------------------------------------------------------------

def system_rows(d: int, m: int) -> list:
    """Coefficient matrix of the unitriangular system for q_0..q_m.

    Returns ``rows`` with ``rows[nu][j]`` the PolyRational (in δ) multiplying
    q_j in equation ``nu``; the last row encodes q_m = 1.
    """
    if d < 2 or m < 1:
        raise DomainError(f"need d >= 2 and m >= 1, got d={d}, m={m}")
    half_d = Fraction(d, 2)
    zero = PolyRational()
    rows = [[zero] * (m + 1) for _ in range(m + 1)]
    rows[0][0] = PolyRational.const(1)
    for ell in range(1, m + 1):
        c = pochhammer(half_d, ell - 1) / (2 * math.factorial(ell))
        rows[0][ell] = PolyRational.monomial(ell - 1, c)
    for nu in range(1, m):
        shift = half_d + nu - 1
        for ell in range(0, m - nu + 1):
            entry = PolyRational()
            for k in range(max(ell - nu, 0), ell + 1):
                c = (-1) ** (ell - k) * binom(nu, ell - k) * pochhammer(shift, k) / math.factorial(k)
                entry = entry + PolyRational.monomial(k, c)
            rows[nu][nu + ell] = entry
    rows[m][m] = PolyRational.const(1)
    return rows


def system_rhs(m: int) -> list:
    return [PolyRational()] * m + [PolyRational.const(1)]


@dataclass(frozen=True)
class QSystemSolution:
    d: int
    m: int
    q: tuple

    def alpha(self, ell: int, k: int) -> Fraction:
        """Coefficient of δ^k in q_ell."""
        return self.q[ell].coeff(k)

    def to_json(self) -> str:
        doc = {"d": self.d, "m": self.m, "q": [p.to_pairs() for p in self.q]}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "QSystemSolution":
        doc = json.loads(text)
        q = tuple(PolyRational.from_pairs(p) for p in doc["q"])
        return cls(int(doc["d"]), int(doc["m"]), q)


@lru_cache(maxsize=None)
def solve_q(d: int, m: int) -> QSystemSolution:
    """Back-substitute the unitriangular system with δ kept symbolic."""
    rows = system_rows(d, m)
    q = [PolyRational()] * (m + 1)
    q[m] = PolyRational.const(1)
    for nu in range(m - 1, -1, -1):
        acc = PolyRational()
        for j in range(nu + 1, m + 1):
            if not rows[nu][j].is_zero():
                acc = acc + rows[nu][j] * q[j]
        q[nu] = -acc
    return QSystemSolution(d, m, tuple(q))


def eval_q(sol: QSystemSolution, delta: float) -> list:
    """Float values q_0(δ), ..., q_m(δ)."""
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"δ must lie in [0, 1), got {delta}")
    return [float(p(float(delta))) for p in sol.q]


def center_value_poly(sol: QSystemSolution) -> PolyRational:
    """a^(d-2) times the harmonic extension at the origin, as a polynomial in δ.

    Uses (ell+d-3)! / (ell! (d-2)!) = (d-1)_(ell-1) / ell!, which stays valid at d = 2.
    """
    out = sol.q[0]
    for ell in range(1, sol.m + 1):
        c = pochhammer(sol.d - 1, ell - 1) / math.factorial(ell)
        out = out + sol.q[ell] * PolyRational.monomial(ell - 1, c)
    return out


# ---------------------------------------------------------------------------
# coefficients of the second S^1 kernel
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def coeff_A(k: int, ell: int) -> int:
    """A_{k,ell} = sum_nu (-1)^(nu-ell) C(nu, ell) nu! S(k, nu)."""
    if k < 0 or ell < 0:
        raise DomainError("coeff_A arguments must be nonnegative")
    if ell > k:
        raise DomainError(f"coeff_A needs ell <= k, got k={k}, ell={ell}")
    return sum((-1) ** (nu - ell) * binom(nu, ell) * math.factorial(nu) * stirling2(k, nu)
               for nu in range(ell, k + 1))


def coeff_beta(m: int, k: int) -> Fraction:
    """Rational part r with β_{m,k} = π r."""
    if m < 0 or k < 0:
        raise DomainError("coeff_beta arguments must be nonnegative")
    if k > m:
        raise DomainError(f"coeff_beta needs k <= m, got m={m}, k={k}")
    num = math.factorial(2 * m - k) * 2**k
    den = math.factorial(k) * math.factorial(m - k) * math.factorial(m) * 2 ** (2 * m)
    return Fraction(num, den)


def poly_Q(m: int) -> tuple:
    """Polynomials Q_1(u), ..., Q_m(u) (tuple index 0 holds Q_1)."""
    if m < 1:
        raise DomainError(f"poly_Q needs m >= 1, got {m}")
    out = []
    for ell in range(1, m + 1):
        coeffs = [Fraction(0)] * (m - ell + 1)
        for k in range(ell, m + 1):
            c = Fraction(ell * math.factorial(2 * m - k - 1),
                         math.factorial(m) * math.factorial(m - k))
            coeffs[k - ell] = c * Fraction(coeff_A(k - 1, ell - 1), math.factorial(k - 1))
        out.append(PolyRational(tuple(coeffs), "u"))
    return tuple(out)


@dataclass(frozen=True)
class S1CoefficientSet:
    m: int
    A: tuple      # A[k][ell], 0 <= ell <= k <= m-1
    beta: tuple   # beta[k-1] = rational part of β_{m-1,k-1}, k = 1..m
    Q: tuple      # Q[ell-1] = Q_ell

    def to_json(self) -> str:
        doc = {
            "m": self.m,
            "A": [[str(v) for v in row] for row in self.A],
            "beta": [[str(b.numerator), str(b.denominator)] for b in self.beta],
            "Q": [p.to_pairs() for p in self.Q],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "S1CoefficientSet":
        doc = json.loads(text)
        A = tuple(tuple(int(v) for v in row) for row in doc["A"])
        beta = tuple(Fraction(int(p), int(q)) for p, q in doc["beta"])
        Q = tuple(PolyRational.from_pairs(p, "u") for p in doc["Q"])
        return cls(int(doc["m"]), A, beta, Q)


@lru_cache(maxsize=None)
def s1_coefficients(m: int) -> S1CoefficientSet:
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    A = tuple(tuple(coeff_A(k, ell) for ell in range(k + 1)) for k in range(m))
    beta = tuple(coeff_beta(m - 1, k - 1) for k in range(1, m + 1))
    return S1CoefficientSet(m, A, beta, poly_Q(m))
