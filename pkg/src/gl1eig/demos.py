"""Exact witnesses for the formal/rigid contrast on the open unit disc.

* ``unit_disc_torsion_check``: for ``T = zeta - 1`` with ``zeta`` a primitive
  p^n-th root of unity, ``(1+T)^(p^n) = 1`` holds in Z[zeta] and the truncated
  log series ``sum_{k<=K} (-1)^(k+1) T^k / k`` is p-adically small, as it must
  be when ``log(1+T) = 0``.
* ``formal_density_check``: no nonzero element of Z[G] (G a finite abelian
  p-group) is killed by every character of G.

Everything is exact: Z[zeta_{p^n}] is represented as Z[x] / Phi_{p^n}(x).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .eigenvariety import finite_quotient_order

__all__ = [
    "CyclotomicInt",
    "GroupRingElement",
    "TorsionCheck",
    "character_values",
    "finite_quotient_order",
    "formal_density_check",
    "unit_disc_torsion_check",
]


def _phi(p: int, n: int) -> int:
    return 1 if n == 0 else (p - 1) * p ** (n - 1)


@dataclass(frozen=True)
class CyclotomicInt:
    """Element of Z[x]/Phi_{p^n}(x), coefficients in the basis 1, zeta, ..., zeta^(phi-1)."""

    p: int
    n: int
    coeffs: tuple[int, ...]

    @property
    def phi(self) -> int:
        return _phi(self.p, self.n)

    @classmethod
    def from_poly(cls, p: int, n: int, poly: Sequence[int]) -> CyclotomicInt:
        """Reduce an arbitrary integer polynomial in zeta."""
        return cls(p, n, tuple(_reduce(list(poly), p, n)))

    @classmethod
    def zeta(cls, p: int, n: int) -> CyclotomicInt:
        return cls.from_poly(p, n, [0, 1])

    @classmethod
    def integer(cls, p: int, n: int, c: int) -> CyclotomicInt:
        return cls.from_poly(p, n, [c])

    def _check(self, other: CyclotomicInt) -> None:
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("cyclotomic level mismatch")

    def __add__(self, other: CyclotomicInt) -> CyclotomicInt:
        self._check(other)
        return CyclotomicInt(self.p, self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: CyclotomicInt) -> CyclotomicInt:
        self._check(other)
        return CyclotomicInt(self.p, self.n, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: CyclotomicInt | int) -> CyclotomicInt:
        if isinstance(other, int):
            return CyclotomicInt(self.p, self.n, tuple(a * other for a in self.coeffs))
        self._check(other)
        out = [0] * (2 * self.phi - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return CyclotomicInt.from_poly(self.p, self.n, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CyclotomicInt:
        result = CyclotomicInt.integer(self.p, self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def pi_valuation(self) -> int | None:
        """Valuation at ``pi = zeta - 1`` (None for 0).  ``v(p) = phi`` in these units."""
        if self.is_zero():
            return None
        if self.n == 0:
            return self.phi * _vp(self.coeffs[0], self.p)
        c = list(self.coeffs)
        v = 0
        rq = _p_over_pi(self.p, self.n)
        while sum(c) % self.p == 0:
            # c(x) = (x - 1) Q(x) + c(1), and p / (zeta - 1) = rq(zeta)
            s = sum(c)
            q = [0] * (len(c) - 1)
            acc = 0
            for k in range(len(c) - 1, 0, -1):
                acc += c[k]
                q[k - 1] = acc
            quotient = CyclotomicInt.from_poly(self.p, self.n, q) + rq * (s // self.p)
            c = list(quotient.coeffs)
            v += 1
        return v


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _reduce(poly: list[int], p: int, n: int) -> list[int]:
    phi = _phi(p, n)
    if n == 0:
        return [sum(poly)]
    step = p ** (n - 1)
    c = list(poly) + [0] * max(0, phi - len(poly))
    # zeta^(p^n) = 1 first, then x^((p-1) step) = -sum_{j<p-1} x^(j step)
    M = p**n
    if len(c) > M:
        folded = [0] * M
        for k, a in enumerate(c):
            folded[k % M] += a
        c = folded
    for k in range(len(c) - 1, phi - 1, -1):
        a = c[k]
        if a:
            c[k] = 0
            base = k - phi
            for j in range(p - 1):
                c[base + j * step] -= a
    return c[:phi]


def _p_over_pi(p: int, n: int) -> CyclotomicInt:
    """``p / (zeta - 1)`` in Z[zeta]: minus the quotient of Phi(x) by (x - 1)."""
    step = p ** (n - 1)
    phi_poly = [0] * ((p - 1) * step + 1)
    for j in range(p):
        phi_poly[j * step] = 1
    q = [0] * (len(phi_poly) - 1)
    acc = 0
    for k in range(len(phi_poly) - 1, 0, -1):
        acc += phi_poly[k]
        q[k - 1] = acc
    return CyclotomicInt.from_poly(p, n, [-x for x in q])


@dataclass(frozen=True)
class TorsionCheck:
    p: int
    n: int
    terms: int
    torsion_identity: bool
    valuation: Fraction | None  # None: the truncation is exactly 0
    bound: int

    @property
    def passed(self) -> bool:
        return self.torsion_identity and (self.valuation is None or self.valuation >= self.bound)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "terms": self.terms,
            "torsion_identity": self.torsion_identity,
            "log_truncation_valuation": None if self.valuation is None else str(self.valuation),
            "tail_bound": self.bound,
            "passed": self.passed,
        }


def _ceil_log(k: int, p: int) -> int:
    e, q = 0, 1
    while q < k:
        q *= p
        e += 1
    return e


def unit_disc_torsion_check(p: int, n: int, terms: int) -> TorsionCheck:
    """Check ``(1+T)^(p^n) = 1`` exactly and bound the valuation of the truncated ``log(1+T)``.

    The valuation is normalised so that ``v(p) = 1``; the tail bound is
    ``floor((K+1)/phi(p^n)) - ceil(log_p K)``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    phi = _phi(p, n)
    if terms < phi:
        raise ValueError(f"need at least phi(p^n) = {phi} terms")
    bound = (terms + 1) // phi - _ceil_log(terms, p)
    if bound < 0:
        raise ValueError(f"K = {terms} terms is too small for a nonnegative tail bound at p^n = {p ** n}")
    one = CyclotomicInt.integer(p, n, 1)
    T = CyclotomicInt.zeta(p, n) - one
    identity = (one + T) ** (p**n) == one
    D = math.lcm(*range(1, terms + 1))
    acc = CyclotomicInt.integer(p, n, 0)
    Tk = one
    for k in range(1, terms + 1):
        Tk = Tk * T
        term = Tk * (D // k)
        acc = acc + term if k % 2 else acc - term
    v = acc.pi_valuation()
    val = None if v is None else Fraction(v, phi) - _vp(D, p)
    return TorsionCheck(p, n, terms, identity, val, bound)


@dataclass(frozen=True)
class GroupRingElement:
    """Element of Z[G] for ``G = prod_k Z/p^(e_k)``, coefficients in lexicographic order of G."""

    p: int
    exponents: tuple[int, ...]
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.order:
            raise ValueError(f"expected {self.order} coefficients, got {len(self.coeffs)}")

    @property
    def order(self) -> int:
        return math.prod(self.p**e for e in self.exponents)

    @property
    def group_exponent(self) -> int:
        return self.p ** max(self.exponents, default=0)

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def _elements(p: int, exponents: Sequence[int]) -> np.ndarray:
    orders = [p**e for e in exponents]
    if not orders:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(o) for o in orders], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _pairing(p: int, exponents: Sequence[int]) -> tuple[np.ndarray, int]:
    """Exponent table ``E[chi, g]`` with ``chi(g) = zeta_M^E`` and ``M`` the group exponent."""
    M = p ** max(exponents, default=0)
    els = _elements(p, exponents)
    scale = np.array([M // p**e for e in exponents], dtype=np.int64)
    E = (els * scale) @ els.T % M if len(exponents) else np.zeros((1, 1), dtype=np.int64)
    return E, M


def _reduction_matrix(p: int, M: int) -> np.ndarray:
    """Row r holds the coordinates of ``zeta_M^r`` in the power basis of Z[zeta_M]."""
    n = _vp(M, p) if M > 1 else 0
    phi = _phi(p, n)
    R = np.zeros((M, phi), dtype=np.int64)
    for r in range(M):
        R[r] = CyclotomicInt.from_poly(p, n, [0] * r + [1]).coeffs
    return R


def character_values(x: GroupRingElement) -> list[CyclotomicInt]:
    """``chi(x)`` for every character of G, exactly, in Z[zeta_exp(G)]."""
    p = x.p
    E, M = _pairing(p, x.exponents)
    n = _vp(M, p) if M > 1 else 0
    out = []
    for row in E:
        acc = [0] * M
        for e, a in zip(row, x.coeffs):
            acc[int(e)] += a
        out.append(CyclotomicInt.from_poly(p, n, acc))
    return out


def formal_density_check(
    p: int,
    exponents: Sequence[int],
    trials: int,
    seed: int | None = 0,
    coeff_range: int = 5,
) -> bool:
    """Random nonzero elements of Z[G] are never killed by every character of G.

    Character values are computed exactly: coefficients are binned by the power
    of ``zeta_M`` they carry and the bins are reduced modulo ``Phi_M``.  With
    small integer coefficients these sums fit comfortably in int64.
    """
    exponents = tuple(exponents)
    order = math.prod(p**e for e in exponents)
    if order > 3**6:
        raise ValueError(f"|G| = {order} exceeds the desk bound 3^6")
    E, M = _pairing(p, exponents)
    R = _reduction_matrix(p, M)
    onehot = np.zeros((E.shape[0], E.shape[1], M), dtype=np.int64)
    i, j = np.indices(E.shape)
    onehot[i, j, E] = 1
    rng = random.Random(seed)
    for _ in range(trials):
        coeffs = [0] * order
        while not any(coeffs):
            coeffs = [rng.randint(-coeff_range, coeff_range) for _ in range(order)]
        c = np.array(coeffs, dtype=np.int64)
        binned = np.einsum("cgm,g->cm", onehot, c)
        values = binned @ R
        if not values.any(axis=1).any():
            return False
    return True
