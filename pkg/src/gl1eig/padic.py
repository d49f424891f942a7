"""Capped-precision arithmetic in Z_p for odd primes.

Every element is an integer residue modulo ``p**N``.  There is no relative
precision tracking: a value of valuation ``N`` is simply zero.

The logarithm is the Iwasawa branch (``log p`` is irrelevant here since we only
ever feed it units) and kills roots of unity.  Both ``log`` and ``exp`` divide
by ``k`` / ``k!`` over the exact integers before reducing, so the series lose
no digits to modular division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

__all__ = [
    "PadicContext",
    "PadicInt",
    "PrecisionError",
    "exp_p",
    "log_iwasawa",
    "teichmuller",
    "zp_power",
]


class PrecisionError(ArithmeticError):
    """Raised when a computation needs more p-adic digits than are available."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, math.isqrt(n) + 1))


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicContext:
    """The prime ``p`` and the absolute working precision ``N``."""

    p: int
    N: int

    def __post_init__(self) -> None:
        if self.p < 3 or not _is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.N < 8:
            raise ValueError(f"precision N must be at least 8, got {self.N}")

    @cached_property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def loss(self) -> int:
        """Documented digit-loss bound ``ceil(log_p N) + 1`` for log/exp identities."""
        return _ceil_log(self.N, self.p) + 1

    def default_slack(self) -> int:
        return -(-self.N // 4)

    def __call__(self, n: int) -> PadicInt:
        return PadicInt(self, n)

    @cached_property
    def generator(self) -> PadicInt:
        """Topological generator ``1 + p`` of the principal units."""
        return PadicInt(self, 1 + self.p)

    @cached_property
    def log_generator(self) -> PadicInt:
        return log_iwasawa(self.generator)

    @cached_property
    def primitive_root(self) -> int:
        """Smallest primitive root mod ``p``; its Teichmuller lift generates mu_(p-1)."""
        p = self.p
        factors = _prime_factors(p - 1)
        for c in range(2, p):
            if all(pow(c, (p - 1) // q, p) != 1 for q in factors):
                return c
        return 1  # p = 3 is caught above (2 is a primitive root), unreachable

    @cached_property
    def _index_table(self) -> dict[int, int]:
        c, p = self.primitive_root, self.p
        table, y = {}, 1
        for k in range(p - 1):
            table[y] = k
            y = y * c % p
        return table

    def teichmuller_index(self, x: PadicInt | int) -> int:
        """Exponent ``k`` in Z/(p-1) with ``omega(x) = omega(c)**k``, ``c`` the primitive root."""
        r = x.residue if isinstance(x, PadicInt) else x
        r %= self.p
        if r == 0:
            raise ValueError("Teichmuller index of a non-unit")
        return self._index_table[r]


def _ceil_log(n: int, p: int) -> int:
    """Smallest e with p**e >= n."""
    e, q = 0, 1
    while q < n:
        q *= p
        e += 1
    return e


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


class PadicInt:
    """An element of Z_p known modulo ``p**N``.  Immutable."""

    __slots__ = ("ctx", "residue")

    def __init__(self, ctx: PadicContext, value: int) -> None:
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "residue", int(value) % ctx.modulus)

    def __setattr__(self, name, value):
        raise AttributeError("PadicInt is immutable")

    def is_zero(self) -> bool:
        """True when the element is indistinguishable from 0 at precision."""
        return self.residue == 0

    def valuation(self) -> int:
        if self.residue == 0:
            return self.ctx.N
        return vp(self.residue, self.ctx.p)

    def is_unit(self) -> bool:
        return self.residue % self.ctx.p != 0

    def _coerce(self, other) -> PadicInt:
        if isinstance(other, PadicInt):
            if other.ctx != self.ctx:
                raise ValueError(f"context mismatch: {self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, int):
            return PadicInt(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, self.residue + o.residue)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, self.residue - o.residue)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, o.residue - self.residue)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, self.residue * o.residue)

    __rmul__ = __mul__

    def __neg__(self) -> PadicInt:
        return PadicInt(self.ctx, -self.residue)

    def __pow__(self, e: int) -> PadicInt:
        if e < 0:
            return self.invert() ** (-e)
        return PadicInt(self.ctx, pow(self.residue, e, self.ctx.modulus))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.invert()

    def invert(self) -> PadicInt:
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit in Z_{self.ctx.p}")
        return PadicInt(self.ctx, pow(self.residue, -1, self.ctx.modulus))

    def divide_by_p(self, k: int = 1) -> tuple[int, int]:
        """Exact quotient by ``p**k`` as ``(residue, remaining precision)``."""
        q = self.ctx.p**k
        if self.residue % q:
            raise ValueError(f"{self} is not divisible by p^{k}")
        return self.residue // q, self.ctx.N - k

    def lift(self) -> int:
        return self.residue

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.residue == other % self.ctx.modulus
        if isinstance(other, PadicInt):
            return self.ctx == other.ctx and self.residue == other.residue
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, self.residue))

    def __int__(self) -> int:
        return self.residue

    def __repr__(self) -> str:
        return f"PadicInt({self.residue} mod {self.ctx.p}^{self.ctx.N})"

    def congruent(self, other: PadicInt | int, digits: int) -> bool:
        """``self == other`` modulo ``p**digits``."""
        o = self._coerce(other)
        return (self.residue - o.residue) % self.ctx.p**digits == 0


def teichmuller(x: PadicInt) -> PadicInt:
    """The (p-1)-st root of unity congruent to ``x`` mod p."""
    if not x.is_unit():
        raise ValueError("teichmuller() needs a unit")
    q, p = x.ctx.modulus, x.ctx.p
    y = x.residue
    for _ in range(x.ctx.N):
        z = pow(y, p, q)
        if z == y:
            break
        y = z
    return PadicInt(x.ctx, y)


def log_iwasawa(x: PadicInt) -> PadicInt:
    """p-adic logarithm of a unit, via its principal part ``x / omega(x)``.

    Terms ``z**k / k`` are summed while ``k - floor(log_p k) < N``; beyond that
    every term is divisible by ``p**N`` because ``v(z) >= 1``.
    """
    if not x.is_unit():
        raise ValueError("log_iwasawa() needs a unit")
    ctx = x.ctx
    p, q, N = ctx.p, ctx.modulus, ctx.N
    u = x.residue if x.residue % p == 1 else x.residue * pow(teichmuller(x).residue, -1, q) % q
    w = (u - 1) // p  # u - 1 = p*w exactly
    if w == 0:
        return PadicInt(ctx, 0)
    total = 0
    wk = 1
    k = 1
    while k - _floor_log(k, p) < N:
        wk = wk * w % q
        v = vp(k, p)
        unit = k // p**v
        # p^k w^k / k = p^(k - v) w^k / unit
        if k - v < N:
            term = p ** (k - v) * wk * pow(unit, -1, q)
            total += term if k % 2 else -term
        k += 1
    return PadicInt(ctx, total)


def _floor_log(k: int, p: int) -> int:
    e = 0
    while k >= p:
        k //= p
        e += 1
    return e


def _legendre(k: int, p: int) -> int:
    """v_p(k!)."""
    s = 0
    while k:
        k //= p
        s += k
    return s


def exp_p(y: PadicInt) -> PadicInt:
    """p-adic exponential on ``p Z_p``."""
    if y.residue % y.ctx.p:
        raise ValueError("exp_p() needs valuation >= 1")
    ctx = y.ctx
    p, q, N = ctx.p, ctx.modulus, ctx.N
    w = y.residue // p
    total = 1
    wk, kfact_unit = 1, 1
    k = 1
    # v(y^k/k!) >= k - (k-1)/(p-1)
    while (k * (p - 2) + 1) < N * (p - 1):
        wk = wk * w % q
        kv = k
        while kv % p == 0:
            kv //= p
        kfact_unit = kfact_unit * kv % q
        e = k - _legendre(k, p)
        if e < N:
            total += p**e * wk * pow(kfact_unit, -1, q)
        k += 1
    return PadicInt(ctx, total)


def zp_power(x: PadicInt, t: PadicInt | int) -> PadicInt:
    """``x ** t`` for a principal unit ``x`` and a p-adic exponent ``t``."""
    if x.residue % x.ctx.p != 1:
        raise ValueError("zp_power() needs a principal unit (x = 1 mod p)")
    if isinstance(t, int):
        t = PadicInt(x.ctx, t)
    return exp_p(t * log_iwasawa(x))
