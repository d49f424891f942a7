"""Monogenic number fields, totally split primes and tame congruence levels.

A field is given by a monic integer polynomial ``f`` with ``O_K = Z[theta]``
together with trusted invariants (signature, torsion, fundamental units,
class number) read from a JSON fixture.  Cheap invariants are re-checked on
load.

At a totally split odd prime the d roots of ``f`` in Z_p give the d
embeddings ``O_K -> Z_p``, so ``(O_K (x) Z_p)^x`` is ``(Z_p^x)^d``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Sequence

import mpmath

from .linalg import integer_echelon
from .padic import PadicContext, PadicInt

__all__ = [
    "FieldDataError",
    "FieldInvariantError",
    "FixtureSchemaError",
    "FieldElement",
    "GammaU",
    "NumberFieldData",
    "SplitPrimeData",
    "TameLevel",
    "embed",
    "fixture_path",
    "gamma_u",
    "hensel_embeddings",
    "load_field",
    "ray_class_order",
    "residue_unit_count",
    "split_prime_search",
]

FIXTURES = ("q", "q_i", "q_sqrt2", "q_sqrt_m23", "cubic")

# (O_K/m)^x is enumerated element by element
MAX_RESIDUE_RING = 10**6


class FieldDataError(ValueError):
    """A fixture is malformed or fails one of the invariant checks."""


class FixtureSchemaError(FieldDataError):
    """The fixture does not follow the JSON schema."""


class FieldInvariantError(FieldDataError):
    """The fixture parses but one of its stated invariants is false."""


# -- polynomial helpers (coefficient lists, low degree first) ----------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_eval(f: Sequence[int], x: int, mod: int | None = None) -> int:
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
        if mod is not None:
            acc %= mod
    return acc


def _poly_deriv(f: Sequence[int]) -> list[int]:
    return [k * f[k] for k in range(1, len(f))]


def _poly_mulmod_p(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _poly_rem_p(out, f, p)


def _poly_rem_p(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    f = _trim([x % p for x in f])
    inv = pow(f[-1], -1, p)
    df = len(f) - 1
    while len(a) - 1 >= df and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - df
        for k, y in enumerate(f):
            a[shift + k] = (a[shift + k] - c * y) % p
        a = _trim(a)
    return a


def _poly_gcd_p(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, _poly_rem_p(a, b, p)
    return a


def _det(M: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _primes_up_to(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for q in range(2, math.isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q :: q] = bytearray(len(sieve[q * q :: q]))
    return [q for q in range(n + 1) if sieve[q]]


# -- field data --------------------------------------------------------------


@dataclass(frozen=True)
class FieldElement:
    """An element of Z[theta] in the power basis."""

    coords: tuple[int, ...]
    poly: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def _reduce(self, c: list[int]) -> FieldElement:
        f, d = self.poly, self.degree
        c = list(c) + [0] * max(0, d - len(c))
        for k in range(len(c) - 1, d - 1, -1):
            t = c[k]
            if t:
                for j in range(d + 1):
                    c[k - d + j] -= t * f[j]
        return FieldElement(tuple(c[:d]), self.poly)

    def __mul__(self, other: FieldElement) -> FieldElement:
        out = [0] * (2 * self.degree)
        for i, x in enumerate(self.coords):
            if x:
                for j, y in enumerate(other.coords):
                    out[i + j] += x * y
        return self._reduce(out)

    def __add__(self, other: FieldElement) -> FieldElement:
        return FieldElement(tuple(a + b for a, b in zip(self.coords, other.coords)), self.poly)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return FieldElement(tuple(a - b for a, b in zip(self.coords, other.coords)), self.poly)

    def __neg__(self) -> FieldElement:
        return FieldElement(tuple(-a for a in self.coords), self.poly)

    def __pow__(self, e: int) -> FieldElement:
        if e < 0:
            raise ValueError("negative powers are not represented in Z[theta]")
        result = FieldElement.one(self.poly)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mod(self, m: int) -> tuple[int, ...]:
        return tuple(c % m for c in self.coords)

    def is_one(self) -> bool:
        return self.coords[0] == 1 and not any(self.coords[1:])

    @classmethod
    def one(cls, poly: Sequence[int]) -> FieldElement:
        d = len(poly) - 1
        return cls(tuple([1] + [0] * (d - 1)), tuple(poly))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], poly: Sequence[int]) -> FieldElement:
        d = len(poly) - 1
        return cls(tuple([0] * d), tuple(poly))._reduce(list(coeffs))

    def multiplication_matrix(self) -> list[list[int]]:
        d = self.degree
        basis = [FieldElement.from_coeffs([0] * k + [1], self.poly) for k in range(d)]
        cols = [(self * b).coords for b in basis]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def norm(self) -> int:
        return _det(self.multiplication_matrix())

    def to_complex(self, root) -> mpmath.mpc:
        return mpmath.polyval(list(reversed(self.coords)), root)


@dataclass(frozen=True)
class NumberFieldData:
    label: str
    poly: tuple[int, ...]
    r1: int
    r2: int
    torsion_order: int
    torsion_generator: FieldElement
    fundamental_units: tuple[FieldElement, ...]
    class_number: int

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def unit_rank(self) -> int:
        return self.r1 + self.r2 - 1

    def element(self, coeffs: Sequence[int]) -> FieldElement:
        return FieldElement.from_coeffs(coeffs, self.poly)

    @property
    def theta(self) -> FieldElement:
        return self.element([0, 1])

    @property
    def unit_generators(self) -> tuple[FieldElement, ...]:
        """Torsion generator followed by the fundamental units."""
        return (self.torsion_generator, *self.fundamental_units)

    @cached_property
    def discriminant(self) -> int:
        f = list(self.poly)
        d = self.degree
        if d == 1:
            return 1
        fp = _poly_deriv(f)
        # Sylvester matrix of f (deg d) and f' (deg d-1)
        n = 2 * d - 1
        S = []
        hi_f, hi_fp = list(reversed(f)), list(reversed(fp))
        for i in range(d - 1):
            S.append([0] * i + hi_f + [0] * (n - i - len(hi_f)))
        for i in range(d):
            S.append([0] * i + hi_fp + [0] * (n - i - len(hi_fp)))
        res = _det(S)
        return (-1) ** (d * (d - 1) // 2) * res

    @cached_property
    def real_roots(self) -> tuple:
        """Real roots of f in increasing order (real places are indexed by this order)."""
        if self.degree == 1:
            return (mpmath.mpf(-self.poly[0]),)
        with mpmath.workdps(60):
            roots = mpmath.polyroots(list(reversed(self.poly)), maxsteps=200, extraprec=200)
        reals = sorted(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** -30)
        return tuple(reals)

    def real_signs(self, x: FieldElement, places: Sequence[int]) -> tuple[int, ...]:
        """Sign bits (1 for negative) of ``x`` at the selected real places."""
        out = []
        with mpmath.workdps(60):
            for k in places:
                val = x.to_complex(self.real_roots[k])
                if abs(val) < mpmath.mpf(10) ** -40:
                    raise FieldInvariantError(f"cannot certify the sign of {x.coords} at real place {k}")
                out.append(int(val < 0))
        return tuple(out)


def fixture_path(name: str) -> Path:
    """Resolve a fixture given as a path, a path without ``.json``, or a bare name."""
    candidate = Path(name)
    for c in (candidate, candidate.with_name(candidate.name + ".json")):
        if c.is_file():
            return c
    stem = candidate.name.removesuffix(".json")
    res = resources.files("gl1eig") / "fixtures" / f"{stem}.json"
    if res.is_file():
        return Path(str(res))
    raise FileNotFoundError(f"no field fixture named {name!r}")


def _as_int_list(x, what: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in x):
        raise FixtureSchemaError(f"{what} must be a list of integers")
    return x


def load_field(source: str | Path | dict) -> NumberFieldData:
    """Read and validate a field fixture (a path, a fixture name, or a parsed dict)."""
    if isinstance(source, dict):
        raw = source
    else:
        try:
            raw = json.loads(fixture_path(str(source)).read_text())
        except json.JSONDecodeError as exc:
            raise FixtureSchemaError(f"malformed fixture: {exc}") from exc
    if not isinstance(raw, dict):
        raise FixtureSchemaError("schema: fixture must be a JSON object")
    required = ("label", "poly", "r1", "r2", "torsion", "fundamental_units", "class_number")
    missing = [k for k in required if k not in raw]
    if missing:
        raise FixtureSchemaError(f"schema: missing keys {missing}")
    poly = _as_int_list(raw["poly"], "poly")
    if len(poly) < 2 or poly[-1] != 1:
        raise FixtureSchemaError("schema: poly must be monic of degree >= 1")
    d = len(poly) - 1
    r1, r2 = raw["r1"], raw["r2"]
    if not (isinstance(r1, int) and isinstance(r2, int)) or r1 < 0 or r2 < 0:
        raise FixtureSchemaError("schema: r1, r2 must be nonnegative integers")
    if r1 + 2 * r2 != d:
        raise FieldInvariantError(f"signature check failed: r1 + 2 r2 = {r1 + 2 * r2} != degree {d}")
    tors = raw["torsion"]
    if not isinstance(tors, dict) or "order" not in tors or "element" not in tors:
        raise FixtureSchemaError("schema: torsion must have 'order' and 'element'")
    w = tors["order"]
    h = raw["class_number"]
    if not isinstance(h, int) or h < 1:
        raise FixtureSchemaError("schema: class_number must be a positive integer")
    if not isinstance(w, int) or w < 2 or w % 2:
        raise FixtureSchemaError("schema: torsion order must be an even integer >= 2")
    zeta = FieldElement.from_coeffs(_as_int_list(tors["element"], "torsion element"), poly)
    units = [
        FieldElement.from_coeffs(_as_int_list(u, "fundamental unit"), poly) for u in raw["fundamental_units"]
    ]
    K = NumberFieldData(str(raw["label"]), tuple(poly), r1, r2, w, zeta, tuple(units), h)

    if d >= 2:
        a0 = abs(poly[0])
        cands = {0} if a0 == 0 else {s * t for t in range(1, a0 + 1) if a0 % t == 0 for s in (1, -1)}
        for r in cands:
            if _poly_eval(poly, r) == 0:
                raise FieldInvariantError(f"irreducibility check failed: {r} is a rational root of poly")
    if K.discriminant == 0:
        raise FieldInvariantError("irreducibility check failed: poly has a repeated root")
    if len(K.real_roots) != r1:
        raise FieldInvariantError(f"signature check failed: poly has {len(K.real_roots)} real roots, r1 = {r1}")
    if len(units) != K.unit_rank:
        raise FieldInvariantError(f"unit check failed: {len(units)} fundamental units listed, unit rank is {K.unit_rank}")
    for u in units:
        n = u.norm()
        if abs(n) != 1:
            raise FieldInvariantError(f"unit norm check failed: N({list(u.coords)}) = {n}, expected +-1")
    one = FieldElement.one(poly)
    z = one
    for k in range(1, w + 1):
        z = z * zeta
        if z.is_one():
            if k != w:
                raise FieldInvariantError(f"torsion order check failed: element has order {k}, expected {w}")
            break
    else:
        raise FieldInvariantError(f"torsion order check failed: element does not have order {w}")
    return K


# -- split primes and embeddings ---------------------------------------------


def _is_totally_split(K: NumberFieldData, p: int) -> bool:
    f = list(K.poly)
    # x^p mod f over F_p, then gcd(x^p - x, f)
    result, base, e = [1], [0, 1], p
    while e:
        if e & 1:
            result = _poly_mulmod_p(result, base, f, p)
        base = _poly_mulmod_p(base, base, f, p)
        e >>= 1
    diff = list(result) + [0] * max(0, 2 - len(result))
    diff[1] -= 1
    g = _poly_gcd_p(diff, f, p)
    return len(g) - 1 == K.degree


def split_prime_search(K: NumberFieldData, limit: int) -> list[int]:
    """Odd primes ``p <= limit`` with ``p`` not dividing disc(f) and f split into distinct linear factors."""
    if limit < 3:
        raise ValueError("limit must be at least 3")
    disc = K.discriminant
    return [p for p in _primes_up_to(limit) if p > 2 and disc % p and _is_totally_split(K, p)]


@dataclass(frozen=True)
class SplitPrimeData:
    ctx: PadicContext
    roots: tuple[PadicInt, ...]

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def degree(self) -> int:
        return len(self.roots)


def hensel_embeddings(K: NumberFieldData, p: int, N: int) -> SplitPrimeData:
    """Lift the d simple roots of f mod p to roots mod p^N by Newton iteration."""
    ctx = PadicContext(p, N)
    f = list(K.poly)
    if K.discriminant % p == 0:
        raise ValueError(f"p = {p} divides disc(f) = {K.discriminant}")
    roots0 = [r for r in range(p) if _poly_eval(f, r, p) == 0]
    if len(roots0) != K.degree:
        raise ValueError(f"p = {p} is not totally split in {K.label} ({len(roots0)} roots mod p)")
    fp = _poly_deriv(f)
    lifted = []
    for r in roots0:
        if _poly_eval(fp, r, p) == 0:
            raise ValueError(f"repeated root {r} mod {p}")
        prec = 1
        while prec < N:
            prec = min(2 * prec, N)
            q = p**prec
            r = (r - _poly_eval(f, r, q) * pow(_poly_eval(fp, r, q), -1, q)) % q
        lifted.append(PadicInt(ctx, r))
    return SplitPrimeData(ctx, tuple(lifted))


def embed(x: FieldElement, sp: SplitPrimeData) -> list[PadicInt]:
    """``(sigma_1(x), ..., sigma_d(x))`` in Z_p."""
    q = sp.ctx.modulus
    return [PadicInt(sp.ctx, _poly_eval(x.coords, t.residue, q)) for t in sp.roots]


def embed_unit_power(K: NumberFieldData, sp: SplitPrimeData, exponents: Sequence[int]) -> list[PadicInt]:
    """Embedding of ``prod_j gen_j ** e_j`` over the unit generators (negative exponents allowed)."""
    q = sp.ctx.modulus
    out = [1] * sp.degree
    for gen, e in zip(K.unit_generators, exponents):
        if e:
            for i, s in enumerate(embed(gen, sp)):
                out[i] = out[i] * pow(s.residue, e, q) % q
    return [PadicInt(sp.ctx, x) for x in out]


# -- tame level, Gamma(U), ray class order -----------------------------------


@dataclass(frozen=True)
class TameLevel:
    """Rational modulus ``m`` plus the real places where positivity is imposed."""

    m: int = 1
    signs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.m <= 0:
            raise ValueError("modulus m must be a positive integer")
        if len(set(self.signs)) != len(self.signs):
            raise ValueError("repeated sign place")

    def check(self, K: NumberFieldData, p: int | None = None) -> None:
        if any(not 0 <= s < K.r1 for s in self.signs):
            raise ValueError(f"sign places must lie in range({K.r1})")
        if K.degree and self.m ** K.degree > MAX_RESIDUE_RING:
            raise ValueError(f"m^d = {self.m ** K.degree} exceeds the enumeration bound {MAX_RESIDUE_RING}")
        if p is not None and math.gcd(self.m, p) != 1:
            raise ValueError(f"modulus {self.m} is not coprime to p = {p}")


@dataclass(frozen=True)
class GammaU:
    """Gamma(U) as a lattice of exponent vectors over (torsion generator, fundamental units)."""

    generators: tuple[tuple[int, ...], ...]
    index: int


def _unit_images(K: NumberFieldData, U: TameLevel):
    m = U.m
    imgs = []
    for g in K.unit_generators:
        imgs.append((g.mod(m), K.real_signs(g, U.signs)))
    return imgs


def gamma_u(K: NumberFieldData, U: TameLevel, p: int | None = None) -> GammaU:
    """Units that are 1 mod m and positive at the selected real places.

    The image of the unit generators in ``(O_K/m)^x x {+-1}^signs`` is closed
    under multiplication by breadth-first search; the Schreier relations of the
    search tree span the kernel lattice, whose Hermite basis is returned.
    """
    U.check(K, p)
    m = U.m
    k = len(K.unit_generators)
    one_elt = FieldElement.one(K.poly)
    imgs = _unit_images(K, U)

    def mul(a, b):
        x = FieldElement(a[0], K.poly) * FieldElement(b[0], K.poly)
        return (x.mod(m), tuple(s ^ t for s, t in zip(a[1], b[1])))

    start = (one_elt.mod(m), (0,) * len(U.signs))
    reps = {start: (0,) * k}
    relations: list[list[int]] = [[K.torsion_order if j == 0 else 0 for j in range(k)]]
    queue = deque([start])
    while queue:
        g = queue.popleft()
        eg = reps[g]
        for j, x in enumerate(imgs):
            h = mul(g, x)
            eh = tuple(e + (1 if i == j else 0) for i, e in enumerate(eg))
            if h in reps:
                rel = [a - b for a, b in zip(eh, reps[h])]
                if any(rel):
                    relations.append(rel)
            else:
                reps[h] = eh
                queue.append(h)
    basis = integer_echelon(relations, k)
    index = len(reps)
    det = math.prod(basis[i][i] for i in range(k)) if len(basis) == k else 0
    if det != index:
        raise ArithmeticError(f"Gamma(U) lattice index {det} disagrees with image order {index}")
    return GammaU(tuple(tuple(r) for r in basis), index)


def residue_unit_count(K: NumberFieldData, m: int) -> int:
    """``|(O_K/m)^x|`` by enumeration: x is a unit mod m iff gcd(N(x), m) = 1."""
    if m == 1:
        return 1
    d = K.degree
    if m**d > MAX_RESIDUE_RING:
        raise ValueError(f"m^d = {m ** d} exceeds the enumeration bound {MAX_RESIDUE_RING}")
    count = 0
    coords = [0] * d
    while True:
        x = FieldElement(tuple(coords), K.poly)
        if math.gcd(x.norm(), m) == 1:
            count += 1
        i = 0
        while i < d:
            coords[i] += 1
            if coords[i] < m:
                break
            coords[i] = 0
            i += 1
        if i == d:
            return count


def ray_class_order(K: NumberFieldData, U: TameLevel) -> int:
    """``h * |(O_K/m)^x| * 2^|signs| / [O_K^x : Gamma(U)]``."""
    g = gamma_u(K, U)
    num = K.class_number * residue_unit_count(K, U.m) * 2 ** len(U.signs)
    if num % g.index:
        raise FieldInvariantError(f"ray class order {num}/{g.index} is not an integer; inconsistent field data")
    return num // g.index
