"""Continuous characters of (Z_p^x)^d and their classification.

A weight is pinned down coordinatewise by two pieces of data: an exponent
``a_i`` in Z/(p-1) saying how the Teichmuller part is acted on, and the image
``phi_i`` of the topological generator ``g = 1 + p`` of the principal units.
Values live in the symbolic group ``mu_infinity x (1 + p Z_p)``: a root of unity
is carried as its exponent in Q/Z, so finite-order twists never force us into
a ramified extension of Q_p.

The (p-1)-st roots of unity are normalised against the Teichmuller lift of the
smallest primitive root ``c`` mod p, i.e. ``zeta_exp = k/(p-1)`` stands for
``omega(c)**k``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import integer_reconstruct
from .padic import PadicContext, PadicInt, PrecisionError, log_iwasawa, teichmuller, zp_power

__all__ = [
    "CharValue",
    "Classification",
    "Kind",
    "NormOneBasis",
    "Weight",
    "algebraic_weight",
    "classify",
    "conductor",
    "eval_weight",
    "finite_weight",
    "is_locally_parallel",
    "is_parallel",
    "is_trivial_on",
    "norm_one_basis",
    "norm_power",
    "principal_exponent",
    "rigid_locus_values",
]


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class CharValue:
    """A character value ``zeta * u``: root of unity ``exp(2 pi i zeta_exp)`` times a principal unit."""

    zeta_exp: Fraction
    principal: PadicInt

    def __post_init__(self) -> None:
        z = Fraction(self.zeta_exp) % 1
        object.__setattr__(self, "zeta_exp", z)
        p = self.principal.ctx.p
        if self.principal.residue % p != 1:
            raise ValueError("principal part must be 1 mod p")
        core = z.denominator
        while core % p == 0:
            core //= p
        if (p - 1) % core:
            raise ValueError(f"root-of-unity order {z.denominator} is outside mu_(p^k (p-1))")

    @classmethod
    def one(cls, ctx: PadicContext) -> CharValue:
        return cls(Fraction(0), PadicInt(ctx, 1))

    def __mul__(self, other: CharValue) -> CharValue:
        return CharValue(self.zeta_exp + other.zeta_exp, self.principal * other.principal)

    def inverse(self) -> CharValue:
        return CharValue(-self.zeta_exp, self.principal.invert())

    def __truediv__(self, other: CharValue) -> CharValue:
        return self * other.inverse()

    def __pow__(self, e: int) -> CharValue:
        return CharValue(self.zeta_exp * e, self.principal**e)

    def is_one(self, digits: int | None = None) -> bool:
        if self.zeta_exp:
            return False
        if digits is None:
            return self.principal.residue == 1
        return self.principal.congruent(1, digits)

    def log(self) -> PadicInt:
        """The root-of-unity part is killed."""
        return log_iwasawa(self.principal)

    def to_padic(self) -> PadicInt:
        """Value in Z_p, available when the root of unity has order dividing p - 1."""
        ctx = self.principal.ctx
        p = ctx.p
        k = self.zeta_exp * (p - 1)
        if k.denominator != 1:
            raise ValueError(f"root of unity of order {self.zeta_exp.denominator} is not in Z_p")
        omega = teichmuller(PadicInt(ctx, ctx.primitive_root))
        return omega ** int(k) * self.principal

    def __repr__(self) -> str:
        return f"CharValue(zeta^{self.zeta_exp}, {self.principal.residue})"


@dataclass(frozen=True)
class Weight:
    """A continuous character of ``(Z_p^x)^d``."""

    ctx: PadicContext
    a: tuple[int, ...]
    phi: tuple[CharValue, ...]

    def __post_init__(self) -> None:
        p = self.ctx.p
        object.__setattr__(self, "a", tuple(int(x) % (p - 1) for x in self.a))
        object.__setattr__(self, "phi", tuple(self.phi))
        if len(self.a) != len(self.phi):
            raise ValueError("a and phi must have the same length")
        for v in self.phi:
            if v.principal.ctx != self.ctx:
                raise ValueError("context mismatch")
            if not _is_p_power(v.zeta_exp.denominator, p):
                # g lies in a pro-p group, so continuity forces p-power order
                raise ValueError("the image of 1+p may only carry a p-power root of unity")

    @property
    def d(self) -> int:
        return len(self.a)

    def __mul__(self, other: Weight) -> Weight:
        return Weight(self.ctx, tuple(x + y for x, y in zip(self.a, other.a)), tuple(x * y for x, y in zip(self.phi, other.phi)))

    def inverse(self) -> Weight:
        return Weight(self.ctx, tuple(-x for x in self.a), tuple(v.inverse() for v in self.phi))

    def __truediv__(self, other: Weight) -> Weight:
        return self * other.inverse()

    def is_trivial(self) -> bool:
        return not any(self.a) and all(v.is_one() for v in self.phi)

    def has_finite_order(self, digits: int | None = None) -> bool:
        return all(v.principal.congruent(1, digits or self.ctx.N) for v in self.phi)

    def to_dict(self) -> dict:
        return {
            "p": self.ctx.p,
            "N": self.ctx.N,
            "d": self.d,
            "coords": [
                {
                    "a": a,
                    "zeta_num": v.zeta_exp.numerator,
                    "zeta_den": v.zeta_exp.denominator,
                    "principal": v.principal.residue,
                }
                for a, v in zip(self.a, self.phi)
            ],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> Weight:
        ctx = PadicContext(int(raw["p"]), int(raw["N"]))
        coords = raw["coords"]
        if len(coords) != int(raw["d"]):
            raise ValueError(f"weight has d = {raw['d']} but {len(coords)} coordinates")
        a = [int(c["a"]) for c in coords]
        phi = [CharValue(Fraction(int(c["zeta_num"]), int(c["zeta_den"])), PadicInt(ctx, int(c["principal"]))) for c in coords]
        return cls(ctx, tuple(a), tuple(phi))


def principal_exponent(x: PadicInt) -> PadicInt:
    """``t`` with ``<x> = (1+p)^t``.  Correct modulo ``p^(N-1)``."""
    ctx = x.ctx
    p, q = ctx.p, ctx.modulus
    lx = log_iwasawa(x).residue // p
    lg = ctx.log_generator.residue // p
    return PadicInt(ctx, lx * pow(lg, -1, q))


def _power(v: CharValue, t: PadicInt) -> CharValue:
    den = v.zeta_exp.denominator
    z = v.zeta_exp * (t.residue % den) if den > 1 else Fraction(0)
    if v.principal.residue == 1:
        return CharValue(z, v.principal)
    return CharValue(z, zp_power(v.principal, t))


def eval_weight(kappa: Weight, x: Sequence[PadicInt | int]) -> CharValue:
    """``kappa(x)`` for a vector of d units."""
    ctx = kappa.ctx
    if len(x) != kappa.d:
        raise ValueError(f"expected {kappa.d} coordinates, got {len(x)}")
    p = ctx.p
    out = CharValue.one(ctx)
    for a, phi, xi in zip(kappa.a, kappa.phi, x):
        xi = xi if isinstance(xi, PadicInt) else PadicInt(ctx, xi)
        if not xi.is_unit():
            raise ValueError(f"coordinate {xi} is not a unit")
        tame = Fraction(a * ctx.teichmuller_index(xi), p - 1)
        out = out * CharValue(tame, PadicInt(ctx, 1)) * _power(phi, principal_exponent(xi))
    return out


def algebraic_weight(ctx: PadicContext, n: Sequence[int]) -> Weight:
    """``x -> prod_i sigma_i(x)^{n_i}``."""
    g = ctx.generator
    return Weight(ctx, tuple(n), tuple(CharValue(Fraction(0), g**k) for k in n))


def norm_power(ctx: PadicContext, d: int, k: int) -> Weight:
    return algebraic_weight(ctx, [k] * d)


def finite_weight(ctx: PadicContext, a: Sequence[int], zeta_exps: Sequence[Fraction | int]) -> Weight:
    """Finite-order weight: Teichmuller exponents ``a`` and p-power roots of unity on ``1+p``."""
    one = PadicInt(ctx, 1)
    return Weight(ctx, tuple(a), tuple(CharValue(Fraction(z), one) for z in zeta_exps))


def _digits(ctx: PadicContext, slack: int | None) -> int:
    return ctx.N - (ctx.default_slack() if slack is None else slack)


def is_parallel(kappa: Weight, slack: int | None = None) -> bool:
    digits = _digits(kappa.ctx, slack)
    a0, v0 = kappa.a[0], kappa.phi[0]
    return all(
        a == a0 and v.zeta_exp == v0.zeta_exp and v.principal.congruent(v0.principal, digits)
        for a, v in zip(kappa.a, kappa.phi)
    )


def is_locally_parallel(kappa: Weight, slack: int | None = None) -> bool:
    digits = _digits(kappa.ctx, slack)
    logs = [v.log() for v in kappa.phi]
    return all(x.congruent(logs[0], digits) for x in logs)


class Kind(str, enum.Enum):
    ALGEBRAIC = "algebraic"
    LOCALLY_ALGEBRAIC = "locally algebraic"
    LOCALLY_PARALLEL = "locally parallel only"
    NON_ALGEBRAIC = "non-algebraic at precision"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    n: tuple[int, ...] | None = None
    epsilon: Weight | None = None
    conductor: int | None = None

    @property
    def is_locally_algebraic(self) -> bool:
        return self.kind in (Kind.ALGEBRAIC, Kind.LOCALLY_ALGEBRAIC)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n": list(self.n) if self.n is not None else None,
            "epsilon": self.epsilon.to_dict() if self.epsilon is not None else None,
            "conductor": self.conductor,
        }


def default_bound(ctx: PadicContext) -> int:
    return ctx.p ** (ctx.N // 3)


def classify(kappa: Weight, bound: int | None = None, slack: int | None = None) -> Classification:
    """Split ``kappa = epsilon * x^n`` with ``epsilon`` of finite order, if possible.

    Raises PrecisionError when ``2B + 1 >= p^(N - slack)``; a failed
    reconstruction is reported through ``kind`` instead.
    """
    ctx = kappa.ctx
    digits = _digits(ctx, slack)
    B = default_bound(ctx) if bound is None else bound
    if 2 * B + 1 >= ctx.p**digits:
        raise PrecisionError(f"bound {B} needs more than {digits} reliable digits at p = {ctx.p}")
    n = []
    for v in kappa.phi:
        s = principal_exponent(v.principal)
        n.append(integer_reconstruct(s, B, digits=digits))
    if any(x is None for x in n):
        kind = Kind.LOCALLY_PARALLEL if is_locally_parallel(kappa, slack) else Kind.NON_ALGEBRAIC
        return Classification(kind)
    eps = kappa / algebraic_weight(ctx, n)
    if not eps.has_finite_order(digits):
        return Classification(Kind.NON_ALGEBRAIC)
    eps = finite_weight(ctx, eps.a, [v.zeta_exp for v in eps.phi])
    kind = Kind.ALGEBRAIC if eps.is_trivial() else Kind.LOCALLY_ALGEBRAIC
    return Classification(kind, tuple(n), eps, finite_conductor(eps))


def finite_conductor(eps: Weight) -> int:
    """Least r >= 0 with the finite-order weight ``eps`` trivial on ``(1 + p^r Z_p)^d``."""
    c = 0
    for a, v in zip(eps.a, eps.phi):
        den = v.zeta_exp.denominator
        if den > 1:
            k = 0
            while den > 1:
                den //= eps.ctx.p
                k += 1
            c = max(c, k + 1)
        elif a:
            c = max(c, 1)
    return c


def conductor(kappa: Weight, bound: int | None = None, slack: int | None = None) -> int:
    """``c(kappa)`` for a locally algebraic weight."""
    cl = classify(kappa, bound, slack)
    if not cl.is_locally_algebraic:
        raise ValueError(f"conductor is only defined for locally algebraic weights ({cl.kind.value})")
    return cl.conductor


@dataclass(frozen=True)
class NormOneBasis:
    """Z_p-basis of the torsion-free part of ``{x : prod_i x_i = 1}``."""

    vectors: tuple[tuple[PadicInt, ...], ...]


def norm_one_basis(ctx: PadicContext, d: int) -> NormOneBasis:
    """``u_j = g`` in slot j and ``g^-1`` in slot j+1."""
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        warnings.warn("the norm-one subgroup of Z_p^x is torsion; empty basis", stacklevel=2)
        return NormOneBasis(())
    g = ctx.generator
    one = PadicInt(ctx, 1)
    vecs = []
    for j in range(d - 1):
        v = [one] * d
        v[j], v[j + 1] = g, g.invert()
        vecs.append(tuple(v))
    return NormOneBasis(tuple(vecs))


def rigid_locus_values(kappa: Weight, basis: NormOneBasis | None = None) -> list[PadicInt]:
    """``log kappa(u_j)`` for the norm-one basis vectors."""
    if basis is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            basis = norm_one_basis(kappa.ctx, kappa.d)
    return [eval_weight(kappa, u).log() for u in basis.vectors]


def is_trivial_on(kappa: Weight, gens: Sequence[Sequence[PadicInt]], slack: int | None = None) -> bool:
    """True iff ``kappa`` is trivial (at precision) on every generator in ``gens``."""
    digits = _digits(kappa.ctx, slack)
    return all(eval_weight(kappa, g).is_one(digits) for g in gens)
