"""Closure of the congruence units, the quotient Q(U), and the eigenvariety report.

For a totally split odd prime, ``O_{K,p}^x = (Z_p^x)^d = mu_(p-1)^d x (1+pZ_p)^d``.
The two factors have coprime (supernatural) orders, so the closure of a
finitely generated subgroup splits as its Teichmuller image times the
Z_p-span of its principal parts.  After ``log`` the principal side becomes a
Z_p-lattice in ``(p Z_p)^d``, which is where every rank statement is made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from .linalg import (
    GroupStructure,
    ZpMatrix,
    integer_echelon,
    integer_elementary_divisors,
    integer_kernel,
    kernel_lattice,
    quotient_structure,
    smith_structure,
)
from .number_field import (
    NumberFieldData,
    SplitPrimeData,
    TameLevel,
    embed_unit_power,
    gamma_u,
    ray_class_order,
)
from .padic import PadicContext, PadicInt, PrecisionError, log_iwasawa
from .weights import Classification, Weight, classify, is_parallel, is_trivial_on, principal_exponent

__all__ = [
    "EigReport",
    "InfinityTypeLattice",
    "LeopoldtDefect",
    "NotInWeightSpaceError",
    "PointClassification",
    "RankMismatchError",
    "UnitLogLattice",
    "classify_point",
    "eig_report",
    "finite_quotient_order",
    "infinity_type_lattice",
    "leopoldt_defect",
    "quotient_QU",
    "unit_log_lattice",
]


class RankMismatchError(ArithmeticError):
    """Q(U) free rank disagrees with 1 + r2 + delta_N: precision failure or bad fixture."""


class NotInWeightSpaceError(ValueError):
    """The weight is not trivial on the closure of Gamma(U)."""


@dataclass(frozen=True)
class UnitLogLattice:
    """Row j describes the unit with exponent vector ``exponents[j]``: its p-adic
    images, their Teichmuller indices and their logarithms."""

    ctx: PadicContext
    exponents: tuple[tuple[int, ...], ...]
    images: tuple[tuple[PadicInt, ...], ...]
    tame: tuple[tuple[int, ...], ...]
    logs: tuple[tuple[PadicInt, ...], ...]

    @property
    def d(self) -> int:
        return len(self.images[0]) if self.images else 0

    def log_matrix(self, d: int | None = None) -> ZpMatrix:
        return ZpMatrix(self.ctx, [list(r) for r in self.logs], self.d if d is None else d)


def unit_log_lattice(K: NumberFieldData, sp: SplitPrimeData, gens: Sequence[Sequence[int]]) -> UnitLogLattice:
    """Images, Teichmuller indices and logs of the units ``prod gen_j^e_j`` for each ``e`` in ``gens``."""
    ctx = sp.ctx
    exps, imgs, tame, logs = [], [], [], []
    for e in gens:
        img = embed_unit_power(K, sp, e)
        exps.append(tuple(e))
        imgs.append(tuple(img))
        tame.append(tuple(ctx.teichmuller_index(x) for x in img))
        logs.append(tuple(log_iwasawa(x) for x in img))
    return UnitLogLattice(ctx, tuple(exps), tuple(imgs), tuple(tame), tuple(logs))


def _fundamental_exponents(K: NumberFieldData) -> list[list[int]]:
    k = len(K.unit_generators)
    return [[int(i == j) for i in range(k)] for j in range(1, k)]


def _slack(ctx: PadicContext, slack: int | None) -> int:
    return ctx.default_slack() if slack is None else slack


@dataclass(frozen=True)
class LeopoldtDefect:
    """``delta_N = unit rank - rank at precision`` of the unit log matrix.

    A positive value only says the log matrix has a divisor of valuation
    ``>= N - slack``; it never proves that Leopoldt's conjecture fails.
    """

    delta: int
    unit_rank: int
    log_rank: int
    divisor_valuations: tuple[int, ...]
    N: int
    slack: int

    @property
    def margin(self) -> int | None:
        """Largest nonzero divisor valuation: how close the smallest pivot came to the cutoff."""
        live = [a for a in self.divisor_valuations if a < self.N - self.slack]
        return max(live) if live else None

    def __int__(self) -> int:
        return self.delta


def leopoldt_defect(K: NumberFieldData, sp: SplitPrimeData, slack: int | None = None) -> LeopoldtDefect:
    ctx = sp.ctx
    s = _slack(ctx, slack)
    r = K.unit_rank
    if r == 0:
        return LeopoldtDefect(0, 0, 0, (), ctx.N, s)
    lat = unit_log_lattice(K, sp, _fundamental_exponents(K))
    divs = smith_structure(lat.log_matrix(K.degree))
    rank = sum(1 for a in divs if a < ctx.N - s)
    return LeopoldtDefect(r - rank, r, rank, tuple(divs), ctx.N, s)


def _gamma_generators(K: NumberFieldData, sp: SplitPrimeData, U: TameLevel, gens):
    if gens is None:
        gens = gamma_u(K, U, sp.p).generators
    return [list(g) for g in gens]


def quotient_QU(
    K: NumberFieldData,
    sp: SplitPrimeData,
    U: TameLevel,
    slack: int | None = None,
    gens: Sequence[Sequence[int]] | None = None,
) -> GroupStructure:
    """Structure of ``(mu_(p-1) x Z_p)^d`` modulo the closure of Gamma(U).

    The Z_p side is ``Z_p^d / span(log/p)``, so nonzero log divisors of
    valuation ``a`` contribute ``Z/p^(a-1)``.
    """
    ctx = sp.ctx
    lat = unit_log_lattice(K, sp, _gamma_generators(K, sp, U, gens))
    d = K.degree
    return quotient_structure(
        ctx,
        [[x.residue for x in row] for row in lat.logs],
        d,
        slack=_slack(ctx, slack),
        ambient_torsion=[ctx.p - 1] * d,
        finite_generators=[list(t) for t in lat.tame],
        shift=1,
    )


def finite_quotient_order(
    K: NumberFieldData,
    sp: SplitPrimeData,
    U: TameLevel,
    r: int,
    gens: Sequence[Sequence[int]] | None = None,
) -> int:
    """Order of ``((Z_p^x / (1 + p^r))^d) / image of closure(Gamma(U))``.

    Each ``(Z/p^r)^x`` is written as ``Z/(p-1) x Z/p^(r-1)`` through
    (Teichmuller index, exponent of ``1+p``); the quotient order is read off the
    integer Smith form of the relation matrix.
    """
    if r < 1:
        raise ValueError("level r must be at least 1")
    ctx = sp.ctx
    if r > ctx.N - 1:
        raise PrecisionError(f"level r = {r} needs more than N - 1 = {ctx.N - 1} digits")
    p, d = ctx.p, K.degree
    pr1 = p ** (r - 1)
    rel = []
    for i in range(d):
        rel.append([p - 1 if j == 2 * i else 0 for j in range(2 * d)])
        rel.append([pr1 if j == 2 * i + 1 else 0 for j in range(2 * d)])
    for e in _gamma_generators(K, sp, U, gens):
        row = []
        for x in embed_unit_power(K, sp, e):
            row += [ctx.teichmuller_index(x), principal_exponent(x).residue % pr1]
        rel.append(row)
    divs = integer_elementary_divisors(rel, 2 * d)
    return math.prod(divs)


@dataclass(frozen=True)
class EigReport:
    label: str
    p: int
    N: int
    slack: int
    modulus: int
    signs: tuple[int, ...]
    QU: GroupStructure
    delta: int
    dimension: int
    ray_class_order: int
    r1: int
    r2: int
    finite_quotient_orders: dict[int, int] = field(default_factory=dict)
    defect_divisors: tuple[int, ...] = ()
    closure_generators: tuple[tuple[int, ...], ...] = ()

    @property
    def level(self) -> TameLevel:
        return TameLevel(self.modulus, self.signs)

    @property
    def ctx(self) -> PadicContext:
        return PadicContext(self.p, self.N)

    def closure_images(self) -> list[list[PadicInt]]:
        ctx = self.ctx
        return [[PadicInt(ctx, x) for x in g] for g in self.closure_generators]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "N": self.N,
            "slack": self.slack,
            "tame_level": {"m": self.modulus, "signs": list(self.signs)},
            "r1": self.r1,
            "r2": self.r2,
            "QU": self.QU.to_dict(),
            "leopoldt_defect": self.delta,
            "defect_divisor_valuations": list(self.defect_divisors),
            "dimension": self.dimension,
            "ray_class_order": self.ray_class_order,
            "finite_quotient_orders": {str(k): v for k, v in self.finite_quotient_orders.items()},
            "closure_generators": [list(g) for g in self.closure_generators],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> EigReport:
        return cls(
            label=raw["label"],
            p=raw["p"],
            N=raw["N"],
            slack=raw["slack"],
            modulus=raw["tame_level"]["m"],
            signs=tuple(raw["tame_level"]["signs"]),
            QU=GroupStructure.from_dict(raw["QU"]),
            delta=raw["leopoldt_defect"],
            dimension=raw["dimension"],
            ray_class_order=raw["ray_class_order"],
            r1=raw["r1"],
            r2=raw["r2"],
            finite_quotient_orders={int(k): v for k, v in raw["finite_quotient_orders"].items()},
            defect_divisors=tuple(raw["defect_divisor_valuations"]),
            closure_generators=tuple(tuple(g) for g in raw["closure_generators"]),
        )


def eig_report(
    K: NumberFieldData,
    sp: SplitPrimeData,
    U: TameLevel,
    slack: int | None = None,
    gens: Sequence[Sequence[int]] | None = None,
    levels: Sequence[int] = (1, 2, 3),
) -> EigReport:
    """Assemble Q(U), delta_N, the dimension ``1 + r2 + delta_N`` and the ray class order."""
    ctx = sp.ctx
    s = _slack(ctx, slack)
    gens = _gamma_generators(K, sp, U, gens)
    qu = quotient_QU(K, sp, U, s, gens)
    defect = leopoldt_defect(K, sp, s)
    dim = 1 + K.r2 + defect.delta
    if qu.free_rank != dim:
        raise RankMismatchError(
            f"{K.label} at p={ctx.p}: Q(U) free rank {qu.free_rank} != 1 + r2 + delta_N = {dim} "
            f"(N={ctx.N}, slack={s}, divisors {list(qu.divisor_valuations)})"
        )
    images = [tuple(x.residue for x in embed_unit_power(K, sp, e)) for e in gens]
    return EigReport(
        label=K.label,
        p=ctx.p,
        N=ctx.N,
        slack=s,
        modulus=U.m,
        signs=tuple(U.signs),
        QU=qu,
        delta=defect.delta,
        dimension=dim,
        ray_class_order=ray_class_order(K, U),
        r1=K.r1,
        r2=K.r2,
        finite_quotient_orders={r: finite_quotient_order(K, sp, U, r, gens) for r in levels if r <= ctx.N - 1},
        defect_divisors=defect.divisor_valuations,
        closure_generators=tuple(images),
    )


@dataclass(frozen=True)
class InfinityTypeLattice:
    """Saturated Z-basis (Hermite form) of the admissible infinity types."""

    basis: tuple[tuple[int, ...], ...]
    d: int
    N: int
    slack: int
    bound: int

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_parallel_only(self) -> bool:
        """Weil's conclusion: the lattice is exactly ``Z (1, ..., 1)``."""
        return self.basis == ((1,) * self.d,)

    def contains(self, n: Sequence[int]) -> bool:
        ech = integer_echelon([list(b) for b in self.basis] + [list(n)], self.d)
        return len(ech) == self.rank and [tuple(r) for r in ech] == list(self.basis)

    def to_dict(self) -> dict:
        return {
            "basis": [list(b) for b in self.basis],
            "d": self.d,
            "rank": self.rank,
            "parallel_only": self.is_parallel_only,
            "N": self.N,
            "slack": self.slack,
            "bound": self.bound,
        }


def _short_relations(rows: list[list[int]], modulus: int, d: int, bound: int) -> list[list[int]]:
    """LLL-reduce ``span(rows) + modulus Z^d`` and keep the vectors with entries ``<= bound``."""
    gens = [list(r) for r in rows] + [[modulus if i == j else 0 for j in range(d)] for i in range(d)]
    basis = integer_echelon(gens, d)
    reduced = DomainMatrix([[ZZ(x) for x in r] for r in basis], (d, d), ZZ).lll().to_list()
    return [[int(x) for x in r] for r in reduced if max(abs(int(x)) for x in r) <= bound]


def infinity_type_lattice(
    K: NumberFieldData,
    sp: SplitPrimeData,
    bound: int | None = None,
    slack: int | None = None,
) -> InfinityTypeLattice:
    """``{n in Z^d : prod_i sigma_i(u)^n_i is a root of unity for every unit u}``.

    Integer points of the Z_p-kernel of the unit log matrix: the kernel mod
    ``p^(N-slack)`` is an integer lattice of full rank, whose LLL-short vectors
    (entries bounded by ``bound``) span the genuine relations.  The result is
    saturated in Z^d.
    """
    ctx = sp.ctx
    s = _slack(ctx, slack)
    d = K.degree
    digits = ctx.N - s
    B = ctx.p ** (digits // 3) if bound is None else bound
    qd = ctx.p**digits
    if 2 * B + 1 >= qd:
        raise PrecisionError(f"bound {B} is too large for {digits} reliable digits")
    if K.unit_rank == 0:
        short = [[int(i == j) for j in range(d)] for i in range(d)]
    else:
        lat = unit_log_lattice(K, sp, _fundamental_exponents(K))
        ker = kernel_lattice(lat.log_matrix(d), s)
        short = _short_relations([[x % qd for x in v] for v in ker.vectors], qd, d, B)
        if len(short) > ker.rank:
            raise PrecisionError(f"{len(short)} short relations exceed the Z_p-kernel rank {ker.rank}; raise N")
    if not short:
        raise PrecisionError(f"no relation with entries <= {B}; the bound is too small or N too low")
    # saturate: L = (Q-span) cap Z^d = ker(ker(short))
    perp = integer_kernel(short, d)
    basis = integer_kernel(perp, d) if perp else [[int(i == j) for j in range(d)] for i in range(d)]
    if any(sum(row) for row in perp):
        raise ArithmeticError("(1, ..., 1) is not an admissible infinity type; unit data or precision is wrong")
    return InfinityTypeLattice(tuple(tuple(b) for b in basis), d, ctx.N, s, B)


@dataclass(frozen=True)
class PointClassification:
    in_weight_space: bool
    classification: Classification
    parallel: bool
    lift_count: int

    def to_dict(self) -> dict:
        return {
            "in_W(U)": self.in_weight_space,
            "classification": self.classification.to_dict(),
            "parallel": self.parallel,
            "lift_count": self.lift_count,
        }


def classify_point(
    kappa: Weight,
    report: EigReport,
    bound: int | None = None,
    slack: int | None = None,
) -> PointClassification:
    """Classify ``kappa`` as a point of W(U) and count its lifts to E(U).

    Every character of Q(U) is assumed to extend to H(U) in exactly
    ``ray_class_order`` ways.
    """
    if kappa.ctx != report.ctx:
        raise ValueError("weight and report use different p-adic contexts")
    s = report.slack if slack is None else slack
    if not is_trivial_on(kappa, report.closure_images(), s):
        raise NotInWeightSpaceError("weight is not trivial on the closure of Gamma(U)")
    cl = classify(kappa, bound, s)
    return PointClassification(True, cl, is_parallel(kappa, s), report.ray_class_order)

