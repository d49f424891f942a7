"""Exact linear algebra over Z/p^N and over Z.

Matrices over Z/p^N are stored as lists of residue rows.  Because Z/p^N is a
chain ring, minimal-valuation pivoting always finds a pivot dividing the rest
of its column (echelon forms) or of the whole remaining block (Smith form).

Rank statements are only ever made "at precision N with slack s": a divisor
of valuation ``>= N - slack`` is indistinguishable from a genuine relation.

The integer routines at the bottom serve the finite-group side (unit
congruence subgroups, finite quotients, saturation of reconstructed lattices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .padic import PadicContext, PadicInt, PrecisionError, vp

__all__ = [
    "GroupStructure",
    "LatticeBasis",
    "ZpMatrix",
    "howell_form",
    "howell_contains",
    "integer_echelon",
    "integer_elementary_divisors",
    "integer_kernel",
    "integer_reconstruct",
    "kernel_lattice",
    "quotient_structure",
    "smith_structure",
]


class ZpMatrix:
    """Dense matrix over Z/p^N.  Entries are held as residues in ``[0, p^N)``."""

    def __init__(self, ctx: PadicContext, rows: Sequence[Sequence[int | PadicInt]], ncols: int | None = None):
        self.ctx = ctx
        q = ctx.modulus
        data = []
        for row in rows:
            r = []
            for x in row:
                if isinstance(x, PadicInt):
                    if x.ctx != ctx:
                        raise ValueError("matrix entry from a different context")
                    r.append(x.residue)
                else:
                    r.append(int(x) % q)
            data.append(r)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged rows")
        self._rows = tuple(tuple(r) for r in data)
        self.nrows = len(data)
        self.ncols = ncols

    @classmethod
    def identity(cls, ctx: PadicContext, n: int) -> ZpMatrix:
        return cls(ctx, [[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, ctx: PadicContext, m: int, n: int) -> ZpMatrix:
        return cls(ctx, [[0] * n for _ in range(m)], n)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def entry(self, i: int, j: int) -> PadicInt:
        return PadicInt(self.ctx, self._rows[i][j])

    def __getitem__(self, ij: tuple[int, int]) -> PadicInt:
        return self.entry(*ij)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ZpMatrix)
            and self.ctx == other.ctx
            and self.ncols == other.ncols
            and self._rows == other._rows
        )

    def __matmul__(self, other: ZpMatrix) -> ZpMatrix:
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        q = self.ctx.modulus
        cols = list(zip(*other._rows)) if other.nrows else [()] * other.ncols
        out = [[sum(a * b for a, b in zip(r, c)) % q for c in cols] for r in self._rows]
        return ZpMatrix(self.ctx, out, other.ncols)

    def apply(self, v: Sequence[int]) -> list[int]:
        q = self.ctx.modulus
        return [sum(a * int(b) for a, b in zip(r, v)) % q for r in self._rows]

    def transpose(self) -> ZpMatrix:
        return ZpMatrix(self.ctx, [list(c) for c in zip(*self._rows)] if self.nrows else [], self.nrows)

    def __repr__(self) -> str:
        return f"ZpMatrix({self.nrows}x{self.ncols} mod {self.ctx.p}^{self.ctx.N}, {list(map(list, self._rows))})"


def howell_form(M: ZpMatrix) -> tuple[ZpMatrix, ZpMatrix]:
    """Howell form of ``M`` with a transform ``T`` satisfying ``H = T @ M``.

    Pivots are powers of p, entries above a pivot ``p^a`` are reduced into
    ``[0, p^a)``, and each pivot row of positive valuation contributes its
    annihilated multiple back to the pool so that the row span is Howell
    complete.  ``T`` has one row per row of ``H`` and is in general not square.
    """
    ctx = M.ctx
    p, N, q = ctx.p, ctx.N, ctx.modulus
    m, n = M.nrows, M.ncols
    pool = [(list(r), [int(i == k) for k in range(m)]) for i, r in enumerate(M.rows())]
    pool = [(r, t) for r, t in pool if any(r)]
    H: list[tuple[list[int], list[int], int, int]] = []  # (row, transform, pivot col, pivot val)
    for c in range(n):
        cands = [i for i, (r, _) in enumerate(pool) if r[c]]
        if not cands:
            continue
        best = min(cands, key=lambda i: vp(pool[i][0][c], p))
        row, tr = pool.pop(best)
        a = vp(row[c], p)
        uinv = pow(row[c] // p**a, -1, q)
        row = [x * uinv % q for x in row]
        tr = [x * uinv % q for x in tr]
        pa = p**a
        for k, (r, t) in enumerate(pool):
            if r[c]:
                f = r[c] // pa
                pool[k] = ([(x - f * y) % q for x, y in zip(r, row)], [(x - f * y) % q for x, y in zip(t, tr)])
        if a > 0:
            s = p ** (N - a)
            aug = [x * s % q for x in row]
            if any(aug):
                pool.append((aug, [x * s % q for x in tr]))
        pool = [(r, t) for r, t in pool if any(r)]
        H.append((row, tr, c, a))
    for i, (row_i, tr_i, c, a) in enumerate(H):
        pa = p**a
        for h in range(i):
            row_h, tr_h, ch, ah = H[h]
            f = row_h[c] // pa
            if f:
                H[h] = (
                    [(x - f * y) % q for x, y in zip(row_h, row_i)],
                    [(x - f * y) % q for x, y in zip(tr_h, tr_i)],
                    ch,
                    ah,
                )
    Hm = ZpMatrix(ctx, [h[0] for h in H], n)
    Tm = ZpMatrix(ctx, [h[1] for h in H], m)
    return Hm, Tm


def howell_contains(H: ZpMatrix, v: Sequence[int | PadicInt]) -> bool:
    """Membership of ``v`` in the row span of a Howell form ``H``."""
    ctx = H.ctx
    p, q = ctx.p, ctx.modulus
    w = [int(x) % q for x in v]
    for row in H.rows():
        c = next(j for j, x in enumerate(row) if x)
        pa = row[c]
        if w[c] % pa:
            return False
        f = w[c] // pa
        w = [(x - f * y) % q for x, y in zip(w, row)]
    return not any(w)


def _smith(M: ZpMatrix, want_columns: bool) -> tuple[list[int], list[list[int]] | None]:
    """Minimal-valuation full pivoting.  Returns divisor valuations (length
    ``min(m, n)``, zeros as ``N``) and optionally the column transform ``V``
    (as a list of columns) with ``U M V = D``."""
    ctx = M.ctx
    p, N, q = ctx.p, ctx.N, ctx.modulus
    A = M.rows()
    m, n = M.nrows, M.ncols
    V = [[int(i == j) for i in range(n)] for j in range(n)] if want_columns else None  # V[j] = column j
    divs: list[int] = []
    for k in range(min(m, n)):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                if A[i][j]:
                    v = vp(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        A[k], A[i] = A[i], A[k]
        if j != k:
            for r in A:
                r[k], r[j] = r[j], r[k]
            if V is not None:
                V[k], V[j] = V[j], V[k]
        pv = p**v
        uinv = pow(A[k][k] // pv, -1, q)
        for i2 in range(k + 1, m):
            if A[i2][k]:
                f = A[i2][k] // pv * uinv % q
                A[i2] = [(x - f * y) % q for x, y in zip(A[i2], A[k])]
        if V is not None:
            for j2 in range(k + 1, n):
                if A[k][j2]:
                    f = A[k][j2] // pv * uinv % q
                    V[j2] = [(x - f * y) % q for x, y in zip(V[j2], V[k])]
        divs.append(v)
    divs += [N] * (min(m, n) - len(divs))
    return divs, V


def smith_structure(M: ZpMatrix) -> list[int]:
    """Valuations of the Smith divisors of ``M`` over Z/p^N, nondecreasing.

    A zero divisor is reported as ``N``; callers apply their slack to decide
    which divisors are "zero at precision".
    """
    return _smith(M, want_columns=False)[0]


@dataclass(frozen=True)
class LatticeBasis:
    """A Z_p-lattice in Z_p^dim given by basis vectors at precision ``ctx.N``."""

    ctx: PadicContext
    dim: int
    vectors: tuple[tuple[int, ...], ...]
    saturated: bool = True

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def matrix(self) -> ZpMatrix:
        return ZpMatrix(self.ctx, self.vectors, self.dim)


def kernel_lattice(M: ZpMatrix, slack: int | None = None) -> LatticeBasis:
    """Saturated basis of ``{v : M v = 0 mod p^(N - slack)}`` read as a Z_p-kernel."""
    ctx = M.ctx
    s = ctx.default_slack() if slack is None else slack
    divs, V = _smith(M, want_columns=True)
    r = sum(1 for a in divs if a < ctx.N - s)
    return LatticeBasis(ctx, M.ncols, tuple(tuple(c) for c in V[r:]), saturated=True)


@dataclass(frozen=True)
class GroupStructure:
    """Invariant factors of a finitely generated Z_p-module (plus a finite part)
    read at precision ``N`` with ``slack``.

    ``torsion_orders`` are the p-power orders coming from the Z_p part;
    ``tame_orders`` are the invariant factors of the finite ambient part (for
    unit groups this is the prime-to-p Teichmuller part).
    """

    free_rank: int
    torsion_orders: tuple[int, ...]
    N: int
    slack: int
    tame_orders: tuple[int, ...] = ()
    divisor_valuations: tuple[int, ...] = field(default=(), compare=False)

    @property
    def finite_order(self) -> int:
        return math.prod(self.torsion_orders) * math.prod(self.tame_orders)

    @property
    def precision_note(self) -> str:
        return f"rank at precision N={self.N} with slack {self.slack}"

    def to_dict(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion_orders": list(self.torsion_orders),
            "tame_orders": list(self.tame_orders),
            "N": self.N,
            "slack": self.slack,
            "divisor_valuations": list(self.divisor_valuations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> GroupStructure:
        return cls(
            free_rank=d["free_rank"],
            torsion_orders=tuple(d["torsion_orders"]),
            N=d["N"],
            slack=d["slack"],
            tame_orders=tuple(d.get("tame_orders", ())),
            divisor_valuations=tuple(d.get("divisor_valuations", ())),
        )


def quotient_structure(
    ctx: PadicContext,
    generators: Sequence[Sequence[int | PadicInt]] | LatticeBasis,
    ambient_rank: int,
    *,
    slack: int | None = None,
    ambient_torsion: Sequence[int] = (),
    finite_generators: Sequence[Sequence[int]] = (),
    shift: int = 0,
) -> GroupStructure:
    """Structure of ``(Z_p^d x prod Z/t_k) / <generators>``.

    ``generators`` are the Z_p-coordinates; ``finite_generators`` the matching
    coordinates in the finite part ``prod Z/ambient_torsion[k]``.  The two parts
    are split, which is exact when the finite part has order prime to p.

    ``shift`` is subtracted from every nonzero divisor valuation; use ``shift=1``
    when the generators are logarithms living in ``p Z_p`` rather than ``Z_p``.
    """
    s = ctx.default_slack() if slack is None else slack
    if isinstance(generators, LatticeBasis):
        gens = [list(v) for v in generators.vectors]
    else:
        gens = [list(v) for v in generators]
    if gens:
        divs = smith_structure(ZpMatrix(ctx, gens, ambient_rank))
    else:
        divs = []
    nonzero = [a for a in divs if a < ctx.N - s]
    free_rank = ambient_rank - len(nonzero)
    torsion = tuple(sorted(ctx.p ** (a - shift) for a in nonzero if a - shift > 0))
    tame: tuple[int, ...] = ()
    if ambient_torsion:
        k = len(ambient_torsion)
        rel = [[t if i == j else 0 for j in range(k)] for i, t in enumerate(ambient_torsion)]
        rel += [[int(x) for x in g] for g in finite_generators]
        tame = tuple(e for e in integer_elementary_divisors(rel, k) if e != 1)
    return GroupStructure(free_rank, torsion, ctx.N, s, tame, tuple(divs))


def integer_reconstruct(x: PadicInt | int, bound: int, ctx: PadicContext | None = None, digits: int | None = None) -> int | None:
    """The unique ``n`` with ``|n| <= bound`` and ``n = x mod p^digits``, or None."""
    if isinstance(x, PadicInt):
        ctx = x.ctx
        x = x.residue
    if ctx is None:
        raise TypeError("a context is required for a bare integer")
    q = ctx.modulus if digits is None else ctx.p**digits
    if 2 * bound + 1 >= q:
        raise PrecisionError(f"bound {bound} too large for modulus {ctx.p}^{digits or ctx.N}")
    r = x % q
    if r <= bound:
        return r
    if q - r <= bound:
        return r - q
    return None


# -- integer side ------------------------------------------------------------


def integer_echelon(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Hermite normal form (nonzero rows) of the Z-row-span of ``rows``."""
    A = [list(map(int, r)) for r in rows if any(r)]
    out: list[list[int]] = []
    for c in range(ncols):
        live = [r for r in A if r[c]]
        A = [r for r in A if not r[c]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                f = r[c] // piv[c]
                r2 = [x - f * y for x, y in zip(r, piv)]
                if r2[c]:
                    nxt.append(r2)
                elif any(r2):
                    A.append(r2)
            live = nxt
        if live:
            piv = live[0]
            if piv[c] < 0:
                piv = [-x for x in piv]
            out.append(piv)
    for i, row in enumerate(out):
        c = next(j for j, x in enumerate(row) if x)
        for h in range(i):
            f = out[h][c] // row[c]
            if f:
                out[h] = [x - f * y for x, y in zip(out[h], row)]
    return out


def integer_kernel(A: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Saturated Z-basis (Hermite form) of ``{v in Z^ncols : A v = 0}``."""
    m = len(A)
    aug = [[int(A[i][j]) for i in range(m)] + [int(j == k) for k in range(ncols)] for j in range(ncols)]
    ech = integer_echelon(aug, m + ncols)
    ker = [r[m:] for r in ech if not any(r[:m])]
    return integer_echelon(ker, ncols)


def integer_elementary_divisors(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Invariant factors of ``Z^ncols / rowspan``; free summands appear as 0."""
    A = [list(map(int, r)) for r in rows]
    A = [r for r in A if any(r)]
    m, n = len(A), ncols
    divs: list[int] = []
    k = 0
    while k < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(k, m) for j in range(k, n) if A[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        A[k], A[i] = A[i], A[k]
        for r in A:
            r[k], r[j] = r[j], r[k]
        while True:
            piv = A[k][k]
            dirty = False
            for i2 in range(k + 1, m):
                f = A[i2][k] // piv
                if f:
                    A[i2] = [x - f * y for x, y in zip(A[i2], A[k])]
                if A[i2][k]:
                    dirty = True
            for j2 in range(k + 1, n):
                f = A[k][j2] // piv
                if f:
                    for r in A:
                        r[j2] -= f * r[k]
                if A[k][j2]:
                    dirty = True
            if not dirty:
                bad = next(
                    ((i2, j2) for i2 in range(k + 1, m) for j2 in range(k + 1, n) if A[i2][j2] % piv),
                    None,
                )
                if bad is None:
                    break
                A[k] = [x + y for x, y in zip(A[k], A[bad[0]])]
                continue
            entries = [(abs(A[i2][k]), i2, k) for i2 in range(k, m) if A[i2][k]]
            entries += [(abs(A[k][j2]), k, j2) for j2 in range(k, n) if A[k][j2]]
            _, i, j = min(entries)
            A[k], A[i] = A[i], A[k]
            for r in A:
                r[k], r[j] = r[j], r[k]
        divs.append(abs(A[k][k]))
        k += 1
    divs += [0] * (n - len(divs))
    return divs
