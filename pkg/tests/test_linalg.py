import random

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from gl1eig.linalg import (
    GroupStructure,
    ZpMatrix,
    howell_contains,
    howell_form,
    integer_echelon,
    integer_elementary_divisors,
    integer_kernel,
    integer_reconstruct,
    kernel_lattice,
    quotient_structure,
    smith_structure,
)
from gl1eig.padic import PadicContext, PrecisionError, vp


def snf_valuations(rows, p, N):
    """p-valuations of the exact integer Smith form, capped at N (oracle)."""
    D = smith_normal_form(Matrix(rows), domain=ZZ)
    k = min(D.shape)
    out = []
    for i in range(k):
        x = int(D[i, i])
        out.append(N if x == 0 else min(vp(x, p), N))
    return sorted(out)


def random_matrix(rng, m, n, lo=-30, hi=30):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]


def test_howell_examples():
    ctx = PadicContext(5, 8)
    I = ZpMatrix.identity(ctx, 3)
    H, T = howell_form(I)
    assert H == I
    H, T = howell_form(ZpMatrix(ctx, [[5, 0], [0, 1]]))
    pivots = []
    for row in H.rows():
        c = next(j for j, x in enumerate(row) if x)
        pivots.append(vp(row[c], 5))
    assert sorted(pivots) == [0, 1]


def test_howell_transform_and_span():
    ctx = PadicContext(5, 8)
    rng = random.Random(3)
    for _ in range(30):
        M = ZpMatrix(ctx, [[rng.randrange(ctx.modulus) * rng.choice([1, 5, 25]) for _ in range(4)] for _ in range(4)])
        H, T = howell_form(M)
        assert T @ M == H
        # mutual membership: every row of M lies in span(H) and vice versa
        HM, _ = howell_form(M)
        for row in M.rows():
            assert howell_contains(H, row)
        for row in H.rows():
            assert howell_contains(HM, row)


def test_howell_completeness():
    ctx = PadicContext(5, 8)
    H, _ = howell_form(ZpMatrix(ctx, [[5, 1]]))
    assert howell_contains(H, [0, 0])
    assert howell_contains(H, [25, 5])
    assert not howell_contains(H, [0, 1])


def test_smith_examples():
    ctx = PadicContext(5, 10)
    assert smith_structure(ZpMatrix.zeros(ctx, 3, 3)) == [10, 10, 10]
    assert smith_structure(ZpMatrix(ctx, [[1, 0, 0], [0, 5, 0], [0, 0, 25]])) == [0, 1, 2]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_smith_matches_integer_snf(p):
    N = 30
    ctx = PadicContext(p, N)
    rng = random.Random(p)
    for _ in range(70):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        rows = random_matrix(rng, m, n)
        if rng.random() < 0.3:
            # force p-divisibility so nontrivial valuations show up
            rows = [[x * p ** rng.randint(0, 2) for x in r] for r in rows]
        assert smith_structure(ZpMatrix(ctx, rows)) == snf_valuations(rows, p, N)


def test_smith_3x5_example():
    ctx = PadicContext(5, 10)
    rows = [[5, 10, 0, 25, 5], [0, 5, 50, 0, 0], [25, 0, 0, 125, 5]]
    assert smith_structure(ZpMatrix(ctx, rows)) == snf_valuations(rows, 5, 10)


def test_kernel_examples():
    ctx = PadicContext(5, 8)
    K = kernel_lattice(ZpMatrix.zeros(ctx, 1, 3))
    assert K.rank == 3
    K = kernel_lattice(ZpMatrix(ctx, [[1, 1]]))
    assert K.rank == 1
    (v,) = K.vectors
    assert (v[0] + v[1]) % ctx.modulus == 0 and v[0] % 5 != 0


def test_kernel_planted_vector():
    ctx = PadicContext(7, 20)
    rng = random.Random(11)
    q = ctx.modulus
    for _ in range(20):
        v = [rng.randint(-5, 5) for _ in range(4)]
        if not any(x % 7 for x in v):
            continue
        # rows orthogonal to v: random rows with last-nonzero coordinate adjusted
        rows = []
        j = next(i for i, x in enumerate(v) if x % 7)
        for _ in range(3):
            r = [rng.randrange(q) for _ in range(4)]
            s = sum(a * b for a, b in zip(r, v)) - r[j] * v[j]
            r[j] = -s * pow(v[j], -1, q) % q
            rows.append(r)
        M = ZpMatrix(ctx, rows)
        K = kernel_lattice(M, slack=5)
        # the kernel is only determined modulo p^(N - slack)
        low = PadicContext(7, 15)
        span, _ = howell_form(ZpMatrix(low, K.vectors, 4))
        assert howell_contains(span, v)
        for w in K.vectors:
            assert all(vp(x, 7) >= 15 for x in M.apply(w) if x)


def test_quotient_examples():
    ctx = PadicContext(5, 10)
    assert quotient_structure(ctx, [[1, 0], [0, 1]], 2, slack=2) == GroupStructure(0, (), 10, 2)
    assert quotient_structure(ctx, [], 2, slack=2).free_rank == 2
    g = quotient_structure(ctx, [[5, 0]], 2, slack=2)
    assert g.free_rank == 1 and g.torsion_orders == (5,)


def test_quotient_unimodular_invariance():
    ctx = PadicContext(5, 20)
    rng = random.Random(5)
    for _ in range(30):
        gens = [[rng.randint(-20, 20) * 5 ** rng.randint(0, 2) for _ in range(3)] for _ in range(2)]
        a = quotient_structure(ctx, gens, 3, slack=4)
        # random unimodular change: elementary row operations and a swap
        g2 = [list(r) for r in gens]
        for _ in range(5):
            i, j = rng.sample(range(2), 2)
            f = rng.randint(-4, 4)
            g2[i] = [x + f * y for x, y in zip(g2[i], g2[j])]
        g2.reverse()
        assert quotient_structure(ctx, g2, 3, slack=4) == a


def test_quotient_roundtrip_dict():
    ctx = PadicContext(5, 10)
    g = quotient_structure(ctx, [[5, 0]], 2, slack=2, ambient_torsion=[4, 4], finite_generators=[[2, 2]])
    assert GroupStructure.from_dict(g.to_dict()) == g
    assert g.tame_orders == (2, 4)


def test_integer_reconstruct_examples():
    ctx = PadicContext(5, 10)
    assert integer_reconstruct(ctx(5**10 - 3), 10) == -3
    assert integer_reconstruct(ctx(7), 10) == 7
    rng = random.Random(0)
    for _ in range(50):
        x = rng.randrange(ctx.modulus)
        brute = [n for n in range(-10, 11) if (n - x) % ctx.modulus == 0]
        assert integer_reconstruct(ctx(x), 10) == (brute[0] if brute else None)
    for n in range(-10, 11):
        assert integer_reconstruct(ctx(n), 10) == n
    with pytest.raises(PrecisionError):
        integer_reconstruct(ctx(1), 5**10)


def test_integer_side_against_sympy():
    rng = random.Random(9)
    for _ in range(40):
        m, n = rng.randint(1, 4), rng.randint(1, 5)
        rows = random_matrix(rng, m, n, -9, 9)
        divs = integer_elementary_divisors(rows, n)
        D = smith_normal_form(Matrix(rows), domain=ZZ)
        oracle = [abs(int(D[i, i])) for i in range(min(D.shape))] + [0] * max(0, n - m)
        assert sorted(d for d in divs if d != 1) == sorted(d for d in oracle if d != 1)
        ker = integer_kernel(rows, n)
        assert len(ker) == n - Matrix(rows).rank()
        for v in ker:
            assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
        if ker:
            # saturated: the kernel's own elementary divisors are all 1
            assert all(d == 1 for d in integer_elementary_divisors(ker, n) if d)
        assert integer_echelon(rows, n) == integer_echelon(integer_echelon(rows, n), n)
