import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl1eig.linalg import ZpMatrix, smith_structure
from gl1eig.number_field import embed, hensel_embeddings, load_field
from gl1eig.padic import PadicContext, PadicInt, PrecisionError, log_iwasawa
from gl1eig.weights import (
    CharValue,
    Kind,
    Weight,
    algebraic_weight,
    classify,
    conductor,
    eval_weight,
    finite_weight,
    is_locally_parallel,
    is_parallel,
    is_trivial_on,
    norm_one_basis,
    norm_power,
    principal_exponent,
    rigid_locus_values,
)

CTX = PadicContext(5, 40)
DIGITS = 40 - CTX.default_slack()


def random_unit(rng, ctx=CTX):
    while True:
        x = rng.randrange(1, ctx.modulus)
        if x % ctx.p:
            return PadicInt(ctx, x)


def random_weight(rng, d, ctx=CTX):
    p = ctx.p
    a = [rng.randrange(p - 1) for _ in range(d)]
    phi = [CharValue(Fraction(rng.randrange(p), p), PadicInt(ctx, 1 + p * rng.randrange(ctx.modulus // p))) for _ in range(d)]
    return Weight(ctx, tuple(a), tuple(phi))


def random_finite(rng, d, max_cond=3, ctx=CTX):
    p = ctx.p
    a = [rng.randrange(p - 1) for _ in range(d)]
    k = rng.randint(0, max_cond - 1)
    z = [Fraction(rng.randrange(p**k), p**k) if k else 0 for _ in range(d)]
    return finite_weight(ctx, a, z)


def test_charvalue_group_law():
    one = CharValue.one(CTX)
    v = CharValue(Fraction(1, 5), CTX(6))
    assert (v * v.inverse()).is_one()
    assert (v**5).zeta_exp == 0
    assert (v / v).is_one()
    assert v.log() == CharValue(Fraction(0), CTX(6)).log()
    assert one.is_one()
    with pytest.raises(ValueError):
        CharValue(Fraction(0), CTX(2))
    with pytest.raises(ValueError):
        CharValue(Fraction(1, 3), CTX(1))  # 3 does not divide 4 and is prime to 5


def test_weight_rejects_non_p_power_zeta_on_generator():
    with pytest.raises(ValueError):
        Weight(CTX, (0,), (CharValue(Fraction(1, 4), CTX(1)),))


def test_eval_trivial():
    kappa = algebraic_weight(CTX, [0, 0])
    rng = random.Random(0)
    for _ in range(10):
        assert eval_weight(kappa, [random_unit(rng), random_unit(rng)]).is_one()


def test_eval_algebraic_matches_direct_power():
    rng = random.Random(1)
    q = CTX.modulus
    for _ in range(100):
        n = [rng.randint(-6, 6) for _ in range(3)]
        x = [random_unit(rng) for _ in range(3)]
        direct = 1
        for xi, ni in zip(x, n):
            direct = direct * pow(xi.residue, ni, q) % q
        val = eval_weight(algebraic_weight(CTX, n), x).to_padic()
        assert val.congruent(direct, DIGITS)


def test_eval_homomorphism_and_group_law():
    rng = random.Random(2)
    for _ in range(100):
        k1, k2 = random_weight(rng, 2), random_weight(rng, 2)
        x = [random_unit(rng) for _ in range(2)]
        y = [random_unit(rng) for _ in range(2)]
        xy = [a * b for a, b in zip(x, y)]
        lhs = eval_weight(k1, xy)
        rhs = eval_weight(k1, x) * eval_weight(k1, y)
        assert lhs.zeta_exp == rhs.zeta_exp and lhs.principal.congruent(rhs.principal, DIGITS)
        lhs = eval_weight(k1 * k2, x)
        rhs = eval_weight(k1, x) * eval_weight(k2, x)
        assert lhs.zeta_exp == rhs.zeta_exp and lhs.principal.congruent(rhs.principal, DIGITS)


def test_weight_dict_roundtrip():
    rng = random.Random(3)
    for _ in range(20):
        k = random_weight(rng, 3)
        assert Weight.from_dict(k.to_dict()) == k


def test_algebraic_weight_examples():
    assert algebraic_weight(CTX, [0, 0]).is_trivial()
    assert is_parallel(norm_power(CTX, 3, 4))
    K = load_field("q_i")
    sp = hensel_embeddings(K, 5, 40)
    x = embed(K.element([1, 1]), sp)  # 1 + i has norm 2, a unit at both places above 5
    v = eval_weight(algebraic_weight(sp.ctx, [1, 0]), x)
    assert v.to_padic() == x[0]


def test_parallel_examples():
    k22 = algebraic_weight(CTX, [2, 2])
    assert is_parallel(k22) and is_locally_parallel(k22)
    twisted = k22 * finite_weight(CTX, [1, 3], [0, 0])
    assert is_locally_parallel(twisted) and not is_parallel(twisted)
    k12 = algebraic_weight(CTX, [1, 2])
    assert not is_parallel(k12) and not is_locally_parallel(k12)


def test_principal_exponent():
    rng = random.Random(4)
    g = CTX.generator
    for _ in range(20):
        t = rng.randrange(10**6)
        assert principal_exponent(g**t).congruent(t, CTX.N - 1)


def test_classify_examples():
    c = classify(algebraic_weight(CTX, [3, -1]))
    assert c.kind is Kind.ALGEBRAIC and c.n == (3, -1) and c.epsilon.is_trivial() and c.conductor == 0
    g = CTX.generator
    kappa = Weight(CTX, (2, 0), (CharValue(Fraction(1, 5), g**2), CharValue(Fraction(0), g**0)))
    c = classify(kappa)
    assert c.kind is Kind.LOCALLY_ALGEBRAIC and c.n == (2, 0)
    assert c.epsilon.phi[0].zeta_exp == Fraction(1, 5)
    rng = random.Random(5)
    hits = 0
    for _ in range(20):
        u = CTX(1 + 5 * rng.randrange(CTX.modulus // 5))
        k = Weight(CTX, (0, 0), (CharValue(Fraction(0), u), CharValue(Fraction(0), CTX(1))))
        hits += classify(k).kind is Kind.NON_ALGEBRAIC
    assert hits == 20


def test_classify_precision_error_is_distinct():
    with pytest.raises(PrecisionError):
        classify(algebraic_weight(CTX, [1, 1]), bound=5**35)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-5**10, 5**10), min_size=1, max_size=4))
def test_classify_roundtrip_property(n):
    c = classify(algebraic_weight(CTX, n))
    assert c.kind is Kind.ALGEBRAIC and c.n == tuple(n)


def restriction_conductor(eps: Weight) -> int:
    """Least r with eps trivial on generators of (1 + p^r Z_p)^d; r = 0 means all of (Z_p^x)^d."""
    ctx = eps.ctx
    p, d = ctx.p, eps.d
    one = PadicInt(ctx, 1)
    r = 0
    while True:
        if r == 0:
            gens = [PadicInt(ctx, ctx.primitive_root), ctx.generator]
        else:
            gens = [ctx.generator ** (p ** (r - 1))]
        ok = True
        for j in range(d):
            for g in gens:
                x = [one] * d
                x[j] = g
                if not eval_weight(eps, x).is_one():
                    ok = False
        if ok:
            return r
        r += 1


def test_conductor_examples():
    assert conductor(algebraic_weight(CTX, [2, 5])) == 0
    teich = algebraic_weight(CTX, [0, 0]) * finite_weight(CTX, [1, 0], [0, 0])
    assert conductor(teich) == 1
    zeta_p = finite_weight(CTX, [0, 0], [Fraction(1, 5), 0])
    assert conductor(zeta_p) == 2 == restriction_conductor(zeta_p)
    with pytest.raises(ValueError):
        conductor(Weight(CTX, (0,), (CharValue(Fraction(0), CTX(1 + 5 * 123456789123456789)),)))


def test_conductor_matches_restriction_oracle():
    rng = random.Random(6)
    for _ in range(50):
        eps = random_finite(rng, 2)
        n = [rng.randint(-9, 9) for _ in range(2)]
        assert conductor(algebraic_weight(CTX, n) * eps) == restriction_conductor(eps)


def test_norm_one_basis():
    B = norm_one_basis(CTX, 2)
    g = CTX.generator
    assert B.vectors == ((g, g.invert()),)
    B = norm_one_basis(CTX, 4)
    for u in B.vectors:
        prod = CTX(1)
        for x in u:
            prod = prod * x
        assert prod == CTX(1)
    L = ZpMatrix(CTX, [[log_iwasawa(x).residue for x in u] for u in B.vectors], 4)
    assert sum(1 for a in smith_structure(L) if a < DIGITS) == 3
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert norm_one_basis(CTX, 1).vectors == ()
        assert w


def test_rigid_locus_parallel_and_random():
    rng = random.Random(7)
    for _ in range(20):
        k = rng.randint(-50, 50)
        eps = random_finite(rng, 3)
        # locally parallel: a common algebraic part, and a finite twist
        vals = rigid_locus_values(norm_power(CTX, 3, k) * eps)
        assert all(v.valuation() >= DIGITS for v in vals)
        assert all(v.is_zero() for v in rigid_locus_values(norm_power(CTX, 3, k)))
    nonzero = 0
    for _ in range(100):
        vals = rigid_locus_values(random_weight(rng, 3))
        nonzero += any(v.valuation() < 10 for v in vals)
    assert nonzero >= 95


def test_rigid_locus_detects_non_parallel_algebraic_part():
    # the values are (n_j - n_(j+1)) log(1+p): non-parallel algebraic weights are off the locus
    vals = rigid_locus_values(algebraic_weight(CTX, [3, 1]))
    assert vals[0] == CTX.log_generator * CTX(2)


def test_is_trivial_on_units():
    K = load_field("q_sqrt2")
    sp = hensel_embeddings(K, 7, 40)
    ctx = sp.ctx
    units = [embed(u, sp) for u in K.unit_generators]
    assert is_trivial_on(algebraic_weight(ctx, [0, 0]), units)
    assert is_trivial_on(norm_power(ctx, 2, 2), units)
    assert is_trivial_on(norm_power(ctx, 2, 4), units)
    assert not is_trivial_on(norm_power(ctx, 2, 1), [embed(K.fundamental_units[0], sp)])
    v = eval_weight(norm_power(ctx, 2, 1), embed(K.fundamental_units[0], sp))
    assert v.zeta_exp == Fraction(1, 2)
