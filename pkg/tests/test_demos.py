import math
import random
from fractions import Fraction

import pytest
import sympy
from sympy.abc import x as X

from gl1eig.demos import (
    CyclotomicInt,
    GroupRingElement,
    character_values,
    formal_density_check,
    unit_disc_torsion_check,
)
from gl1eig.padic import vp


def cyclotomic_poly(p, n):
    return sympy.cyclotomic_poly(p**n, X)


def norm_valuation(c: CyclotomicInt) -> int:
    """v_p of the field norm, which equals the (zeta - 1)-adic valuation for a totally ramified prime."""
    poly = sum(int(a) * X**i for i, a in enumerate(c.coeffs))
    res = sympy.resultant(cyclotomic_poly(c.p, c.n), poly, X)
    return vp(abs(int(res)), c.p)


def test_cyclotomic_arithmetic_matches_sympy():
    rng = random.Random(0)
    for p, n in [(3, 1), (3, 2), (5, 1), (5, 2)]:
        phi = cyclotomic_poly(p, n)
        for _ in range(10):
            a = [rng.randint(-5, 5) for _ in range(rng.randint(1, 3 * p**n))]
            b = [rng.randint(-5, 5) for _ in range(rng.randint(1, 3 * p**n))]
            A, B = CyclotomicInt.from_poly(p, n, a), CyclotomicInt.from_poly(p, n, b)
            prod = sympy.rem(sympy.Poly(a[::-1], X) * sympy.Poly(b[::-1], X), sympy.Poly(phi, X))
            coeffs = prod.all_coeffs()[::-1]
            coeffs += [0] * (A.phi - len(coeffs))
            assert list((A * B).coeffs) == [int(c) for c in coeffs]


def test_pi_valuation_matches_norm_oracle():
    rng = random.Random(1)
    for p, n in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)]:
        T = CyclotomicInt.zeta(p, n) - CyclotomicInt.integer(p, n, 1)
        for _ in range(15):
            c = CyclotomicInt.from_poly(p, n, [rng.randint(-20, 20) for _ in range(rng.randint(1, p**n))])
            c = c * T ** rng.randint(0, 4)
            if c.is_zero():
                continue
            assert c.pi_valuation() == norm_valuation(c)


@pytest.mark.parametrize("p,n", [(5, 1), (5, 2), (3, 2), (3, 3), (7, 1)])
def test_torsion_identity_exact(p, n):
    one = CyclotomicInt.integer(p, n, 1)
    zeta = CyclotomicInt.zeta(p, n)
    assert zeta ** (p**n) == one
    assert not (zeta ** (p ** (n - 1))).is_one()


def test_unit_disc_examples():
    r = unit_disc_torsion_check(5, 0, 10)
    assert r.valuation is None and r.passed
    r = unit_disc_torsion_check(5, 1, 40)
    assert r.torsion_identity and r.valuation >= 8 and r.passed
    r = unit_disc_torsion_check(3, 2, 60)
    assert r.torsion_identity and r.passed
    with pytest.raises(ValueError):
        unit_disc_torsion_check(5, 2, 10)


def test_unit_disc_valuation_against_norm_oracle():
    for p, n, K in [(5, 1, 40), (3, 2, 30)]:
        one = CyclotomicInt.integer(p, n, 1)
        T = CyclotomicInt.zeta(p, n) - one
        D = math.lcm(*range(1, K + 1))
        acc = CyclotomicInt.integer(p, n, 0)
        for k in range(1, K + 1):
            acc = acc + (T**k) * ((-1) ** (k + 1) * (D // k))
        phi = (p - 1) * p ** (n - 1)
        expected = Fraction(norm_valuation(acc), phi) - vp(D, p)
        assert unit_disc_torsion_check(p, n, K).valuation == expected


def test_character_values_examples():
    (v,) = character_values(GroupRingElement(3, (), (7,)))
    assert v.coeffs == (7,)
    vals = character_values(GroupRingElement(3, (1,), (1, -1, 0)))
    one = CyclotomicInt.integer(3, 1, 1)
    z = CyclotomicInt.zeta(3, 1)
    assert sorted(vals, key=lambda c: c.coeffs) == sorted([one - one, one - z, one - z * z], key=lambda c: c.coeffs)


@pytest.mark.parametrize("p,exps", [(3, (1,)), (3, (1, 1)), (3, (2,)), (5, (1,)), (3, (1, 2))])
def test_character_orthogonality(p, exps):
    x = GroupRingElement(p, exps, (1,) * (p ** sum(exps)))
    vals = character_values(x)
    assert vals[0].coeffs[0] == x.order and not any(vals[0].coeffs[1:])
    assert all(v.is_zero() for v in vals[1:])


def test_formal_density():
    assert formal_density_check(3, (), 5)
    assert formal_density_check(3, (1,), 50)
    assert formal_density_check(3, (1, 1), 200)
    assert formal_density_check(5, (1, 2), 200)
    with pytest.raises(ValueError):
        formal_density_check(3, (4, 3), 1)


def test_formal_density_agrees_with_exact_values():
    rng = random.Random(2)
    for _ in range(20):
        coeffs = tuple(rng.randint(-2, 2) for _ in range(9))
        if not any(coeffs):
            continue
        vals = character_values(GroupRingElement(3, (1, 1), coeffs))
        assert any(not v.is_zero() for v in vals)
