import math
import random
from fractions import Fraction as F

import pytest

import splitkit as sk
from splitkit import bch
from splitkit.errors import IrrationalCoefficient

from schemegen import random_fraction, random_rational_scheme


def random_element(rnd):
    return bch.LieElement(*(random_fraction(rnd) for _ in range(5)))


# ---------------------------------------------------------------------------
# bracket table
# ---------------------------------------------------------------------------

def test_bracket_table():
    assert bch.bracket(bch.T, bch.V) == bch.E_TV
    assert bch.bracket(bch.V, bch.T) == -bch.E_TV
    assert bch.bracket(bch.T, bch.E_TV) == bch.E_TTV
    assert bch.bracket(bch.V, bch.E_TV) == bch.E_VTV


def test_bracket_truncates_above_degree_three():
    for x in (bch.T, bch.V, bch.E_TV):
        assert bch.bracket(x, bch.E_TTV).is_zero()
        assert bch.bracket(x, bch.E_VTV).is_zero()
    assert bch.bracket(bch.E_TV, bch.E_TV).is_zero()


def test_bracket_is_antisymmetric_and_bilinear():
    rnd = random.Random(2)
    for _ in range(50):
        x, y, z = (random_element(rnd) for _ in range(3))
        a, b = random_fraction(rnd), random_fraction(rnd)
        assert bch.bracket(x, y) == -bch.bracket(y, x)
        lhs = bch.bracket(x.scale(a) + y.scale(b), z)
        rhs = bch.bracket(x, z).scale(a) + bch.bracket(y, z).scale(b)
        assert lhs == rhs


def test_bracket_satisfies_jacobi():
    rnd = random.Random(8)
    for _ in range(50):
        x, y, z = (random_element(rnd) for _ in range(3))
        total = (
            bch.bracket(x, bch.bracket(y, z))
            + bch.bracket(y, bch.bracket(z, x))
            + bch.bracket(z, bch.bracket(x, y))
        )
        assert total.is_zero()


# ---------------------------------------------------------------------------
# BCH product
# ---------------------------------------------------------------------------

def test_bch_of_generators():
    z = bch.bch_product(bch.T, bch.V)
    assert z.coordinates() == (1, 1, F(1, 2), F(1, 12), F(-1, 12))


def test_bch_identity_element():
    rnd = random.Random(4)
    for _ in range(20):
        x = random_element(rnd)
        assert bch.bch_product(x, bch.ZERO) == x
        assert bch.bch_product(bch.ZERO, x) == x


def test_bch_leapfrog_word():
    half_v = bch.V.scale(F(1, 2))
    z = bch.bch_product(half_v, bch.bch_product(bch.T, half_v))
    assert z.coordinates() == (1, 1, 0, F(1, 12), F(1, 24))


def test_bch_inverse():
    rnd = random.Random(6)
    for _ in range(20):
        x = random_element(rnd)
        assert bch.bch_product(x, -x).is_zero()


def test_bch_associativity():
    rnd = random.Random(9)
    for _ in range(100):
        x, y, z = (random_element(rnd) for _ in range(3))
        left = bch.bch_product(bch.bch_product(x, y), z)
        right = bch.bch_product(x, bch.bch_product(y, z))
        assert left == right


# ---------------------------------------------------------------------------
# scheme expansion
# ---------------------------------------------------------------------------

def test_expand_leapfrog():
    z = sk.expand_scheme(sk.leapfrog())
    assert z.coordinates() == (1, 1, 0, F(1, 12), F(1, 24))


def test_expand_4d_with_cancelling_gradient():
    scheme = sk.SplittingScheme(
        "velocity",
        (0, F(1, 3), F(1, 3), F(1, 3)),
        (F(1, 8), F(3, 8), F(3, 8), F(1, 8)),
        (sk.GradientTerm(2, F(1, 384)), sk.GradientTerm(3, F(1, 384))),
    )
    z = sk.expand_scheme(scheme)
    assert z.VTV == 0
    assert z.coordinates() == (1, 1, 0, 0, 0)


def test_expand_matches_formulas_exactly():
    rnd = random.Random(13)
    for _ in range(300):
        scheme = random_rational_scheme(
            rnd, normalized=rnd.random() < 0.5, with_gradient=rnd.random() < 0.4
        )
        ec = sk.error_coefficients(scheme)
        assert sk.expand_scheme(scheme).coordinates() == ec.as_tuple()


def test_expand_dual_mapping():
    rnd = random.Random(15)
    for _ in range(100):
        scheme = random_rational_scheme(rnd, normalized=False)
        a = sk.expand_scheme(scheme).coordinates()
        b = sk.expand_scheme(sk.dual(scheme)).coordinates()
        assert b == (a[1], a[0], -a[2], -a[4], -a[3])


def test_expand_reversal_negates_e_tv_only():
    rnd = random.Random(21)
    for _ in range(100):
        scheme = random_rational_scheme(rnd, normalized=False, with_gradient=True)
        a = sk.expand_scheme(scheme).coordinates()
        b = sk.expand_scheme(sk.reversed_scheme(scheme)).coordinates()
        assert b == (a[0], a[1], -a[2], a[3], a[4])


def test_symmetric_word_has_zero_e_tv_via_oracle():
    scheme = sk.builtin_scheme("gradient-n4")
    rev = sk.reversed_scheme(scheme)
    assert sk.expand_scheme(scheme).TV == 0
    assert sk.expand_scheme(rev).coordinates() == sk.expand_scheme(scheme).coordinates()


def test_merged_and_separate_gradient_factors_agree():
    rnd = random.Random(19)
    for _ in range(100):
        scheme = random_rational_scheme(rnd, normalized=False, with_gradient=True)
        merged = sk.expand_scheme(scheme, merge_gradient=True)
        separate = sk.expand_scheme(scheme, merge_gradient=False)
        assert merged == separate


def test_float_coefficients_convert_exactly():
    scheme = sk.SplittingScheme("velocity", (0.0, 1.0), (0.5, 0.5))
    z = sk.expand_scheme(scheme)
    assert z.coordinates() == (1, 1, 0, F(1, 12), F(1, 24))


def test_require_exact_input():
    scheme = sk.forest_ruth()
    with pytest.raises(IrrationalCoefficient):
        sk.expand_scheme(scheme, require_exact_input=True)


def test_nonfinite_coefficient_rejected():
    scheme = sk.SplittingScheme("velocity", (0.0, math.inf), (0.5, 0.5))
    with pytest.raises(IrrationalCoefficient):
        sk.expand_scheme(scheme)
