from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ribbonlens.arith import (
    FnWitness,
    LensSpace,
    canonical_cf,
    cf_evaluate,
    cf_expand,
    continuant,
    fn_membership,
    h1_order,
    is_perfect_square,
    lens_homeomorphic,
    lens_normalize,
    lens_reverse,
    square_ratio_check,
)


@st.composite
def coprime_fractions(draw, max_p=300):
    p = draw(st.integers(min_value=2, max_value=max_p))
    q = draw(st.integers(min_value=1, max_value=p - 1).filter(lambda q: gcd(p, q) == 1))
    return Fraction(p, q)


def lens_spaces(max_p=30):
    return st.builds(
        lambda f: lens_normalize(f.numerator, f.denominator),
        coprime_fractions(max_p),
    ) | st.just(LensSpace(1, 0))


class TestContinuedFractions:
    def test_integer_input_gives_single_term(self):
        assert cf_expand(Fraction(3, 1)) == (3,)

    def test_seven_fourths(self):
        # 2 - 1/4 = 7/4
        assert cf_expand(Fraction(7, 4)) == (2, 4)

    def test_eight_fifths(self):
        # 2 - 1/(3 - 1/2) = 8/5
        assert cf_expand(Fraction(8, 5)) == (2, 3, 2)

    def test_evaluate_examples(self):
        assert cf_evaluate((3,)) == Fraction(3)
        assert cf_evaluate((2, 4)) == Fraction(7, 4)
        assert cf_evaluate((2, 2, 2)) == Fraction(4, 3)

    def test_empty_string_is_rank_zero_sentinel(self):
        assert cf_evaluate(()) is None
        assert continuant(()) == 1

    def test_rejects_small_fractions(self):
        with pytest.raises(ValueError):
            cf_expand(Fraction(1, 1))
        with pytest.raises(ValueError):
            cf_expand(Fraction(3, 4))

    @given(coprime_fractions())
    def test_round_trip(self, f):
        terms = cf_expand(f)
        assert all(a >= 2 for a in terms)
        assert cf_evaluate(terms) == f

    @given(coprime_fractions())
    def test_continuant_is_numerator(self, f):
        assert continuant(cf_expand(f)) == f.numerator

    def test_canonical_cf(self):
        assert canonical_cf((3, 2)) == (2, 3)
        assert canonical_cf((2, 3)) == (2, 3)
        assert canonical_cf(()) == ()


class TestLensSpaces:
    def test_normalize_examples(self):
        assert lens_normalize(5, 7) == LensSpace(5, 2)
        assert lens_normalize(1, 0) == LensSpace(1, 0)
        assert lens_normalize(4, -1) == LensSpace(4, 3)

    def test_normalize_rejects_bad_input(self):
        with pytest.raises(ValueError):
            lens_normalize(0, 1)
        with pytest.raises(ValueError):
            lens_normalize(-3, 1)
        with pytest.raises(ValueError):
            lens_normalize(4, 2)

    def test_reverse_examples(self):
        assert lens_reverse(LensSpace(4, 1)) == LensSpace(4, 3)
        assert lens_reverse(LensSpace(1, 0)) == LensSpace(1, 0)
        assert lens_reverse(LensSpace(7, 3)) == LensSpace(7, 4)

    @given(lens_spaces())
    def test_reverse_is_involution(self, lens):
        assert lens_reverse(lens_reverse(lens)) == lens

    def test_homeomorphism_examples(self):
        assert lens_homeomorphic(LensSpace(7, 2), LensSpace(7, 4), oriented=True)
        assert not lens_homeomorphic(LensSpace(7, 2), LensSpace(7, 5), oriented=True)
        assert lens_homeomorphic(LensSpace(7, 2), LensSpace(7, 5), oriented=False)
        assert lens_homeomorphic(LensSpace(3, 1), LensSpace(3, 1), oriented=True)

    @given(lens_spaces(), lens_spaces(), lens_spaces())
    def test_oriented_homeomorphism_is_equivalence(self, a, b, c):
        assert lens_homeomorphic(a, a)
        if lens_homeomorphic(a, b):
            assert lens_homeomorphic(b, a)
        if lens_homeomorphic(a, b) and lens_homeomorphic(b, c):
            assert lens_homeomorphic(a, c)

    @given(lens_spaces(), lens_spaces())
    def test_oriented_implies_unoriented(self, a, b):
        if lens_homeomorphic(a, b, oriented=True):
            assert lens_homeomorphic(a, b, oriented=False)

    @given(lens_spaces(), lens_spaces())
    def test_homeomorphism_matches_chain_string_reversal(self, a, b):
        # independent route: equality of expansion strings up to reversal
        same_strings = canonical_cf(a.cf()) == canonical_cf(b.cf())
        assert lens_homeomorphic(a, b, oriented=True) == same_strings


class TestFnMembership:
    def test_eight_fifths(self):
        assert fn_membership(Fraction(8, 5)) == [FnWitness(2, 2, 1)]

    def test_twelve_sevenths(self):
        assert fn_membership(Fraction(12, 7)) == [FnWitness(3, 2, 1)]

    def test_integers_never_belong(self):
        for n in range(2, 40):
            assert fn_membership(Fraction(n, 1)) == []

    @given(
        st.integers(min_value=2, max_value=6),
        st.integers(min_value=2, max_value=7),
        st.integers(min_value=1, max_value=6),
    )
    def test_witness_reconstruction(self, n, m, k):
        if not (m > k > 0 and gcd(m, k) == 1):
            return
        f = Fraction(n * m * m, n * m * k + 1)
        witnesses = fn_membership(f)
        assert FnWitness(n, m, k) in witnesses
        for w in witnesses:
            assert w.fraction() == f
            assert f.numerator == w.n * w.m * w.m


class TestHomologyOrder:
    def test_examples(self):
        assert h1_order(LensSpace(1, 0)) == 1
        assert h1_order(LensSpace(4, 1)) == 4
        assert h1_order([LensSpace(2, 1), LensSpace(3, 1)]) == 6

    def test_square_ratio_examples(self):
        assert square_ratio_check(LensSpace(2, 1), LensSpace(8, 5))
        assert not square_ratio_check(LensSpace(8, 5), LensSpace(2, 1))
        assert not square_ratio_check(LensSpace(1, 0), LensSpace(2, 1))

    @given(lens_spaces())
    def test_square_ratio_reflexive(self, lens):
        assert square_ratio_check(lens, lens)

    def test_perfect_square(self):
        squares = {n * n for n in range(40)}
        for n in range(1500):
            assert is_perfect_square(n) == (n in squares)
