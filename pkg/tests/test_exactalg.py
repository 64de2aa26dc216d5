from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twyangian.exactalg import (
    QQ,
    FactoredRational,
    FieldSpec,
    MonicPoly,
    USeries,
    even_part_normalizer,
    expand_shifted_inverse,
    is_prime,
    poly_mul,
    poly_shift,
    q_period,
)

F5 = FieldSpec.parse("Fp:5")
F101 = FieldSpec.parse("Fp:101")

small = st.integers(min_value=-6, max_value=6)
small_q = st.fractions(min_value=-4, max_value=4, max_denominator=4)


def test_field_spec_parses_rationals_and_primes():
    assert FieldSpec.parse("Q").p == 0
    assert FieldSpec.parse("Fp:101").p == 101


@pytest.mark.parametrize("text", ["Fp:2", "Fp:9", "Fp:1", "R", "Fp:x"])
def test_field_spec_rejects_bad_strings(text):
    with pytest.raises(ValueError):
        FieldSpec.parse(text)


def test_characteristic_two_message():
    with pytest.raises(ValueError, match="characteristic 2 unsupported"):
        FieldSpec.parse("Fp:2")


def test_is_prime_small_values():
    assert [k for k in range(30) if is_prime(k)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_mod_p_uses_minimal_nonnegative_representative():
    assert F5(7) == F5(2)
    assert int(F5(-1)) == 4
    assert F5.sort_key(F5(4)) > F5.sort_key(F5(0))


def test_shifted_inverse_with_zero_shift_is_single_term():
    s = expand_shifted_inverse(0, 3)
    assert list(s.coeffs) == [0, 1, 0, 0]


def test_shifted_inverse_at_one_half_matches_resubstitution():
    s = expand_shifted_inverse(Fraction(1, 2), 3)
    assert list(s.coeffs) == [0, 1, Fraction(-1, 2), Fraction(1, 4)]
    # (u + 1/2) = u (1 + x/2); multiply through by (1 + x/2) and shift one order
    back = s * USeries.make(QQ, [1, Fraction(1, 2)], 3)
    assert list(back.coeffs)[:4] == [0, 1, 0, 0]


def test_shifted_inverse_over_f5():
    s = expand_shifted_inverse(1, 2, F5)
    assert s.to_json() == [0, 1, 4]


def test_poly_shift_examples():
    u = MonicPoly.from_roots(QQ, [0])
    assert list(poly_shift(u, 1).coeffs) == [1, 1]
    P = MonicPoly.from_roots(QQ, [0, 1])
    assert list(poly_shift(P, 1).coeffs) == [0, 1, 1]
    one = MonicPoly.one(QQ)
    assert poly_shift(one, 7) == one


@given(st.lists(small, max_size=5), small_q)
def test_poly_shift_round_trip(roots, c):
    P = MonicPoly.from_roots(QQ, roots)
    assert poly_shift(poly_shift(P, c), -c) == P


@given(st.lists(small, max_size=4), small, small)
def test_poly_shift_is_additive_in_shift(roots, a, b):
    P = MonicPoly.from_roots(QQ, roots)
    assert poly_shift(poly_shift(P, a), b) == poly_shift(P, a + b)


def test_q_period_is_shift_invariant():
    for F in (F5, FieldSpec.parse("Fp:7"), FieldSpec.parse("Fp:13")):
        q = q_period(F)
        assert q.degree == F.p
        assert poly_shift(q, 1) == q


def test_symmetry_predicate_of_worked_polynomial():
    P = MonicPoly.from_roots(QQ, [0, 0, 1, 1])
    assert P.is_symmetric()
    assert not MonicPoly.from_roots(QQ, [0, 0, 1]).is_symmetric()


def test_even_part_normalizer_identity():
    g, r = even_part_normalizer(FactoredRational.one(QQ))
    assert g.equals(FactoredRational.one(QQ))
    assert r.equals(FactoredRational.one(QQ))


def test_even_part_normalizer_on_cayley_ratio():
    m = FactoredRational(QQ, (-1,), (1,))
    g, r = even_part_normalizer(m)
    assert g.x_coeffs() == [1, 0, -1]
    assert r.x_coeffs() == [1, 2, 1]


def test_even_part_normalizer_on_o2_style_weight():
    half = Fraction(1, 2)
    m = FactoredRational(QQ, (-(1 + half),), (-half,))
    g, r = even_part_normalizer(m)
    assert g.x_coeffs() == [1, 0, Fraction(-1, 4)]
    expected = FactoredRational(QQ, (Fraction(-3, 2), half), (0, 0))
    assert r.equals(expected)


def test_even_part_normalizer_rejects_bad_constant_term():
    with pytest.raises(ValueError):
        even_part_normalizer(FactoredRational(QQ, (1,), (), prefactor=2))


def _series(F, cs, order):
    return USeries.make(F, [F(c) for c in cs], order)


@settings(max_examples=60)
@given(st.lists(small, min_size=1, max_size=6), st.lists(small, min_size=1, max_size=6), st.lists(small, min_size=1, max_size=6))
def test_series_product_is_associative_and_commutative(a, b, c):
    for F in (QQ, F101):
        A, B, C = (_series(F, x, 8) for x in (a, b, c))
        assert ((A * B) * C).equals(A * (B * C))
        assert (A * B).equals(B * A)


@settings(max_examples=60)
@given(st.lists(small, min_size=1, max_size=6))
def test_series_inverse_of_unit(cs):
    cs = [1] + cs
    for F in (QQ, F101):
        A = _series(F, cs, 10)
        assert (A * A.inverse()).equals(USeries.one(F, 10))


def test_series_inverse_needs_unit_constant():
    with pytest.raises((ValueError, ZeroDivisionError)):
        _series(QQ, [0, 1], 4).inverse()


@settings(max_examples=40)
@given(st.lists(small, min_size=1, max_size=5))
def test_negating_u_twice_is_identity(cs):
    A = _series(QQ, cs, 8)
    assert A.neg_u().neg_u().equals(A)


def _dense_quotient(F, num_roots, den_roots, order):
    # expand prod(1 - a x) / prod(1 - c x) by long division in x = 1/u
    num = [F.one]
    for a in num_roots:
        num = poly_mul(F, num, [F.one, -F(a)])
    den = [F.one]
    for c in den_roots:
        den = poly_mul(F, den, [F.one, -F(c)])
    out = []
    rem = num + [F.zero] * (order + 1)
    for k in range(order + 1):
        q = rem[k]
        out.append(q)
        for j, d in enumerate(den):
            if k + j < len(rem):
                rem[k + j] = rem[k + j] - q * d
    return out


@settings(max_examples=100)
@given(st.lists(small, max_size=4), st.lists(small, max_size=4))
def test_factored_expansion_matches_dense_division(num, den):
    for F in (QQ, F101):
        fr = FactoredRational(F, tuple(num), tuple(den))
        # u-degrees must balance for a series in 1/u; pad with zero roots
        k = len(num) - len(den)
        fr = FactoredRational(F, tuple(num) + (0,) * max(-k, 0), tuple(den) + (0,) * max(k, 0))
        expected = _dense_quotient(F, fr.num, fr.den, 8)
        got = fr.expand(8)
        assert list(got.coeffs) == expected


@given(st.lists(small, max_size=4), st.lists(small, max_size=4))
def test_reduce_leaves_disjoint_root_multisets(num, den):
    r = FactoredRational(QQ, tuple(num), tuple(den)).reduce()
    left = list(r.num)
    for c in r.den:
        assert c not in left
