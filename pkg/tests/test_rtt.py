from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twyangian.exactalg import QQ, FArray, FieldSpec, USeries
from twyangian.liecore import build_module, pos
from twyangian.rtt import (
    OperatorSeries,
    check_central,
    check_qdet_antisymmetrizer,
    check_ternary,
    coproduct_T,
    dtilde,
    evaluation_T,
    highest_weight_of_top,
    identity_T,
    perturb_entry,
    qdet,
    scalar_multiple,
    shifted_product,
    singular_vectors,
)

F5 = FieldSpec.parse("Fp:5")
F101 = FieldSpec.parse("Fp:101")


def ev(expr, n=1, F=QQ):
    return evaluation_T(build_module(expr, n, F))


def top_scalar(series: OperatorSeries, T, order=8):
    v = np.zeros(T.dim, dtype=np.int64)
    v[T.top] = 1
    return series.scalar_series(FArray(T.field, v), order)


def test_trivial_module_gives_identity_matrix():
    T = identity_T(2, 1, QQ)
    assert T.degree == 0
    assert check_ternary(T).holds


def test_natural_gl2_evaluation_entries():
    T = ev(["natural"])
    p = pos(-1, 1)
    assert T.entry(p, p)[0].equals(QQ.eye(2))
    assert T.entry(p, p)[1].equals(FArray(QQ, np.diag([1, 0])))


def test_one_dimensional_evaluation_is_scalar():
    T = ev(["one_dim", 3], n=2)
    assert T.dim == 1
    for p, q in itertools.product(range(4), repeat=2):
        expected = [1, 3] if p == q else [0, 0]
        assert [T.entry(p, q).scalar((k, 0, 0)) for k in range(2)] == expected


def test_coproduct_of_single_factor_is_unchanged():
    T = ev(["natural"])
    assert coproduct_T([T]).coeffs.equals(T.coeffs)


def test_coproduct_of_two_naturals_has_degree_two():
    T = coproduct_T([ev(["natural"]), ev(["natural"])])
    assert T.dim == 4 and T.degree == 2
    assert check_ternary(T).holds


def test_coproduct_with_one_dimensional_factor_pulls_out_scalar():
    c = 2
    T = ev(["natural"])
    prod = coproduct_T([T, ev(["one_dim", c])])
    expected = scalar_multiple(T, [1, c])
    assert prod.coeffs.equals(expected.coeffs)


def test_coproduct_rejects_mismatched_rank():
    with pytest.raises(ValueError):
        coproduct_T([ev(["natural"], 1), ev(["natural"], 2)])


@pytest.mark.parametrize(
    "make",
    [
        lambda F: ev(["natural"], 1, F),
        lambda F: ev(["dual"], 2, F),
        lambda F: ev(["wedge", 2], 2, F),
        lambda F: coproduct_T([ev(["natural"], 2, F), ev(["dual"], 2, F)]),
        lambda F: coproduct_T([ev(["natural"], 1, F)] * 3),
    ],
    ids=["natural", "dual4", "wedge4", "nat-dual4", "three-naturals"],
)
def test_ternary_relation_holds(make, field):
    assert check_ternary(make(field)).holds


def test_ternary_negative_control_reports_location():
    T = ev(["natural"])
    bad = perturb_entry(T, 1, 0, 1, QQ.eye(2))
    rep = check_ternary(bad)
    assert not rep.holds and rep.location is not None


def test_qdet_rank_one_is_the_entry():
    T = ev(["one_dim", 5], n=1)
    # N = 2 here; build an N = 1 matrix by hand
    one = FArray(QQ, np.array([[[[[1]]]], [[[[4]]]]]))
    from twyangian.rtt import OperatorMatrix

    T1 = OperatorMatrix(one, (QQ.one,), None, 0)
    q = qdet(T1)
    assert [q.num.scalar((k, 0, 0)) for k in range(2)] == [1, 4]
    assert T.dim == 1


def test_qdet_natural_gl2_on_highest_vector():
    T = ev(["natural"])
    for form in ("column", "row"):
        s = top_scalar(qdet(T, form), T)
        assert s.to_json()[:3] == [1, 1, 0]
        assert all(c == 0 for c in s.to_json()[2:])


def test_qdet_is_comultiplicative():
    A = ev(["natural"])
    B = ev(["tensor", ["natural"], ["one_dim", 2]])
    AB = coproduct_T([A, B])
    qa, qb, qab = (top_scalar(qdet(X), X) for X in (A, B, AB))
    assert qab.equals(qa * qb)


@pytest.mark.parametrize("N_half", [1, 2])
def test_row_and_column_forms_agree_for_all_permutations(N_half):
    T = coproduct_T([ev(["natural"], N_half), ev(["dual"], N_half)]) if N_half == 1 else ev(["wedge", 2], 2)
    ref = qdet(T).expand(6)
    perms = list(itertools.permutations(range(T.N)))
    for pi in perms[:: max(1, len(perms) // 6)]:
        for form in ("column", "row"):
            assert qdet(T, form, pi).expand(6).equals(ref)


@pytest.mark.parametrize(
    "make",
    [lambda: ev(["natural"], 2), lambda: coproduct_T([ev(["natural"]), ev(["dual"])]), lambda: ev(["sym", 2], 2)],
    ids=["natural4", "nat-dual2", "sym4"],
)
def test_qdet_antisymmetrizer_route_and_centrality(make):
    T = make()
    assert check_qdet_antisymmetrizer(T).holds
    assert check_central(qdet(T), T).holds


def test_rescaling_t_multiplies_qdet_by_shifted_products():
    T = coproduct_T([ev(["natural"]), ev(["dual"])])
    f = [1, 3]
    fT = scalar_multiple(T, f)
    fs = USeries.make(QQ, f, 8)
    expected = top_scalar(qdet(T), T) * fs * fs.shift(1)
    assert top_scalar(qdet(fT), fT).equals(expected)


def test_dtilde_of_one_is_one():
    assert dtilde(USeries.one(QQ, 12), 2).equals(USeries.one(QQ, 12))


def test_dtilde_resubstitution_to_order_twelve():
    q = USeries.make(QQ, [1, 1], 12)
    d = dtilde(q, 2)
    assert d[1] == Fraction(1, 2)
    assert shifted_product(d, 2).equals(q)


def test_dtilde_over_f5_is_reduction_of_rational_answer():
    q = USeries.make(QQ, [1, 1], 12)
    assert dtilde(q.reduce_to(F5), 2).equals(dtilde(q, 2).reduce_to(F5))


def test_dtilde_refuses_rank_divisible_by_p():
    with pytest.raises(ZeroDivisionError):
        dtilde(USeries.make(F5, [1, 1], 6), 5)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4), st.sampled_from([2, 3, 4]))
def test_dtilde_resubstitution_property(cs, N):
    q = USeries.make(QQ, [1] + cs, 10)
    assert shifted_product(dtilde(q, N), N).equals(q)


def test_singular_vector_of_natural_gl2():
    T = ev(["natural"])
    lines = singular_vectors(T)
    assert len(lines) == 1
    v = lines[0].vector
    assert v.nonzero_index()[0] == pos(-1, 1)
    (n1, d1), (n2, d2) = lines[0].series
    assert list(n1)[:2] == [1, 1] and list(n2)[:1] == [1]


def test_trivial_module_is_all_singular():
    T = identity_T(2, 3, QQ)
    lines = singular_vectors(T)
    assert len(lines) == 3


def test_equal_parameter_naturals_have_one_singular_line():
    T = coproduct_T([ev(["natural"]), ev(["natural"])])
    assert [tuple(int(x) for x in ln.weight) for ln in singular_vectors(T)] == [(2, 0)]


def test_offset_naturals_split_into_two_rows():
    # second factor is natural (x) det, i.e. evaluation parameters one apart
    T = coproduct_T([ev(["natural"]), ev(["tensor", ["natural"], ["one_dim", 1]])])
    weights = sorted(tuple(int(x) for x in ln.weight) for ln in singular_vectors(T))
    # symmetric square and wedge square, shifted by the one-dimensional factor
    assert weights == [(2, 2), (3, 1)]


def test_highest_weight_of_top_for_natural():
    T = ev(["natural"])
    lam = highest_weight_of_top(T)
    assert lam[0].equals(lam[0].from_x_ratio(QQ, [1, 1], [1]))
    assert lam[1].equals(lam[1].one(QQ))
