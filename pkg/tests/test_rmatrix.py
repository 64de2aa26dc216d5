from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twyangian.exactalg import QQ, FArray, FieldSpec
from twyangian.liecore import FormData
from twyangian.rmatrix import (
    R_at,
    antisymmetrizer,
    check_yang_baxter,
    conjugated_transpose,
    embed,
    flip_matrix,
    flip_transposed,
    fused_R,
    fused_R_formal,
    perm_sign,
)

F101 = FieldSpec.parse("Fp:101")


def _basis(N, *idx):
    v = np.zeros(N ** len(idx), dtype=np.int64)
    v[np.ravel_multi_index(idx, (N,) * len(idx))] = 1
    return v


def test_perm_sign_of_transposition_and_cycle():
    assert perm_sign((1, 0)) == -1
    assert perm_sign((1, 2, 0)) == 1


def test_antisymmetrizer_single_leg_is_identity():
    assert antisymmetrizer(1, 3).equals(QQ.eye(3))


def test_antisymmetrizer_on_distinct_and_repeated_indices():
    A = antisymmetrizer(2, 2)
    got = A.num @ _basis(2, 0, 1) // A.den
    assert (got == _basis(2, 0, 1) - _basis(2, 1, 0)).all()
    assert not (A.num @ _basis(2, 0, 0)).any()


@pytest.mark.parametrize("m,N", [(2, 2), (2, 3), (3, 3), (3, 4)])
def test_antisymmetrizer_squares_to_factorial_multiple(m, N):
    A = antisymmetrizer(m, N)
    assert (A @ A).equals(A * QQ(math.factorial(m)))


def test_antisymmetrizer_refused_when_factorial_vanishes():
    with pytest.raises(ValueError):
        antisymmetrizer(3, 3, FieldSpec.parse("Fp:3"))


def test_fused_r_two_legs_consecutive_points_is_antisymmetrizer():
    assert fused_R([1, 0], 2).equals(antisymmetrizer(2, 2))


def test_fused_r_three_legs_consecutive_points_is_antisymmetrizer():
    assert fused_R([2, 1, 0], 3).equals(antisymmetrizer(3, 3))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_fused_r_at_consecutive_points_for_rank_four(m, field):
    pts = list(range(m - 1, -1, -1))
    for order in ("descending", "ascending"):
        assert fused_R(pts, 4, field, order).equals(antisymmetrizer(m, 4, field))


def test_fused_r_at_gap_five_is_one_minus_flip_over_five():
    P = FArray(QQ, flip_matrix(2))
    expected = QQ.eye(4) - P * (QQ(1) / QQ(5))
    for order in ("descending", "ascending"):
        assert fused_R([5, 0], 2, QQ, order).equals(expected)


def test_fused_r_pole_raises():
    with pytest.raises(ZeroDivisionError):
        fused_R([1, 1], 2)


@pytest.mark.parametrize("m,N", [(2, 2), (3, 2), (3, 3)])
def test_fused_r_product_orders_agree_as_polynomials(m, N):
    assert (fused_R_formal(m, N, QQ, "descending") - fused_R_formal(m, N, QQ, "ascending")).is_zero()


def test_fused_r_consecutive_points_idempotent_up_to_factorial():
    R = fused_R([2, 1, 0], 3)
    assert (R @ R).equals(R * QQ(6))


@settings(max_examples=30)
@given(st.integers(-20, 20).filter(lambda z: z not in (0,)))
def test_r_matrix_unitarity(z):
    R = R_at(z, 3, (1, 2), 2)
    Rm = R_at(-z, 3, (1, 2), 2)
    assert (R @ Rm).equals(QQ.eye(9) * (QQ.one - QQ(1) / QQ(z * z)))


@pytest.mark.parametrize("form", [FormData(f, n) for f in ("o", "sp") for n in (1, 2)], ids=lambda f: f"{f.flavor}{f.n}")
def test_both_partial_transposes_give_the_same_flip(form):
    Q = flip_transposed(form)
    assert (conjugated_transpose(form, 1) == Q).all()
    assert (conjugated_transpose(form, 2) == Q).all()


@pytest.mark.parametrize("n", [1, 2])
def test_flip_absorbs_orthogonal_transposed_flip(n):
    form = FormData("o", n)
    P, Q = flip_matrix(form.N), flip_transposed(form)
    assert (P @ P == np.eye(form.N**2, dtype=int)).all()
    assert (P @ Q == Q).all()


def test_orthogonal_antisymmetrizer_absorbs_transposed_r():
    form = FormData("o", 1)
    N = form.N
    A = antisymmetrizer(N, N)
    for z in (3, -2, 7):
        Rp = QQ.eye(N * N) - FArray(QQ, flip_transposed(form)) * (QQ(1) / QQ(z))
        assert (A @ Rp).equals(A)


def test_disjoint_leg_embeddings_commute():
    rng = np.random.default_rng(0)
    N = 2
    X = rng.integers(-3, 4, size=(N * N, N * N))
    Y = rng.integers(-3, 4, size=(N * N, N * N))
    a = embed(X, N, (1, 3), 4)
    b = embed(Y, N, (2, 4), 4)
    assert (a @ b == b @ a).all()


def test_embedding_reversed_legs_conjugates_by_flip():
    N = 2
    X = np.arange(16).reshape(4, 4)
    P = flip_matrix(N)
    assert (embed(X, N, (2, 1), 2) == P @ X @ P).all()


@pytest.mark.parametrize("variant", ["plain", "transposed", "final_transposed"])
@pytest.mark.parametrize("flavor", ["o", "sp"])
@pytest.mark.parametrize("n", [1, 2])
def test_yang_baxter_variants_hold_formally(variant, flavor, n):
    assert check_yang_baxter(variant, FormData(flavor, n)).holds


def test_yang_baxter_plain_at_sample_points():
    assert check_yang_baxter("plain", FormData("o", 1), (3, 1, 0)).holds


def test_yang_baxter_final_transposed_symplectic_over_f101():
    assert check_yang_baxter("final_transposed", FormData("sp", 1), None, F101).holds


def test_yang_baxter_negative_control_fails():
    rep = check_yang_baxter("plain", FormData("o", 1), None, QQ, perturb=True)
    assert not rep.holds
    assert rep.residual_degree >= 0
