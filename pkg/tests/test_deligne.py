from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import flint
import numpy as np
import pytest

from twyangian.deligne import (
    T_GEN,
    BrauerDiagram,
    BrauerMorphism,
    NegativePartition,
    all_diagrams,
    closure_loops,
    compose,
    compose_check,
    compose_diagrams,
    cup_cap_probe,
    evaluate_functor,
    gram_determinant,
    hom_dimension,
    hom_rank,
    image_gram_determinant,
    loop_value,
    random_diagram,
    weight_embedding,
)

A_WORKED = BrauerDiagram.from_literal([["t5", "t4"], ["b2", "b3"], ["t3", "t1"], ["t2", "b1"]], 3, 5)
B_WORKED = BrauerDiagram.from_literal([["t3", "t2"], ["b3", "b5"], ["b1", "b2"], ["t1", "b4"]], 5, 3)
AB_REDUCED = BrauerDiagram.from_literal([["t5", "t4"], ["t3", "t1"], ["t2", "b4"], ["b3", "b5"], ["b1", "b2"]], 5, 5)


def poly(*cs):
    return flint.fmpq_poly(list(cs))


def test_literal_round_trip_and_validation():
    d = BrauerDiagram.from_literal([["b1", "t2"], ["b2", "b3"], ["t1", "t3"]])
    assert (d.r, d.s) == (3, 3)
    assert BrauerDiagram.from_literal(d.to_literal(), 3, 3) == d
    with pytest.raises(ValueError):
        BrauerDiagram.from_literal([["b1", "b1"]])
    with pytest.raises(ValueError):
        BrauerDiagram.from_literal([["b1", "x2"]])


def test_identity_composition_has_no_loops():
    I = BrauerDiagram.identity(3)
    d, loops = compose_diagrams(I, I)
    assert d == I and loops == 0


def test_cap_after_cup_is_one_loop():
    M = compose(BrauerDiagram.cap(), BrauerDiagram.cup())
    assert M == BrauerMorphism.of(BrauerDiagram.empty(), T_GEN)


def test_worked_composition_gives_one_loop():
    M = compose(A_WORKED, B_WORKED)
    assert (M.r, M.s) == (5, 5)
    assert M == BrauerMorphism.of(AB_REDUCED, T_GEN)


def test_composition_arity_mismatch():
    with pytest.raises(ValueError):
        compose(A_WORKED, A_WORKED)


def test_composition_is_associative_on_random_morphisms():
    rng = random.Random(1)
    for _ in range(40):
        r, a, b, s = (rng.randint(0, 3) * 2 + k for k in (0, 0, 0, 0))
        def morph(x, y):
            return BrauerMorphism.make(x, y, [(random_diagram(x, y, rng), poly(rng.randint(-2, 2), rng.randint(-2, 2))) for _ in range(2)])
        X, Y, Z = morph(b, s), morph(a, b), morph(r, a)
        assert compose(compose(X, Y), Z) == compose(X, compose(Y, Z))


def test_identity_is_neutral_for_morphisms():
    rng = random.Random(2)
    for _ in range(20):
        r, s = rng.randint(0, 3), rng.randint(0, 3)
        if (r + s) % 2:
            s += 1
        M = BrauerMorphism.of(random_diagram(r, s, rng), poly(1, 1))
        assert compose(BrauerDiagram.identity(s), M) == M
        assert compose(M, BrauerDiagram.identity(r)) == M


@pytest.mark.parametrize("r1,r2,expected", [(1, 2, 0), (2, 2, 3), (3, 3, 15), (0, 0, 1)])
def test_hom_dimension_examples(r1, r2, expected):
    assert hom_dimension(r1, r2) == expected


def test_hom_dimension_matches_enumeration():
    for total in range(0, 11):
        for r1 in range(total + 1):
            diagrams = all_diagrams(r1, total - r1)
            assert len(set(diagrams)) == len(diagrams) == hom_dimension(r1, total - r1)
            if total % 2 == 0:
                m = total // 2
                assert hom_dimension(r1, total - r1) == math.factorial(2 * m) // (math.factorial(m) * 2**m)


@pytest.mark.parametrize("flavor", ["o", "sp"])
def test_hom_rank_matches_dimension_for_large_rank(flavor):
    for r1, r2 in [(1, 1), (2, 2), (1, 3), (0, 4)]:
        assert hom_rank(r1, r2, flavor, 2) == hom_dimension(r1, r2)


def test_identity_diagram_evaluates_to_identity():
    for flavor in ("o", "sp"):
        E = evaluate_functor(BrauerDiagram.identity(2), flavor, 2)
        assert (E == np.eye(16, dtype=E.dtype)).all()


def test_loop_probe_orthogonal():
    assert cup_cap_probe("o", 2) == 4
    assert cup_cap_probe("o", 3) == 6


def test_loop_value_of_symplectic_flavor_is_negative_dimension():
    # closing an arc with the antisymmetric form produces -2n
    assert cup_cap_probe("sp", 2) == loop_value("sp", 2) == -4


def test_worked_composition_evaluates_to_rank_times_reduced_operator():
    for flavor in ("o", "sp"):
        lhs = evaluate_functor(A_WORKED, flavor, 2) @ evaluate_functor(B_WORKED, flavor, 2)
        rhs = loop_value(flavor, 2) * evaluate_functor(AB_REDUCED, flavor, 2)
        assert (lhs == rhs).all()


@pytest.mark.parametrize("flavor", ["o", "sp"])
@pytest.mark.parametrize("n", [2, 3])
def test_functoriality_on_random_pairs(flavor, n):
    rng = random.Random(100 * n + (flavor == "sp"))
    count = 0
    while count < 40:
        r, m, s = rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3)
        if (r + m) % 2 or (m + s) % 2:
            continue
        assert compose_check(random_diagram(m, s, rng), random_diagram(r, m, rng), flavor, n)
        count += 1


def test_closure_loops_of_identity_and_cup_cap():
    assert closure_loops(BrauerDiagram.identity(3)) == 3
    d = BrauerDiagram.from_literal([["b1", "b2"], ["t1", "t2"]], 2, 2)
    assert closure_loops(d) == 1


def test_gram_determinant_small_cases():
    assert gram_determinant(1) == T_GEN
    t = T_GEN
    assert gram_determinant(2) == t**3 * (t + 2) * (t - 1) ** 2
    assert gram_determinant(2)(flint.fmpq(1, 2)) != 0


def test_gram_determinant_rank_three_factorization():
    t = T_GEN
    expected = t**15 * (t + 4) * (t - 2) ** 5 * (t + 2) ** 10 * (t - 1) ** 14
    assert gram_determinant(3) == expected


def test_gram_determinant_matches_image_operators():
    assert gram_determinant(2)(4) == image_gram_determinant(2, "o", 2)
    assert gram_determinant(2)(-4) == image_gram_determinant(2, "sp", 2)


def test_weight_embedding_examples():
    assert weight_embedding([-1], 2) == (0, -1)
    assert weight_embedding([-1, -1], 3) == (0, -1, -1)
    assert weight_embedding([], 2) == (0, 0)
    assert weight_embedding(NegativePartition((-1, -2)), 3) == (0, -1, -2)


def test_weight_embedding_requires_room():
    with pytest.raises(ValueError):
        weight_embedding([-1, -1, -1], 2)


def test_negative_partition_validation():
    with pytest.raises(ValueError):
        NegativePartition((-1, 0))
