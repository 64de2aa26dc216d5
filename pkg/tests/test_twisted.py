from __future__ import annotations

from fractions import Fraction

import pytest

from twyangian.drinfeld import ModuleSpec, realize, recover_pair_o2, sharp_weight
from twyangian.exactalg import QQ, FactoredRational, FieldSpec
from twyangian.liecore import FormData, build_module, pos
from twyangian.rtt import check_central, coproduct_T, evaluation_T, highest_weight_of_top, identity_T, perturb_entry
from twyangian.twisted import (
    alpha_N,
    beta_N,
    check_lower_diagonal,
    check_quaternary,
    check_relations,
    check_sdet_parity,
    check_symmetry,
    full_operator,
    mixed_tensor,
    rescale,
    scalar_of,
    sdet,
    sdet_from_qdet,
    sharp,
    top_vector,
    top_weight,
    twisted_eval,
    twisted_highest_weight,
    twisted_S,
    unique_singular_line,
    zhc_decomposition_check,
)

F101 = FieldSpec.parse("Fp:101")
HALF = Fraction(1, 2)


def gl_eval(expr, form, F=QQ):
    return evaluation_T(build_module(expr, form.n, F, form))


def g_eval(expr, form, F=QQ):
    return twisted_eval(build_module(expr, form.n, F, form))


def fr(num=(), den=()):
    return FactoredRational(QQ, tuple(num), tuple(den))


def test_trivial_module_gives_identity_twisted_matrix():
    form = FormData("sp", 1)
    T = identity_T(2, 1, QQ)
    S = twisted_S(T, form)
    assert S.coeffs[0].equals(T.coeffs[0])
    assert all(S.coeffs[k].is_zero() for k in range(1, S.degree + 1))


def test_trivial_g_module_gives_identity():
    form = FormData("o", 2)
    S = g_eval(["trivial"], form)
    assert S.dim == 1
    assert all(m.equals(FactoredRational.one(QQ)) for m in twisted_highest_weight(S))


@pytest.mark.parametrize("flavor", ["o", "sp"])
@pytest.mark.parametrize("n", [1, 2])
def test_twisted_s_of_evaluation_satisfies_relations(flavor, n, field):
    form = FormData(flavor, n)
    assert check_relations(twisted_S(gl_eval(["natural"], form, field), form)).holds


@pytest.mark.parametrize("flavor", ["o", "sp"])
def test_g_evaluation_modules_satisfy_relations(flavor, field):
    form = FormData(flavor, 2)
    for expr in (["restrict", ["natural"]], ["restrict", ["wedge", 2]]):
        assert check_relations(g_eval(expr, form, field)).holds


def test_o2_character_weight():
    S = g_eval(["vgamma", 1], FormData("o", 1))
    (mu,) = twisted_highest_weight(S)
    # (1 + 3/2 x) / (1 + 1/2 x)
    assert mu.equals(fr((Fraction(-3, 2),), (-HALF,)))


def test_symplectic_natural_entries_match_generators():
    form = FormData("sp", 1)
    M = build_module(["restrict", ["natural"]], 1, QQ, form)
    S = twisted_eval(M)
    h = form.half(QQ)
    for i in (-1, 1):
        for j in (-1, 1):
            p, q = pos(i, 1), pos(j, 1)
            # numerator of s_ij: delta_ij (1 + h x) + F_ij x
            const = QQ.eye(2) if i == j else QQ.zeros((2, 2))
            assert S.entry(p, q)[0].equals(const)
            assert S.entry(p, q)[1].equals(const * h + M.F(i, j))
    assert S.den == (QQ.one, h)


def test_mixed_tensor_without_gl_factors_is_unchanged():
    S = g_eval(["restrict", ["natural"]], FormData("o", 1))
    assert mixed_tensor(S, []) is S


def test_mixed_tensor_rejects_rank_mismatch():
    S = g_eval(["restrict", ["natural"]], FormData("o", 1))
    with pytest.raises(ValueError):
        mixed_tensor(S, [evaluation_T(build_module(["natural"], 2, QQ))])


def test_symplectic_adjoint_times_trivial_weight():
    form = FormData("sp", 1)
    S = mixed_tensor(g_eval(["trivial"], form), [gl_eval(["irrep", [1, -1]], form)])
    assert S.dim == 3
    (mu,) = twisted_highest_weight(S)
    assert mu.equals(fr((1, 1), (0, 0)))
    assert check_relations(S).holds


def product_formula(gl_exprs, twisted_expr, form, F=QQ):
    """lambda_i(u) lambda_{-i}(-u) mu_i(u) from separately computed highest weights."""
    T = coproduct_T([gl_eval(e, form, F) for e in gl_exprs])
    lam = highest_weight_of_top(T)
    mu = twisted_highest_weight(g_eval(twisted_expr, form, F))
    out = []
    for i in range(1, form.n + 1):
        a = lam[pos(i, form.n)]
        b = lam[pos(-i, form.n)].neg_u()
        out.append((a * b * mu[i - 1]).reduce())
    return tuple(out)


@pytest.mark.parametrize(
    "flavor,gl,tw",
    [
        ("o", [["natural"]], ["vgamma", 1]),
        ("o", [["natural"], ["dual"]], ["restrict", ["natural"]]),
        ("sp", [["irrep", [1, -1]]], ["trivial"]),
        ("sp", [["natural"]], ["restrict", ["natural"]]),
    ],
)
def test_mixed_highest_weight_is_product_of_factor_weights(flavor, gl, tw):
    form = FormData(flavor, 1)
    spec = ModuleSpec(flavor, 1, tuple(_tup(e) for e in gl), _tup(tw))
    mf = realize(spec)
    expected = product_formula(gl, tw, form)
    got = top_weight(mf)
    assert all(a.equals(b) for a, b in zip(got, expected))
    S = full_operator(mf)
    assert all(a.equals(b) for a, b in zip(twisted_highest_weight(S), expected))


def _tup(e):
    return tuple(_tup(x) for x in e) if isinstance(e, list) else e


def test_mixed_tensor_relations(field):
    for flavor in ("o", "sp"):
        form = FormData(flavor, 1)
        S = mixed_tensor(g_eval(["restrict", ["natural"]], form, field), [gl_eval(["natural"], form, field)])
        assert check_relations(S).holds


def test_sharp_on_identity_and_involution():
    form = FormData("o", 1)
    S = mixed_tensor(g_eval(["restrict", ["natural"]], form), [gl_eval(["natural"], form)])
    assert sharp(sharp(S)).coeffs.equals(S.coeffs)
    Id = twisted_S(identity_T(2, 1, QQ), form)
    assert sharp(Id).coeffs.equals(Id.coeffs)
    assert check_relations(sharp(S)).holds


def test_sharp_refused_for_symplectic():
    with pytest.raises(ValueError):
        sharp(g_eval(["trivial"], FormData("sp", 1)))


def test_sharp_shifts_o2_weight_by_pair_ratio():
    S = g_eval(["vgamma", 1], FormData("o", 1))
    (mu,) = twisted_highest_weight(S)
    _, gamma = recover_pair_o2(mu)
    (mu_sharp,) = twisted_highest_weight(sharp(S))
    assert mu_sharp.equals(sharp_weight(mu, gamma))


def test_rescale_by_one_is_identity_and_preserves_relations():
    S = g_eval(["vgamma", 1], FormData("o", 1))
    assert rescale(S, FactoredRational.one(QQ)).coeffs.equals(S.coeffs)
    g = fr((1, -1), (0, 0))  # 1 - u^{-2}
    Sg = rescale(S, g)
    assert check_quaternary(S).holds and check_quaternary(Sg).holds
    (mu,) = twisted_highest_weight(S)
    (mug,) = twisted_highest_weight(Sg)
    assert mug.equals((mu * g).reduce())


def test_rescale_rejects_odd_series():
    S = g_eval(["vgamma", 1], FormData("o", 1))
    with pytest.raises(ValueError):
        rescale(S, fr((-1,), (0,)))


def test_symmetry_negative_control():
    form = FormData("sp", 1)
    S = twisted_S(gl_eval(["natural"], form), form)
    bad = perturb_entry(S, 1, 0, 1, QQ.eye(S.dim))
    assert not (check_symmetry(bad).holds and check_quaternary(bad).holds)


def test_lower_diagonal_entries_follow_symmetry_relation():
    for flavor in ("o", "sp"):
        form = FormData(flavor, 2)
        S = mixed_tensor(g_eval(["restrict", ["natural"]], form), [gl_eval(["natural"], form)])
        assert check_lower_diagonal(S)


def test_unique_singular_line_and_reducible_control():
    form = FormData("sp", 1)
    assert unique_singular_line(g_eval(["restrict", ["natural"]], form))
    reducible = g_eval(["restrict", ["tensor", ["natural"], ["natural"]]], form)
    assert not unique_singular_line(reducible)


def test_alpha_values():
    assert alpha_N(FormData("o", 1), QQ).equals(FactoredRational.one(QQ))
    # (2u + 1)/(2u - 1) for N = 2
    assert alpha_N(FormData("sp", 1), QQ).equals(fr((-HALF,), (HALF,)))
    assert alpha_N(FormData("sp", 2), QQ).equals(fr((-HALF,), (Fraction(3, 2),)))


@pytest.mark.parametrize("flavor", ["o", "sp"])
@pytest.mark.parametrize("n", [1, 2])
def test_beta_equals_alpha(flavor, n, field):
    form = FormData(flavor, n)
    assert beta_N(form, field, 10).equals(alpha_N(form, field).expand(10))


def test_sdet_of_trivial_symplectic_module():
    form = FormData("sp", 1)
    S = twisted_S(identity_T(2, 1, QQ), form)
    expected = fr((-HALF,), (HALF,)).expand(10)
    assert scalar_of(sdet(S), 10).equals(expected)


@pytest.mark.parametrize("flavor", ["o", "sp"])
def test_sdet_matches_qdet_product_on_evaluation(flavor, field):
    form = FormData(flavor, 1)
    T = gl_eval(["irrep", [1, 0]], form, field)
    S = twisted_S(T, form)
    sd = sdet(S)
    lhs = sd.scalar_series(top_vector(T), 10)
    assert lhs.equals(sdet_from_qdet(T, form, 10))
    assert check_sdet_parity(lhs, form)
    assert check_central(sd, S).holds


def test_zhc_checks_on_trivial_and_evaluation():
    form = FormData("sp", 1)
    assert zhc_decomposition_check(identity_T(2, 1, QQ), form).holds
    rep = zhc_decomposition_check(gl_eval(["irrep", [1, 0]], form), form, (1, 1), 10)
    assert rep.identity and rep.central and rep.normalized_invariant
