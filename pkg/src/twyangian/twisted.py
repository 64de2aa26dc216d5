"""The twisted Yangian Y(g_n) on explicit modules.

S(u) is stored as an :class:`~twyangian.rtt.OperatorMatrix` carrying its
:class:`FormData`; its ``weights`` are g_n-weights, so every s_ij(u) is
homogeneous for the grading.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactalg import (
    DEFAULT_ORDER,
    FactoredRational,
    FArray,
    FieldSpec,
    USeries,
    concatenate,
    kron,
    poly_mul,
    stack,
)
from .liecore import FormData, GModule, gl_to_g_weight, pos, prime_transpose
from .rmatrix import perm_sign
from .rtt import (
    OperatorMatrix,
    OperatorSeries,
    RelationReport,
    _shifted_entries,
    _to_series,
    check_central,
    coproduct_T,
    dtilde,
    extend,
    highest_weight_of_top,
    identity_T,
    neg_u,
    operator_product,
    pair_products,
    prime,
    qdet,
    scalar_multiple,
    singular_vectors,
    upper_positions,
)


def _require_form(S: OperatorMatrix) -> FormData:
    if S.form is None:
        raise ValueError("operator matrix carries no form")
    if S.form.N != S.N:
        raise ValueError("form and matrix size disagree")
    return S.form


def _g_weights(T: OperatorMatrix, form: FormData) -> tuple | None:
    if T.weights is None:
        return None
    return tuple(gl_to_g_weight(w, form.n) for w in T.weights)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def twisted_S(T: OperatorMatrix, form: FormData) -> OperatorMatrix:
    """s_ij(u) = sum_a theta_aj t_ia(u) t_{-j,-a}(-u), i.e. S(u) = T(u) T'(-u)."""
    if T.N != form.N:
        raise ValueError("form and matrix size disagree")
    S = operator_product(T, prime(neg_u(T), form))
    return replace(S, form=form, weights=_g_weights(T, form), top=T.top)


def twisted_eval(M: GModule) -> OperatorMatrix:
    """s_ij(u) = delta_ij + F_ij (u +- 1/2)^{-1}, + for orthogonal and - for symplectic."""
    form = M.form
    if form is None:
        raise ValueError("module needs a form")
    F = M.field
    Fa = M.F_array()
    h = form.half(F)
    N, d = M.N, M.dim
    base = identity_T(N, d, F).coeffs
    # numerator (1 + h x) delta + F x over denominator 1 + h x
    first = base[0] * h + Fa
    coeffs = concatenate([base, first.reshape((1,) + first.shape)])
    g = M.restrict().weights if M.kind == "gl" else M.weights
    return OperatorMatrix(coeffs, (F.one, h), g, M.top, form)


def mixed_tensor(S_V: OperatorMatrix, Ts: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """Coideal action on L(1) (x) ... (x) L(k) (x) V: T~(u) S~(u) T~'(-u), gl factors first."""
    form = _require_form(S_V)
    if not Ts:
        return S_V
    T = coproduct_T(list(Ts))
    if T.N != S_V.N:
        raise ValueError("factors must share N")
    Tt = extend(T, 1, S_V.dim)
    St = extend(S_V, T.dim, 1)
    out = operator_product(operator_product(Tt, St), prime(neg_u(Tt), form))
    weights = None
    gw = _g_weights(T, form)
    if gw is not None and S_V.weights is not None:
        weights = tuple(tuple(a + b for a, b in zip(w1, w2)) for w1 in gw for w2 in S_V.weights)
    top = None if T.top is None or S_V.top is None else T.top * S_V.dim + S_V.top
    return replace(out, form=form, weights=weights, top=top)


def sharp(S: OperatorMatrix) -> OperatorMatrix:
    """s_ij(u) -> s_{i'j'}(u) with 1 and -1 interchanged (orthogonal flavor only)."""
    form = _require_form(S)
    if not form.orthogonal:
        raise ValueError("the sharp automorphism is defined for the orthogonal flavor only")
    n = form.n
    perm = list(range(S.N))
    a, b = pos(1, n), pos(-1, n)
    perm[a], perm[b] = b, a
    coeffs = S.coeffs[:, perm][:, :, perm]
    weights = None
    if S.weights is not None:
        weights = tuple((-w[0],) + tuple(w[1:]) for w in S.weights)
    return replace(S, coeffs=coeffs, weights=weights)


def x_ratio(f: FactoredRational) -> tuple[list, list]:
    """Coefficient lists in x = 1/u of numerator and denominator of a degree-0 rational function."""
    F = f.field
    r = f.reduce()
    if r.excess != 0:
        raise ValueError("function must tend to a constant at infinity")
    num = [r.prefactor]
    for a in r.num:
        num = poly_mul(F, num, [F.one, -a])
    den = [F.one]
    for c in r.den:
        den = poly_mul(F, den, [F.one, -c])
    return num, den


def rescale(S: OperatorMatrix, g: FactoredRational) -> OperatorMatrix:
    """S(u) -> g(u) S(u) for an even g with constant term 1."""
    if not g.has_unit_constant_term():
        raise ValueError("g must have constant term 1")
    if not g.neg_u().equals(g):
        raise ValueError("g must be even")
    num, den = x_ratio(g)
    return scalar_multiple(S, num, den)


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------


# Quaternary relation with x = 1/u, y = 1/v, cleared:
# (y - x - xyP) S1 (x + y + xyP') S2 = S2 (x + y + xyP') S1 (y - x - xyP).
# Each entry: (monomials {(deg x, deg y): c}, side, theta index pair, gather).
# ``gather`` returns the four positions (a, b, c, e) for the product s_ab s_ce,
# with the u-factor first on the left side and the v-factor first on the right.
_QUATERNARY_TERMS = (
    ({(0, 2): 1, (2, 0): -1}, "L", None, lambda i, j, k, l, m: (i, j, k, l)),
    ({(1, 2): 1, (2, 1): -1}, "L", lambda i, j, k, l, m: (m(k), j), lambda i, j, k, l, m: (i, m(k), m(j), l)),
    ({(1, 2): -1, (2, 1): -1}, "L", None, lambda i, j, k, l, m: (k, j, i, l)),
    ({(2, 2): -1}, "L", lambda i, j, k, l, m: (m(i), j), lambda i, j, k, l, m: (k, m(i), m(j), l)),
    ({(0, 2): 1, (2, 0): -1}, "R", None, lambda i, j, k, l, m: (k, l, i, j)),
    ({(1, 2): -1, (2, 1): -1}, "R", None, lambda i, j, k, l, m: (k, j, i, l)),
    ({(1, 2): 1, (2, 1): -1}, "R", lambda i, j, k, l, m: (i, m(l)), lambda i, j, k, l, m: (k, m(i), m(l), j)),
    ({(2, 2): -1}, "R", lambda i, j, k, l, m: (i, m(j)), lambda i, j, k, l, m: (k, m(i), m(j), l)),
)


def check_quaternary(S: OperatorMatrix, cache_limit: int = 64) -> RelationReport:
    """R(u-v) S_1(u) R'(-u-v) S_2(v) = S_2(v) R'(-u-v) S_1(u) R(u-v), coefficientwise in x, y."""
    form = _require_form(S)
    F = S.field
    N, d, D = S.N, S.dim, S.degree
    I, J, K, L = np.meshgrid(*(np.arange(N),) * 4, indexing="ij")
    m = lambda a: N - 1 - a  # noqa: E731
    theta = form.theta_matrix()
    flat = [S.coeffs[r].reshape(N * N, d, d) for r in range(D + 1)]
    cache: dict = {}

    def G(r: int, s: int) -> FArray:
        key = (r, s)
        if key not in cache:
            if len(cache) >= cache_limit:
                cache.pop(next(iter(cache)))
            cache[key] = pair_products(flat[r], flat[s]).reshape(N, N, N, N, d, d)
        return cache[key]

    gathers = []
    for mono, side, th, ga in _QUATERNARY_TERMS:
        idx = ga(I, J, K, L, m)
        tw = None
        if th is not None:
            a, b = th(I, J, K, L, m)
            tw = FArray(F, theta[a, b].reshape(N, N, N, N, 1, 1))
        gathers.append((mono, side, tw, idx))

    for alpha in range(D + 3):
        for beta in range(D + 3):
            res = F.zeros((N, N, N, N, d, d))
            for mono, side, tw, idx in gathers:
                for (a, b), c in mono.items():
                    r, s = alpha - a, beta - b
                    if not (0 <= r <= D and 0 <= s <= D):
                        continue
                    block = G(r, s) if side == "L" else G(s, r)
                    term = block[idx]
                    if tw is not None:
                        term = term * tw
                    res = res + term * (c if side == "L" else -c)
            if not res.is_zero():
                return RelationReport(False, (alpha, beta) + tuple(int(v) for v in res.nonzero_index()[:4]), "quaternary")
    return RelationReport(True)


def _poly_times_scalar(C: FArray, poly: Sequence) -> FArray:
    """Operator polynomial (K, ...) times a scalar polynomial, both in x."""
    F = C.field
    K = C.shape[0]
    out = [F.zeros(C.shape[1:]) for _ in range(K + len(poly) - 1)]
    for k in range(K):
        for j, c in enumerate(poly):
            if c != 0:
                out[k + j] = out[k + j] + C[k] * c
    return stack(out)


def _neg_x(cs: Sequence) -> list:
    return [c if k % 2 == 0 else -c for k, c in enumerate(cs)]


def check_symmetry(S: OperatorMatrix) -> RelationReport:
    """S'(-u) = S(u) +- (S(u) - S(-u)) / (2u), + orthogonal, - symplectic.

    Cleared by 2u den(x) den(-x):
    2 N'(-x) d(x) = 2 N(x) d(-x) +- x (N(x) d(-x) - N(-x) d(x)).
    """
    form = _require_form(S)
    F = S.field
    Sm = neg_u(S)
    Np = prime(Sm, form).coeffs
    Nx, Nmx = S.coeffs, Sm.coeffs
    d, dm = list(S.den), _neg_x(S.den)
    lhs = _poly_times_scalar(Np, [c * 2 for c in d])
    a = _poly_times_scalar(Nx, dm)
    b = _poly_times_scalar(Nmx, d)
    diff = a - b
    shifted = concatenate([F.zeros((1,) + diff.shape[1:]), diff])
    rhs = concatenate([a * 2, F.zeros((1,) + a.shape[1:])]) + shifted * form.sign
    lhs = concatenate([lhs, F.zeros((1,) + lhs.shape[1:])])
    res = lhs - rhs
    if res.is_zero():
        return RelationReport(True)
    return RelationReport(False, res.nonzero_index()[:3], "symmetry")


def check_relations(S: OperatorMatrix) -> RelationReport:
    rep = check_quaternary(S)
    if not rep.holds:
        return rep
    return check_symmetry(S)


# ---------------------------------------------------------------------------
# series helpers
# ---------------------------------------------------------------------------


def expand_matrix(S: OperatorMatrix, order: int = DEFAULT_ORDER) -> FArray:
    """Series coefficients of S(u) through x^order: shape (order+1, N, N, d, d)."""
    F = S.field
    inv = USeries.make(F, S.den, order).inverse()
    out = []
    for k in range(order + 1):
        acc = F.zeros(S.coeffs.shape[1:])
        for j in range(min(k, S.degree) + 1):
            c = inv[k - j]
            if c != 0:
                acc = acc + S.coeffs[j] * c
        out.append(acc)
    return stack(out)


def alpha_N(form: FormData, F: FieldSpec) -> FactoredRational:
    """1 (orthogonal) or (2u+1)/(2u-N+1) (symplectic)."""
    if form.orthogonal:
        return FactoredRational.one(F)
    half = F(Fraction(1, 2))
    return FactoredRational(F, (-half,), (F(form.N - 1) * half,))


# ---------------------------------------------------------------------------
# Sklyanin determinant
# ---------------------------------------------------------------------------


def _apply_leg_matrix(state: FArray, blocks: FArray, leg: int, nlegs: int) -> FArray:
    """Apply an operator matrix polynomial on leg ``leg`` (tensor slot) and the module slot.

    state: (K, N, ..., N, d, d_in); blocks: (R, N, N, d, d) by u-power.
    """
    F = state.field
    Ks = state.shape[0]
    R, N, _, d, _ = blocks.shape
    din = state.shape[-1]
    # move leg and module-out axes next to each other: (K, N_leg, d, rest..., d_in)
    moved = state.moveaxis(1 + leg, 1).moveaxis(1 + nlegs, 2)
    rest_shape = moved.shape[3:]
    mat = moved.reshape(Ks, N * d, -1)
    out = [None] * (Ks + R - 1)
    for r in range(R):
        blk = blocks[r].transpose(0, 2, 1, 3).reshape(N * d, N * d)
        for k in range(Ks):
            prod = blk @ mat[k]
            out[r + k] = prod if out[r + k] is None else out[r + k] + prod
    res = stack(out).reshape((Ks + R - 1, N, d) + rest_shape)
    return res.moveaxis(2, 1 + nlegs).moveaxis(1, 1 + leg)


def _apply_Pprime(state: FArray, form: FormData, a: int, b: int) -> FArray:
    """P' = sum theta_kl E_kl (x) E_{-k,-l} on tensor legs a < b."""
    N = form.N
    theta = form.theta_matrix()
    neg = np.array([N - 1 - p for p in range(N)])
    num = np.moveaxis(state.num, (1 + a, 1 + b), (0, 1))
    diag = num[np.arange(N), neg]  # X[c, -c]
    comb = np.tensordot(theta, diag, axes=([1], [0]))  # sum_c theta_kc X[c, -c]
    if state.field.p:
        comb = comb % state.field.p
    out = np.zeros_like(num)
    out[np.arange(N), neg] = comb
    out = np.moveaxis(out, (0, 1), (1 + a, 1 + b))
    return FArray(state.field, out, state.den).simplify()


def sdet(S: OperatorMatrix, verify: bool = True) -> OperatorSeries:
    """Sklyanin determinant via A_N <S_1, ..., S_N> = A_N sdet S(u).

    <S_1,...,S_N> = S_1 R'_12 ... R'_1N S_2 R'_23 ... S_N with S_i = S(u - i + 1)
    and R'_ij = 1 + P'/(2u - i - j + 2).  The product is applied to the probe
    e_1 (x) ... (x) e_N (positions 0..N-1) with the module left free, and the
    sdet is read off the antisymmetrized result.
    """
    form = _require_form(S)
    F = S.field
    N, d = S.N, S.dim
    shifts = list(range(N))
    shifted, E, dens = _shifted_entries(S, shifts)
    # shifted[i]: (N, N, E+1, d, d) ascending u-powers -> (E+1, N, N, d, d)
    legs_poly = [sh.moveaxis(2, 0) for sh in shifted]
    state_num = np.zeros((1,) + (N,) * N + (d, d), dtype=np.int64)
    state_num[(0,) + tuple(range(N))] = np.eye(d, dtype=np.int64)
    state = FArray(F, state_num)
    den = [F.one]
    for dc in dens:
        den = poly_mul(F, den, dc)
    for i in range(N - 1, -1, -1):
        for j in range(N - 1, i, -1):
            c = F(-(i + 1) - (j + 1) + 2)
            pp = _apply_Pprime(state, form, i, j)
            Ks = state.shape[0]
            zero = F.zeros((1,) + state.shape[1:])
            lin = concatenate([zero, state * 2]) + concatenate([state * c + pp, zero])
            state = lin
            den = poly_mul(F, den, [c, F(2)])
        state = _apply_leg_matrix(state, legs_poly[i], i, N)
    total_deg = N * E + N * (N - 1) // 2
    num = None
    for perm in itertools.permutations(range(N)):
        term = state[(slice(None),) + perm]
        term = term if perm_sign(perm) > 0 else -term
        num = term if num is None else num + term
    series = _to_series(num, den, total_deg, F)
    if verify:
        _verify_antisymmetrized(state, num)
    return series


def _verify_antisymmetrized(state: FArray, sd: FArray) -> None:
    """Check A_N <...> (probe (x) w) = A_N probe (x) sdet w for every w."""
    N = state.ndim - 3
    acc = None
    for perm in itertools.permutations(range(N)):
        axes = (0,) + tuple(1 + p for p in perm) + (N + 1, N + 2)
        t = state.transpose(*axes)
        t = t if perm_sign(perm) > 0 else -t
        acc = t if acc is None else acc + t
    for K in itertools.product(range(N), repeat=N):
        want = sd * perm_sign(K) if len(set(K)) == N else sd * 0
        if not acc[(slice(None),) + K].equals(want):
            raise ArithmeticError(f"antisymmetrized product is not proportional to the probe at {K}")


def beta_N(form: FormData, F: FieldSpec, order: int = DEFAULT_ORDER) -> USeries:
    """A_N <I, ..., I> = A_N beta_N(u), read on the trivial module."""
    T = identity_T(form.N, 1, F)
    S = replace(T, form=form)
    return scalar_of(sdet(S), order)


def scalar_of(series: OperatorSeries, order: int = DEFAULT_ORDER, vector: FArray | None = None) -> USeries:
    """Scalar series of an operator series on ``vector`` (default: first basis vector, requires a scalar operator)."""
    F = series.field
    if vector is None:
        if not series.is_scalar():
            raise ValueError("operator series is not scalar")
        vector = FArray(F, np.eye(series.dim, dtype=np.int64)[0])
    return series.scalar_series(vector, order)


def top_vector(M: OperatorMatrix) -> FArray:
    num = np.zeros(M.dim, dtype=np.int64)
    num[M.top] = 1
    return FArray(M.field, num)


def sdet_from_qdet(T: OperatorMatrix, form: FormData, order: int = DEFAULT_ORDER) -> USeries:
    """alpha_N(u) qdet T(u) qdet T(-u+N-1) on the top vector."""
    F = T.field
    v = top_vector(T)
    q = qdet(T).scalar_series(v, order)
    q2 = q.neg_u().shift(form.N - 1)
    return alpha_N(form, F).expand(order) * q * q2


def check_sdet_parity(sd: USeries, form: FormData) -> bool:
    """alpha_N(-u+N-1) sdet(u) = alpha_N(u) sdet(-u+N-1)."""
    F = sd.field
    a = alpha_N(form, F)
    a_ref = a.neg_u().shift(-(form.N - 1))
    a_ref_s = a_ref.expand(sd.order)
    refl = sd.neg_u().shift(form.N - 1)
    return (a_ref_s * sd).equals(a.expand(sd.order) * refl)


# ---------------------------------------------------------------------------
# Harish-Chandra centre decomposition checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZhcReport:
    identity: bool
    central: bool
    normalized_invariant: bool
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.identity and self.central and self.normalized_invariant


def _dd(T: OperatorMatrix, order: int) -> tuple[USeries, USeries]:
    """(d~ from qdet on the top vector, d~(u) d~(-u))."""
    q = qdet(T).scalar_series(top_vector(T), order)
    dt = dtilde(q, T.N)
    return dt, dt * dt.neg_u()


def zhc_decomposition_check(
    T: OperatorMatrix, form: FormData, f: Sequence = (1, 1), order: int = 10
) -> ZhcReport:
    """(a) alpha^{-1} sdet = prod_i d~(u-i) d~(-u+i); (b) sdet central; (c) s~ invariant under T -> f T."""
    F = T.field
    N = form.N
    S = twisted_S(T, form)
    sd_op = sdet(S)
    v = top_vector(T)
    sd = sd_op.scalar_series(v, order)
    dt, ddm = _dd(T, order)
    prod = USeries.one(F, order)
    for i in range(N):
        prod = prod * dt.shift(i) * dt.neg_u().shift(i)
    lhs = alpha_N(form, F).expand(order).inverse() * sd
    ident = lhs.equals(prod)
    central = check_central(sd_op, S).holds
    # (c) normalized matrix before and after T -> f(u) T(u)
    Tf = scalar_multiple(T, list(f))
    Sf = twisted_S(Tf, form)
    _, ddm_f = _dd(Tf, order)
    a = _normalized(S, ddm, order)
    b = _normalized(Sf, ddm_f, order)
    inv = a.equals(b)
    detail = "" if ident else f"first mismatch at {lhs.first_mismatch(prod)}"
    return ZhcReport(ident, central, inv, detail)


def _normalized(S: OperatorMatrix, ddm: USeries, order: int) -> FArray:
    ex = expand_matrix(S, order)
    inv = ddm.inverse()
    F = S.field
    out = []
    for k in range(order + 1):
        acc = F.zeros(ex.shape[1:])
        for j in range(k + 1):
            c = inv[k - j]
            if c != 0:
                acc = acc + ex[j] * c
        out.append(acc)
    return stack(out)


# ---------------------------------------------------------------------------
# twisted highest weights
# ---------------------------------------------------------------------------


def twisted_highest_weight(S: OperatorMatrix) -> tuple[FactoredRational, ...]:
    """(mu_1(u), ..., mu_n(u)) on the designated top vector, which must be singular."""
    return highest_weight_of_top(S, mode="twisted")


def check_lower_diagonal(S: OperatorMatrix, order: int = DEFAULT_ORDER) -> bool:
    """s_{-i,-i}(u) xi = [mu_i(-u) +- (mu_i(u) - mu_i(-u))/(2u)] xi on the top vector."""
    form = _require_form(S)
    F = S.field
    v = top_vector(S)
    half = F(Fraction(1, 2))
    x = USeries.make(F, [0, 1], order)
    for i in range(1, form.n + 1):
        p, q = pos(i, form.n), pos(-i, form.n)
        mu = OperatorSeries(S.entry(p, p), S.den).scalar_series(v, order)
        got = OperatorSeries(S.entry(q, q), S.den).on_vector(v)
        if got is None:
            return False
        lower = USeries.make(F, got[0], order) / USeries.make(F, got[1], order)
        want = mu.neg_u() + x * (mu - mu.neg_u()) * half * form.sign
        if not lower.equals(want):
            return False
    return True


def unique_singular_line(S: OperatorMatrix) -> bool:
    return len(singular_vectors(S, mode="twisted")) == 1


# ---------------------------------------------------------------------------
# highest weights without assembling the full operator matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MixedFactors:
    """L(1) (x) ... (x) L(k) (x) V kept as separate factors, with a singular vector in each.

    ``gl`` holds the Yangian matrices T of the gl factors, ``S_V`` the twisted
    matrix of V.  ``scale`` is an optional even scalar (num, den) in x that
    multiplies S(u).
    """

    form: FormData
    gl: tuple
    gl_tops: tuple
    S_V: OperatorMatrix
    v_top: FArray
    scale: tuple | None = None

    @property
    def field(self) -> FieldSpec:
        return self.S_V.field

    @property
    def dims(self) -> tuple:
        return tuple(T.dim for T in self.gl) + (self.S_V.dim,)

    def top(self) -> FArray:
        v = self.gl_tops[0] if self.gl_tops else self.v_top
        for w in list(self.gl_tops[1:]) + ([self.v_top] if self.gl_tops else []):
            v = kron(v.reshape(1, -1), w.reshape(1, -1)).reshape(-1)
        return v


def unit_vector(F: FieldSpec, d: int, k: int) -> FArray:
    num = np.zeros(d, dtype=np.int64)
    num[k] = 1
    return FArray(F, num)


def _neg_coeffs(C: FArray) -> FArray:
    signs = np.array([(-1) ** r for r in range(C.shape[0])], dtype=np.int64)
    return FArray(C.field, C.num * signs.reshape((-1,) + (1,) * (C.ndim - 1)), C.den).simplify()


def _act(state: FArray, C: FArray, leg: int) -> FArray:
    """Contract the open aux axis (1) and tensor slot ``leg`` of ``state`` with coefficients C.

    state: (R, N, ...); C: (S, N, N, d, d).  Returns (R + S - 1, N, ...).
    """
    R = state.shape[0]
    S, N, _, d, _ = C.shape
    st = state.moveaxis([1, leg], [0, 1])
    other = st.shape[3:]
    mat = st.reshape(N * d, -1)
    op = C.transpose(0, 1, 3, 2, 4).reshape(S * N * d, N * d)
    prod = (op @ mat).reshape((S, N, d, R) + other)
    out = [None] * (R + S - 1)
    for s in range(S):
        for r in range(R):
            piece = prod[s, :, :, r]
            out[r + s] = piece if out[r + s] is None else out[r + s] + piece
    return stack(out).moveaxis(2, leg)


def apply_to_top(mf: MixedFactors) -> tuple[FArray, list]:
    """Numerators Y[r, p, q, ...] of s_pq(u) applied to the product of tops, and the common denominator."""
    F = mf.field
    form = mf.form
    N = form.N
    k = len(mf.gl)
    dims = mf.dims
    den = [F.one]
    # delta_{aq} (x) xi_1 (x) ... (x) xi_k
    num = np.zeros((1, N, N), dtype=np.int64)
    num[0, np.arange(N), np.arange(N)] = 1
    state = FArray(F, num)
    for xi in mf.gl_tops:
        state = kron(state.reshape(-1, 1), xi.reshape(1, -1)).reshape(state.shape + (xi.shape[0],))
    # W_pq = t~_pq(-u) xi, factors applied from the last one
    for m in range(k - 1, -1, -1):
        T = mf.gl[m]
        state = _act(state, _neg_coeffs(T.coeffs), 3 + m)
        den = poly_mul(F, den, _neg_x(T.den))
    # T~'(-u): prime transpose on the two aux axes
    state = prime_transpose(state.moveaxis(0, 2), form).moveaxis(2, 0)
    state = kron(state.reshape(-1, 1), mf.v_top.reshape(1, -1)).reshape(state.shape + (dims[-1],))
    # S~_V acts on V and the left aux axis
    state = _act(state, mf.S_V.coeffs, 3 + k)
    den = poly_mul(F, den, list(mf.S_V.den))
    for m in range(k - 1, -1, -1):
        T = mf.gl[m]
        state = _act(state, T.coeffs, 3 + m)
        den = poly_mul(F, den, list(T.den))
    if mf.scale is not None:
        snum, sden = mf.scale
        coeffs = [state[r] for r in range(state.shape[0])]
        out = [None] * (len(coeffs) + len(snum) - 1)
        for i, c in enumerate(snum):
            c = F(c)
            if c == 0:
                continue
            for r, blk in enumerate(coeffs):
                piece = blk * c
                out[i + r] = piece if out[i + r] is None else out[i + r] + piece
        out = [F.zeros(coeffs[0].shape) if o is None else o for o in out]
        state = stack(out)
        den = poly_mul(F, den, [F(c) for c in sden])
    return state, den


def top_weight(mf: MixedFactors) -> tuple[FactoredRational, ...]:
    """(mu_1, ..., mu_n) on the product of factor tops, after checking it is singular."""
    F = mf.field
    form = mf.form
    n, N = form.n, form.N
    Y, den = apply_to_top(mf)
    flat = Y.reshape(Y.shape[0], N, N, -1)
    for p, q in upper_positions(N):
        if not flat[:, p, q].is_zero():
            raise ValueError(f"the top vector is not singular: s at positions ({p}, {q}) does not kill it")
    xi = mf.top()
    k = int(xi.nonzero_index()[0])
    pivot = xi.scalar((k,))
    out = []
    for p in range(n, N):
        col = flat[:, p, p]
        coeffs = [col.scalar((r, k)) / pivot for r in range(col.shape[0])]
        for r, c in enumerate(coeffs):
            if not (col[r] - xi * c).is_zero():
                raise ValueError(f"the top vector is not an eigenvector of the diagonal entry {p}")
        out.append(FactoredRational.from_x_ratio(F, coeffs, den))
    return tuple(out)


def _unique_line(lines, what: str) -> FArray:
    if len(lines) != 1:
        raise ValueError(f"{what} has {len(lines)} singular lines, expected one")
    return lines[0].vector


def _swap_perm(form: FormData) -> list[int]:
    n = form.n
    perm = list(range(form.N))
    a, b = pos(1, n), pos(-1, n)
    perm[a], perm[b] = b, a
    return perm


def sharp_factors(mf: MixedFactors) -> MixedFactors:
    """The same factors composed with the sharp automorphism.

    Conjugating every factor by the permutation of 1 and -1 realizes S^sharp on
    the product; each factor then gets a new singular vector of its own.
    """
    form = mf.form
    if not form.orthogonal:
        raise ValueError("the sharp automorphism is defined for the orthogonal flavor only")
    perm = _swap_perm(form)
    gl, tops = [], []
    for T in mf.gl:
        w = None if T.weights is None else tuple(tuple(wt[i] for i in perm) for wt in T.weights)
        Ts = replace(T, coeffs=T.coeffs[:, perm][:, :, perm], weights=w, top=None)
        gl.append(Ts)
        tops.append(_unique_line(singular_vectors(Ts, "gl"), "a sharp gl factor"))
    Sv = replace(sharp(mf.S_V), top=None)
    vtop = _unique_line(singular_vectors(Sv, "twisted"), "the sharp twisted factor")
    return MixedFactors(form, tuple(gl), tuple(tops), Sv, vtop, mf.scale)


def full_operator(mf: MixedFactors) -> OperatorMatrix:
    """The assembled S(u) on the whole product (small modules only)."""
    S = mixed_tensor(mf.S_V, list(mf.gl))
    if mf.scale is not None:
        S = scalar_multiple(S, list(mf.scale[0]), list(mf.scale[1]))
    return S
