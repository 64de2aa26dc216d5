"""The Yangian Y(gl_N) acting on explicit modules.

An :class:`OperatorMatrix` stores an N x N matrix of module operators that
depend on u as ``num(x) / den(x)`` with x = u^{-1}: ``coeffs[r, p, q]`` is the
d x d matrix multiplying x^r in entry (p, q) and ``den`` is a scalar
polynomial in x with constant term 1.  All relations checked here are
homogeneous in the matrix, so they are checked on the numerator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .exactalg import (
    DEFAULT_ORDER,
    FactoredRational,
    FArray,
    FieldSpec,
    USeries,
    concatenate,
    kron,
    nullspace,
    poly_mul,
    stack,
)
from .liecore import FormData, GModule
from .rmatrix import perm_sign


# ---------------------------------------------------------------------------
# operator matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """N x N operator-valued rational function of u, polynomial numerator in u^{-1}."""

    coeffs: FArray
    den: tuple
    weights: tuple | None = None
    top: int | None = None
    form: FormData | None = None

    def __post_init__(self):
        if self.coeffs.ndim != 5:
            raise ValueError("coeffs must have shape (D+1, N, N, d, d)")
        if not self.den or self.den[0] != 1:
            raise ValueError("denominator must have constant term 1")

    @property
    def field(self) -> FieldSpec:
        return self.coeffs.field

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def N(self) -> int:
        return self.coeffs.shape[1]

    @property
    def dim(self) -> int:
        return self.coeffs.shape[3]

    def entry(self, p: int, q: int) -> FArray:
        """Numerator coefficients of entry (p, q) by position: shape (D+1, d, d)."""
        return self.coeffs[:, p, q]

    def trimmed(self) -> "OperatorMatrix":
        D = self.degree
        while D > 0 and self.coeffs[D].is_zero():
            D -= 1
        return replace(self, coeffs=self.coeffs[: D + 1])

    def block(self, r: int) -> FArray:
        """Coefficient r as an (N d) x (N d) block matrix."""
        N, d = self.N, self.dim
        return self.coeffs[r].transpose(0, 2, 1, 3).reshape(N * d, N * d)

    def den_series(self, order: int = DEFAULT_ORDER) -> USeries:
        return USeries.make(self.field, self.den, order)

    def reduce_to(self, target: FieldSpec) -> "OperatorMatrix":
        w = None
        if self.weights is not None:
            w = tuple(tuple(target(x) for x in wt) for wt in self.weights)
        den = tuple(target(c) for c in self.den)
        return replace(self, coeffs=self.coeffs.with_field(target), den=den, weights=w)


def _from_blocks(blocks: FArray, N: int, d: int) -> FArray:
    """(R, N d, N d) -> (R, N, N, d, d)."""
    R = blocks.shape[0]
    return blocks.reshape(R, N, d, N, d).transpose(0, 1, 3, 2, 4)


def identity_T(N: int, d: int, F: FieldSpec) -> OperatorMatrix:
    eye = np.zeros((1, N, N, d, d), dtype=np.int64)
    for p in range(N):
        eye[0, p, p] = np.eye(d, dtype=np.int64)
    return OperatorMatrix(FArray(F, eye), (F.one,))


def evaluation_T(M: GModule) -> OperatorMatrix:
    """t_ij(u) = delta_ij + E_ij u^{-1}."""
    if M.kind != "gl":
        raise ValueError("the evaluation homomorphism needs a gl_N-module")
    F = M.field
    base = identity_T(M.N, M.dim, F).coeffs
    coeffs = concatenate([base, M.action.reshape((1,) + M.action.shape)])
    return OperatorMatrix(coeffs, (F.one,), M.weights, M.top, M.form)


def scalar_multiple(T: OperatorMatrix, num: Sequence, den: Sequence = (1,)) -> OperatorMatrix:
    """f(u) T(u) for f = num(x)/den(x) given by coefficient lists in x."""
    F = T.field
    num = [F(c) for c in num]
    den = [F(c) for c in den]
    if num[0] != 1 or den[0] != 1:
        raise ValueError("f must have constant term 1")
    D = T.degree + len(num) - 1
    out = None
    for k, c in enumerate(num):
        if c == 0:
            continue
        part = T.coeffs * c
        pad = [F.zeros((k,) + T.coeffs.shape[1:])] if k else []
        tail = [F.zeros((D - T.degree - k,) + T.coeffs.shape[1:])] if D - T.degree - k else []
        part = concatenate(pad + [part] + tail)
        out = part if out is None else out + part
    return replace(T, coeffs=out, den=tuple(poly_mul(F, list(T.den), den)))


def neg_u(T: OperatorMatrix) -> OperatorMatrix:
    """T(-u)."""
    F = T.field
    signs = np.array([(-1) ** r for r in range(T.degree + 1)], dtype=np.int64).reshape(-1, 1, 1, 1, 1)
    coeffs = FArray(F, T.coeffs.num * signs, T.coeffs.den)
    den = tuple(c if k % 2 == 0 else -c for k, c in enumerate(T.den))
    return replace(T, coeffs=coeffs, den=den)


def prime(T: OperatorMatrix, form: FormData) -> OperatorMatrix:
    """T'(u): entries theta_ij t_{-j,-i}(u)."""
    from .liecore import prime_transpose

    moved = T.coeffs.moveaxis(0, 2)  # (N, N, R, d, d)
    out = prime_transpose(moved, form).moveaxis(2, 0)
    return replace(T, coeffs=out)


def extend(T: OperatorMatrix, left: int = 1, right: int = 1) -> OperatorMatrix:
    """T acting on K^left (x) M (x) K^right."""
    if left == 1 and right == 1:
        return T
    F = T.field
    R, N, _, d, _ = T.coeffs.shape
    flat = T.coeffs.reshape(R * N * N, d, d)
    mats = []
    IL, IR = F.eye(left), F.eye(right)
    for a in range(R * N * N):
        m = flat[a]
        if left > 1:
            m = kron(IL, m)
        if right > 1:
            m = kron(m, IR)
        mats.append(m)
    D = left * d * right
    return replace(T, coeffs=stack(mats).reshape(R, N, N, D, D), weights=None, top=None)


def operator_product(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    """(A B)_ij = sum_a A_ia B_aj with operators composed on the same module."""
    if A.N != B.N or A.dim != B.dim:
        raise ValueError("operator matrices do not match")
    F = A.field
    N, d = A.N, A.dim
    Ra, Rb = A.degree + 1, B.degree + 1
    left = stack([A.block(r) for r in range(Ra)]).reshape(Ra * N * d, N * d)
    right = stack([B.block(s) for s in range(Rb)]).transpose(1, 0, 2).reshape(N * d, Rb * N * d)
    prod = (left @ right).reshape(Ra, N * d, Rb, N * d)
    out = [F.zeros((N * d, N * d)) for _ in range(Ra + Rb - 1)]
    for r in range(Ra):
        for s in range(Rb):
            out[r + s] = out[r + s] + prod[r, :, s, :]
    coeffs = _from_blocks(stack(out), N, d)
    den = tuple(poly_mul(F, list(A.den), list(B.den)))
    return OperatorMatrix(coeffs, den, A.weights, A.top, A.form or B.form)


def coproduct_T(factors: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """t_ij = sum_a t_ia (x) t_aj on the tensor product of the factor modules."""
    if not factors:
        raise ValueError("need at least one factor")
    out = factors[0]
    for nxt in factors[1:]:
        out = _coproduct2(out, nxt)
    return out


def _coproduct2(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    if A.N != B.N:
        raise ValueError("factors must share N")
    F = A.field
    N, da, db = A.N, A.dim, B.dim
    Ra, Rb = A.degree + 1, B.degree + 1
    an, bn = A.coeffs.num, B.coeffs.num
    big = F.p == 0 and (
        an.dtype == object
        or bn.dtype == object
        or int(np.abs(an).max(initial=0)) * int(np.abs(bn).max(initial=0)) * N * min(Ra, Rb) >= 2**62
    )
    if big:
        an, bn = an.astype(object), bn.astype(object)
    # out[r+s, i, j, (p, p'), (q, q')] = sum_a A[r, i, a, p, q] B[s, a, j, p', q']
    out = np.zeros((Ra + Rb - 1, N, N, da, db, da, db), dtype=an.dtype)
    for r in range(Ra):
        for s in range(Rb):
            term = np.einsum("iapq,ajst->ijpsqt", an[r], bn[s])
            out[r + s] += term if not F.p else term % F.p
    coeffs = FArray(F, out.reshape(Ra + Rb - 1, N, N, da * db, da * db), A.coeffs.den * B.coeffs.den).simplify()
    weights = None
    if A.weights is not None and B.weights is not None:
        weights = tuple(tuple(x + y for x, y in zip(wa, wb)) for wa in A.weights for wb in B.weights)
    top = None if A.top is None or B.top is None else A.top * db + B.top
    den = tuple(poly_mul(F, list(A.den), list(B.den)))
    return OperatorMatrix(coeffs, den, weights, top, A.form or B.form)


# ---------------------------------------------------------------------------
# pairwise products of coefficient blocks
# ---------------------------------------------------------------------------


def pair_products(X: FArray, Y: FArray) -> FArray:
    """out[a, b] = X[a] @ Y[b] for stacks X (A, d, d) and Y (B, d, d), one matmul."""
    A, d, _ = X.shape
    B = Y.shape[0]
    left = X.reshape(A * d, d)
    right = Y.transpose(1, 0, 2).reshape(d, B * d)
    return (left @ right).reshape(A, d, B, d).transpose(0, 2, 1, 3)


# ---------------------------------------------------------------------------
# ternary relation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationReport:
    holds: bool
    location: tuple | None = None
    detail: str = ""


def check_ternary(T: OperatorMatrix) -> RelationReport:
    """(u - v)[t_ij(u), t_kl(v)] = t_kj(u) t_il(v) - t_kj(v) t_il(u), coefficientwise.

    In coefficients: [t_ij^(r+1), t_kl^(s)] - [t_ij^(r), t_kl^(s+1)]
    = t_kj^(r) t_il^(s) - t_kj^(s) t_il^(r) for all r, s >= 0.
    """
    F = T.field
    N, d, D = T.N, T.dim, T.degree
    C = concatenate([T.coeffs, F.zeros((1,) + T.coeffs.shape[1:])])  # t^(D+1) = 0
    flat = C.reshape((D + 2) * N * N, d, d)
    prods = pair_products(flat, flat).reshape(D + 2, N, N, D + 2, N, N, d, d)
    ii, jj, kk, ll = np.meshgrid(*(np.arange(N),) * 4, indexing="ij")
    for r in range(D + 1):
        for s in range(D + 1):
            lhs = (
                prods[r + 1, ii, jj, s, kk, ll]
                - prods[s, kk, ll, r + 1, ii, jj]
                - prods[r, ii, jj, s + 1, kk, ll]
                + prods[s + 1, kk, ll, r, ii, jj]
            )
            rhs = prods[r, kk, jj, s, ii, ll] - prods[s, kk, jj, r, ii, ll]
            diff = lhs - rhs
            if not diff.is_zero():
                loc = diff.nonzero_index()
                return RelationReport(False, (r, s) + tuple(int(x) for x in loc[:4]), "ternary")
    return RelationReport(True)


def perturb_entry(T: OperatorMatrix, r: int, p: int, q: int, delta: FArray) -> OperatorMatrix:
    """Add ``delta`` to the numerator coefficient t_pq^(r) (negative controls)."""
    num = T.coeffs.copy()
    blocks = [num[k] for k in range(T.degree + 1)]
    mat = blocks[r].reshape(T.N * T.N, T.dim, T.dim)
    mats = [mat[a] for a in range(T.N * T.N)]
    mats[p * T.N + q] = mats[p * T.N + q] + delta
    blocks[r] = stack(mats).reshape(T.N, T.N, T.dim, T.dim)
    return replace(T, coeffs=stack(blocks))


# ---------------------------------------------------------------------------
# polynomials in u with operator coefficients
# ---------------------------------------------------------------------------


def _upoly_of_numerator(T: OperatorMatrix, E: int) -> FArray:
    """u^E num(1/u) per entry: shape (N, N, E+1, d, d), ascending powers of u."""
    F = T.field
    D = T.degree
    parts = []
    for k in range(E + 1):
        r = E - k
        parts.append(T.coeffs[r] if r <= D else F.zeros(T.coeffs.shape[1:]))
    return stack(parts, axis=2)


def _shift_upoly(P: FArray, c, axis: int) -> FArray:
    """Coefficients of P(u - c) along ``axis`` (ascending powers)."""
    F = P.field
    c = F(c)
    K = P.shape[axis]
    M = [[F.zero] * K for _ in range(K)]
    for k in range(K):
        for j in range(k + 1):
            M[j][k] = F(math.comb(k, j)) * (-c) ** (k - j)
    return P.apply_along(F.array(M), axis)


def _scalar_upoly(den: Sequence, E: int, F: FieldSpec) -> list:
    """u^E den(1/u) ascending."""
    return [F(den[E - k]) if E - k < len(den) else F.zero for k in range(E + 1)]


def _shift_scalar_upoly(cs: list, c, F: FieldSpec) -> list:
    from .exactalg import poly_shift_coeffs

    return poly_shift_coeffs(F, cs, -F(c))


def upoly_mul(A: FArray, B: FArray) -> FArray:
    """Product of operator polynomials given as (Ka, d, d) and (Kb, d, d)."""
    F = A.field
    Ka, Kb = A.shape[0], B.shape[0]
    prods = pair_products(A, B)
    out = [F.zeros(A.shape[1:]) for _ in range(Ka + Kb - 1)]
    for a in range(Ka):
        for b in range(Kb):
            out[a + b] = out[a + b] + prods[a, b]
    return stack(out)


@dataclass(frozen=True, eq=False)
class OperatorSeries:
    """A single operator-valued rational function num(x)/den(x)."""

    num: FArray  # (K+1, d, d)
    den: tuple

    @property
    def field(self) -> FieldSpec:
        return self.num.field

    @property
    def dim(self) -> int:
        return self.num.shape[1]

    def expand(self, order: int = DEFAULT_ORDER) -> FArray:
        """Operator coefficients of the series through x^order: shape (order+1, d, d)."""
        F = self.field
        inv = USeries.make(F, self.den, order).inverse()
        K = self.num.shape[0]
        out = []
        for k in range(order + 1):
            acc = F.zeros((self.dim, self.dim))
            for j in range(min(k, K - 1) + 1):
                c = inv[k - j]
                if c != 0:
                    acc = acc + self.num[j] * c
            out.append(acc)
        return stack(out)

    def on_vector(self, v: FArray) -> tuple[list, list] | None:
        """(num coefficients, den) of the scalar by which the series acts on v, or None."""
        F = self.field
        d = self.dim
        imgs = (self.num.reshape(-1, d) @ v.reshape(d, 1)).reshape(self.num.shape[0], d)
        p = v.nonzero_index()[0]
        vp = v.scalar(p)
        coeffs = []
        for k in range(self.num.shape[0]):
            c = imgs.scalar((k, p)) / vp
            if not (imgs[k] - v * c).is_zero():
                return None
            coeffs.append(c)
        return coeffs, list(self.den)

    def scalar_series(self, v: FArray, order: int = DEFAULT_ORDER) -> USeries:
        got = self.on_vector(v)
        if got is None:
            raise ValueError("vector is not an eigenvector")
        num, den = got
        return USeries.make(self.field, num, order) / USeries.make(self.field, den, order)

    def is_scalar(self) -> bool:
        d = self.dim
        F = self.field
        for k in range(self.num.shape[0]):
            c = self.num[k].scalar((0, 0))
            if not self.num[k].equals(F.eye(d) * c):
                return False
        return True


def _shifted_entries(T: OperatorMatrix, shifts: Sequence) -> tuple[list[FArray], int, list]:
    E = max(T.degree, len(T.den) - 1)
    base = _upoly_of_numerator(T, E)
    F = T.field
    shifted = [_shift_upoly(base, c, axis=2) for c in shifts]
    dens = []
    dbase = _scalar_upoly(T.den, E, F)
    for c in shifts:
        dens.append(_shift_scalar_upoly(dbase, c, F))
    return shifted, E, dens


def _to_series(num_u: FArray, den_u: list, total: int, F: FieldSpec) -> OperatorSeries:
    """num_u(u)/den_u(u), both of u-degree <= total, rewritten in x = 1/u."""
    K = num_u.shape[0]
    pad = total + 1 - K
    if pad > 0:
        num_u = concatenate([num_u, F.zeros((pad,) + num_u.shape[1:])])
    numx = stack([num_u[total - k] for k in range(total + 1)])
    dcs = list(den_u) + [F.zero] * (total + 1 - len(den_u))
    denx = [dcs[total - k] for k in range(total + 1)]
    lead = denx[0]
    if lead == 0:
        raise ZeroDivisionError("denominator degenerates")
    inv = F.one / lead
    while len(denx) > 1 and denx[-1] == 0:
        denx.pop()
    return OperatorSeries(numx * inv, tuple(c * inv for c in denx))


def _perm_sum(shifted: list[FArray], N: int, entry: Callable, d: int, F: FieldSpec) -> FArray:
    """sum_sigma sgn(sigma) prod_k shifted[k][entry(k, sigma(k))], products taken left to right."""
    total = None

    def rec(k: int, used: tuple, acc: FArray | None, sign_perm: list):
        nonlocal total
        if k == N:
            s = perm_sign(sign_perm)
            term = acc if s > 0 else -acc
            total = term if total is None else total + term
            return
        for r in range(N):
            if r in used:
                continue
            p, q = entry(k, r)
            mat = shifted[k][p, q]
            nxt = mat if acc is None else upoly_mul(acc, mat)
            rec(k + 1, used + (r,), nxt, sign_perm + [r])

    rec(0, (), None, [])
    return total


def qdet(T: OperatorMatrix, form: str = "column", pi: Sequence[int] | None = None) -> OperatorSeries:
    """Quantum determinant by permutation sums.

    column: sgn(pi) sum_sigma sgn(sigma) t_{sigma(1),pi(1)}(u) ... t_{sigma(N),pi(N)}(u-N+1)
    row:    sgn(pi) sum_sigma sgn(sigma) t_{pi(1),sigma(1)}(u-N+1) ... t_{pi(N),sigma(N)}(u)
    """
    N = T.N
    F = T.field
    pi = list(range(N)) if pi is None else list(pi)
    if form == "column":
        shifts = list(range(N))
        entry = lambda k, r: (r, pi[k])  # noqa: E731
    elif form == "row":
        shifts = list(range(N - 1, -1, -1))
        entry = lambda k, r: (pi[k], r)  # noqa: E731
    else:
        raise ValueError("form must be 'column' or 'row'")
    shifted, E, dens = _shifted_entries(T, shifts)
    num = _perm_sum(shifted, N, entry, T.dim, F)
    if perm_sign(pi) < 0:
        num = -num
    den = [F.one]
    for dc in dens:
        den = poly_mul(F, den, dc)
    return _to_series(num, den, E * N, F)


def check_qdet_antisymmetrizer(T: OperatorMatrix) -> RelationReport:
    """A_N T_1 ... T_N = A_N qdet and T_N ... T_1 A_N = qdet A_N, read off componentwise.

    Row id of A_N T_1...T_N: for every column multi-index J, sum over
    permutations K of sgn(K) t_{k1 j1}(u) ... t_{kN jN}(u-N+1) equals sgn(J) qdet
    when J is a permutation and 0 otherwise; similarly for the reversed product.
    """
    N = T.N
    F = T.field
    q = qdet(T)
    shifted, E, dens = _shifted_entries(T, range(N))
    rshifted, _, _ = _shifted_entries(T, range(N - 1, -1, -1))
    den = [F.one]
    for dc in dens:
        den = poly_mul(F, den, dc)
    # both products clear the same denominators as qdet, so numerators compare exactly
    for J in itertools.product(range(N), repeat=N):
        target = q.num * perm_sign(J) if len(set(J)) == N else q.num * 0
        left = _to_series(_perm_sum(shifted, N, lambda k, r: (r, J[k]), T.dim, F), den, E * N, F)
        if not left.num.equals(target):
            return RelationReport(False, ("A T", J))
        right = _reverse_sum(rshifted, J, den, E, F)
        if not right.num.equals(target):
            return RelationReport(False, ("T A", J))
    return RelationReport(True)


def _reverse_sum(shifted: list[FArray], J: Sequence[int], den: list, E: int, F: FieldSpec) -> OperatorSeries:
    """sum_K sgn(K) t_{J_N K_N}(u-N+1) ... t_{J_1 K_1}(u); ``shifted`` lists shifts N-1, ..., 0."""
    N = len(J)
    total = None
    for K in itertools.permutations(range(N)):
        acc = None
        for step in range(N):
            leg = N - 1 - step
            mat = shifted[step][J[leg], K[leg]]
            acc = mat if acc is None else upoly_mul(acc, mat)
        term = acc if perm_sign(K) > 0 else -acc
        total = term if total is None else total + term
    return _to_series(total, den, E * N, F)


def check_central(series: OperatorSeries, T: OperatorMatrix) -> RelationReport:
    """Every coefficient of ``series`` commutes with every numerator coefficient of T."""
    N, d = T.N, T.dim
    X = series.num
    Y = T.coeffs.reshape(-1, d, d)
    xy = pair_products(X, Y)
    yx = pair_products(Y, X).transpose(1, 0, 2, 3)
    diff = xy - yx
    if diff.is_zero():
        return RelationReport(True)
    return RelationReport(False, diff.nonzero_index()[:2], "commutator")


def dtilde(q: USeries, N: int) -> USeries:
    """The series with constant term 1 and d(u) d(u-1) ... d(u-N+1) = q(u)."""
    F = q.field
    if F(N) == 0:
        raise ZeroDivisionError(f"N = {N} vanishes in the field")
    if q[0] != 1:
        raise ValueError("q must have constant term 1")
    O = q.order
    coeffs = [F.one] + [F.zero] * O
    invN = F.one / F(N)
    for k in range(1, O + 1):
        trial = USeries.make(F, coeffs, O)
        prod = shifted_product(trial, N)
        coeffs[k] = (q[k] - prod[k]) * invN
    return USeries.make(F, coeffs, O)


def shifted_product(d: USeries, N: int) -> USeries:
    """d(u) d(u-1) ... d(u-N+1)."""
    out = USeries.one(d.field, d.order)
    for i in range(N):
        out = out * d.shift(i)
    return out


# ---------------------------------------------------------------------------
# singular vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SingularLine:
    vector: FArray
    weight: tuple | None  # weight-grading label of the line
    series: tuple | None  # diagonal eigen-series as (num, den) coefficient lists in x, or None


def upper_positions(N: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(N) for q in range(N) if p < q]


def singular_vectors(T: OperatorMatrix, mode: str = "gl", weights: Sequence | None = None, only_weight=None) -> list[SingularLine]:
    """Joint kernel of all coefficients of t_ij(u), i < j, split into weight lines.

    ``mode`` picks the diagonal entries reported: all of them (gl) or those
    with positive index (twisted).  The grading comes from ``weights`` or
    from T itself.
    """
    F = T.field
    N, d = T.N, T.dim
    weights = T.weights if weights is None else weights
    if mode == "gl":
        diag = list(range(N))
    elif mode == "twisted":
        diag = list(range(N // 2, N))
    else:
        raise ValueError("mode must be 'gl' or 'twisted'")
    if weights is None:
        groups = {None: list(range(d))}
    else:
        groups = {}
        for r, w in enumerate(weights):
            groups.setdefault(tuple(w), []).append(r)
    if only_weight is not None:
        key = tuple(F(x) for x in only_weight)
        groups = {key: groups.get(key, [])}
    upper = upper_positions(N)
    ops = T.coeffs[1:] if T.degree >= 1 else T.coeffs[:0]
    out: list[SingularLine] = []
    for key, cols in groups.items():
        if not cols:
            continue
        if upper and ops.shape[0]:
            blocks = [ops[r, p, q][:, cols] for r in range(ops.shape[0]) for p, q in upper]
            ker = nullspace(concatenate(blocks, axis=0))
        else:
            ker = F.eye(len(cols))
        for row in range(ker.shape[0]):
            num = np.zeros((d,), dtype=ker.num.dtype)
            num[cols] = ker.num[row]
            v = FArray(F, num, ker.den)
            out.append(SingularLine(v, key, _eigen_series(T, v, diag)))
    return out


def _eigen_series(T: OperatorMatrix, v: FArray, diag: Sequence[int]) -> tuple | None:
    res = []
    for p in diag:
        got = OperatorSeries(T.entry(p, p), T.den).on_vector(v)
        if got is None:
            return None
        res.append(got)
    return tuple(res)


def series_to_factored(num: Sequence, den: Sequence, F: FieldSpec) -> FactoredRational:
    return FactoredRational.from_x_ratio(F, list(num), list(den))


def highest_weight_of_top(T: OperatorMatrix, mode: str = "gl") -> tuple[FactoredRational, ...]:
    """Diagonal eigenvalues on the designated top vector after checking it is singular."""
    F = T.field
    if T.top is None:
        raise ValueError("no designated top vector")
    v = F.zeros((T.dim,))
    num = v.num.copy()
    num[T.top] = 1
    v = FArray(F, num)
    lines = singular_vectors(T, mode, only_weight=T.weights[T.top] if T.weights is not None else None)
    from .exactalg import rank

    span = [ln.vector for ln in lines]
    if not span or rank(stack(span + [v])) != rank(stack(span)):
        raise ValueError("the top vector is not singular")
    diag = list(range(T.N)) if mode == "gl" else list(range(T.N // 2, T.N))
    series = _eigen_series(T, v, diag)
    if series is None:
        raise ValueError("the top vector is not a joint eigenvector")
    return tuple(series_to_factored(n, d, F) for n, d in series)
