"""R-matrix calculus on tensor powers of K^N.

Legs are numbered from 1.  An operator on (K^N)^{(x) m} is an N^m x N^m
:class:`FArray` in row-major Kronecker order: leg 1 is the slowest index.
Formal spectral parameters are handled by :class:`MatPoly`, a matrix-valued
polynomial in several commuting variables; identities are compared after
clearing the obvious denominators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exactalg import QQ, FArray, FieldSpec
from .liecore import FormData

# ---------------------------------------------------------------------------
# permutations and leg embeddings
# ---------------------------------------------------------------------------


def perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def flip_matrix(N: int) -> np.ndarray:
    """P = sum_ij E_ij (x) E_ji as an integer N^2 x N^2 matrix."""
    P = np.zeros((N * N, N * N), dtype=np.int64)
    for i in range(N):
        for j in range(N):
            P[i * N + j, j * N + i] = 1
    return P


def flip_transposed(form: FormData) -> np.ndarray:
    """P' = sum_kl theta_kl E_kl (x) E_{-k,-l} (positions: -k sits at N-1-k)."""
    N = form.N
    th = form.theta_matrix()
    Q = np.zeros((N * N, N * N), dtype=np.int64)
    for k in range(N):
        for l in range(N):
            Q[k * N + (N - 1 - k), l * N + (N - 1 - l)] = th[k, l]
    return Q


def partial_transpose(X: np.ndarray, N: int, leg: int) -> np.ndarray:
    """Transpose in leg 1 or 2 of a two-leg operator."""
    T = X.reshape(N, N, N, N)  # out1, out2, in1, in2
    if leg == 1:
        T = T.transpose(2, 1, 0, 3)
    else:
        T = T.transpose(0, 3, 2, 1)
    return T.reshape(N * N, N * N)


def conjugated_transpose(form: FormData, leg: int) -> np.ndarray:
    """G_leg^{-1} P^{t_leg} G_leg computed literally from G."""
    N = form.N
    G = np.array([[form.g(i, j) for j in _ids(form)] for i in _ids(form)], dtype=np.int64)
    Ginv = np.round(np.linalg.inv(G)).astype(np.int64)
    eye = np.eye(N, dtype=np.int64)
    Pt = partial_transpose(flip_matrix(N), N, leg)
    if leg == 1:
        L, R = np.kron(Ginv, eye), np.kron(G, eye)
    else:
        L, R = np.kron(eye, Ginv), np.kron(eye, G)
    return L @ Pt @ R


def _ids(form: FormData) -> list[int]:
    from .liecore import signed_indices

    return signed_indices(form.n)


def embed(X: np.ndarray, N: int, legs: tuple[int, ...], m: int) -> np.ndarray:
    """Place an operator on the given legs (1-based, in the order of X's factors) of m legs."""
    k = len(legs)
    if len(set(legs)) != k or not all(1 <= a <= m for a in legs):
        raise ValueError("bad leg list")
    T = X.reshape((N,) * (2 * k))
    rest = [a for a in range(1, m + 1) if a not in legs]
    # result[out_1..out_m, in_1..in_m]
    out = np.zeros((N,) * (2 * m), dtype=X.dtype)
    for combo in itertools.product(range(N), repeat=len(rest)):
        index_out: list = [slice(None)] * m
        index_in: list = [slice(None)] * m
        for a, c in zip(rest, combo):
            index_out[a - 1] = c
            index_in[a - 1] = c
        # remaining free axes are in leg order; X's axes follow ``legs`` order
        order = sorted(range(k), key=lambda t: legs[t])
        perm = [order[t] for t in range(k)] + [k + order[t] for t in range(k)]
        out[tuple(index_out + index_in)] = T.transpose(perm)
    return out.reshape(N**m, N**m)


def permutation_operator(N: int, perm: Sequence[int]) -> np.ndarray:
    """e_{i_1} (x) ... (x) e_{i_m} -> e_{i_{perm(1)}} (x) ... (x) e_{i_{perm(m)}}."""
    m = len(perm)
    D = N**m
    M = np.zeros((D, D), dtype=np.int64)
    for I in itertools.product(range(N), repeat=m):
        J = tuple(I[perm[t]] for t in range(m))
        M[np.ravel_multi_index(J, (N,) * m), np.ravel_multi_index(I, (N,) * m)] = 1
    return M


def antisymmetrizer(m: int, N: int, F: FieldSpec = QQ) -> FArray:
    """A_m = sum_sigma sgn(sigma) sigma on (K^N)^{(x) m}."""
    if m < 1:
        raise ValueError("m must be positive")
    if F.p and math.factorial(m) % F.p == 0:
        raise ValueError(f"{m}! vanishes in characteristic {F.p}")
    D = N**m
    A = np.zeros((D, D), dtype=np.int64)
    for perm in itertools.permutations(range(m)):
        A += perm_sign(perm) * permutation_operator(N, perm)
    return FArray(F, A)


# ---------------------------------------------------------------------------
# R-matrices at scalar points
# ---------------------------------------------------------------------------


def R_at(z, N: int, legs: tuple[int, int], m: int, F: FieldSpec = QQ) -> FArray:
    """R_ij(z) = 1 - P_ij / z."""
    z = F(z)
    if z == 0:
        raise ZeroDivisionError("R(u) has a pole at u = 0")
    P = FArray(F, embed(flip_matrix(N), N, legs, m))
    return F.eye(N**m) - P * (F.one / z)


def Rprime_at(z, form: FormData, legs: tuple[int, int], m: int, F: FieldSpec = QQ) -> FArray:
    """R'_ij(z) = 1 - P'_ij / z."""
    z = F(z)
    if z == 0:
        raise ZeroDivisionError("R'(u) has a pole at u = 0")
    Q = FArray(F, embed(flip_transposed(form), form.N, legs, m))
    return F.eye(form.N**m) - Q * (F.one / z)


def fused_R(points: Sequence, N: int, F: FieldSpec = QQ, order: str = "descending") -> FArray:
    """R(u_1, ..., u_m) at scalar points.

    ``descending``: (R_{m-1,m})(R_{m-2,m} R_{m-2,m-1}) ... (R_{1m} ... R_{12}).
    ``ascending``:  (R_{12} ... R_{1m}) ... (R_{m-2,m-1} R_{m-2,m})(R_{m-1,m}).
    """
    pts = [F(x) for x in points]
    m = len(pts)
    out = F.eye(N**m)
    for i, j in _fused_pairs(m, order):
        out = out @ R_at(pts[i - 1] - pts[j - 1], N, (i, j), m, F)
    return out


def _fused_pairs(m: int, order: str) -> list[tuple[int, int]]:
    if order == "descending":
        return [(i, j) for i in range(m - 1, 0, -1) for j in range(m, i, -1)]
    if order == "ascending":
        return [(i, j) for i in range(1, m) for j in range(i + 1, m + 1)]
    raise ValueError("order must be 'ascending' or 'descending'")


# ---------------------------------------------------------------------------
# matrix polynomials in several variables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatPoly:
    """sum over exponent tuples e of terms[e] * prod_k var_k^{e_k}."""

    field: FieldSpec
    nvars: int
    dim: int
    terms: tuple  # tuple of (exponents, FArray), no zero terms

    @classmethod
    def make(cls, F: FieldSpec, nvars: int, dim: int, terms: dict) -> "MatPoly":
        kept = tuple(sorted((e, M) for e, M in terms.items() if not M.is_zero()))
        return cls(F, nvars, dim, kept)

    @classmethod
    def constant(cls, M: FArray, nvars: int) -> "MatPoly":
        return cls.make(M.field, nvars, M.shape[0], {(0,) * nvars: M})

    @classmethod
    def linear(cls, F: FieldSpec, nvars: int, coeffs: dict, const: FArray) -> "MatPoly":
        """const + sum_k coeffs[k] * var_k * Id."""
        dim = const.shape[0]
        terms = {(0,) * nvars: const}
        for k, c in coeffs.items():
            e = [0] * nvars
            e[k] = 1
            terms[tuple(e)] = F.eye(dim) * F(c)
        return cls.make(F, nvars, dim, terms)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "MatPoly") -> "MatPoly":
        d = self.as_dict()
        for e, M in other.terms:
            d[e] = d[e] + M if e in d else M
        return MatPoly.make(self.field, self.nvars, self.dim, d)

    def __neg__(self) -> "MatPoly":
        return MatPoly(self.field, self.nvars, self.dim, tuple((e, -M) for e, M in self.terms))

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + (-other)

    def __matmul__(self, other: "MatPoly") -> "MatPoly":
        d: dict = {}
        for e1, A in self.terms:
            for e2, B in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = A @ B
                d[e] = d[e] + prod if e in d else prod
        return MatPoly.make(self.field, self.nvars, self.dim, d)

    def is_zero(self) -> bool:
        return not self.terms

    def max_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def evaluate(self, point: Sequence) -> FArray:
        F = self.field
        out = F.zeros((self.dim, self.dim))
        for e, M in self.terms:
            c = F.one
            for x, k in zip(point, e):
                c = c * F(x) ** k
            out = out + M * c
        return out


def R_cleared(N: int, legs: tuple[int, int], m: int, var: tuple[int, int], nvars: int, F: FieldSpec = QQ, sign: int = 1) -> MatPoly:
    """(u_a - u_b) R_ij(u_a - u_b) = (u_a - u_b) - sign * P_ij."""
    a, b = var
    P = FArray(F, embed(flip_matrix(N), N, legs, m))
    return MatPoly.linear(F, nvars, {a: 1, b: -1}, -P * sign)


def Rprime_cleared(
    form: FormData, legs: tuple[int, int], m: int, var: tuple[int, int], nvars: int, F: FieldSpec = QQ, mixed: bool = False
) -> MatPoly:
    """z R'_ij(z) = z - P'_ij with z = -u_a - u_b (or z = u_a - u_b when ``mixed``)."""
    a, b = var
    Q = FArray(F, embed(flip_transposed(form), form.N, legs, m))
    coeffs = {a: 1, b: -1} if mixed else {a: -1, b: -1}
    return MatPoly.linear(F, nvars, coeffs, -Q)


def fused_R_formal(m: int, N: int, F: FieldSpec = QQ, order: str = "descending") -> MatPoly:
    """prod_{i<j}(u_i - u_j) R(u_1, ..., u_m) as a matrix polynomial in u_1..u_m."""
    out = MatPoly.constant(F.eye(N**m), m)
    for i, j in _fused_pairs(m, order):
        out = out @ R_cleared(N, (i, j), m, (i - 1, j - 1), m, F)
    return out


@dataclass(frozen=True)
class IdentityReport:
    holds: bool
    residual_degree: int = -1
    detail: str = ""


def check_yang_baxter(
    variant: str,
    form: FormData,
    points: Sequence | None = None,
    F: FieldSpec = QQ,
    perturb: bool = False,
) -> IdentityReport:
    """Check a Yang-Baxter type identity on legs (1, 2, 3).

    plain:            R_12 R_13 R_23 = R_23 R_13 R_12
    transposed:       R_12 R'_23 R'_13 = R'_13 R'_23 R_12, with R'_ij = R'(u_i - u_j)
    final_transposed: R_12 R'_13 R'_23 = R'_23 R'_13 R_12, with R'_ij = R'(-u_i - u_j)
    and R_ij = R(u_i - u_j) throughout.  The transposed form is the literal
    G-transpose of the plain equation in leg 3, so its arguments stay u_i - u_3.  With ``points``
    the check is at those values, otherwise formally in u_1, u_2, u_3 after
    clearing denominators.  ``perturb`` flips the sign of P in R_13 (a
    negative control).
    """
    N = form.N
    flip13 = -1 if perturb else 1

    def R(i, j):
        return R_cleared(N, (i, j), 3, (i - 1, j - 1), 3, F, sign=flip13 if (i, j) == (1, 3) else 1)

    def Rp(i, j):
        return Rprime_cleared(form, (i, j), 3, (i - 1, j - 1), 3, F, mixed=variant == "transposed")

    if variant == "plain":
        lhs = R(1, 2) @ R(1, 3) @ R(2, 3)
        rhs = R(2, 3) @ R(1, 3) @ R(1, 2)
    elif variant == "transposed":
        lhs = R(1, 2) @ Rp(2, 3) @ Rp(1, 3)
        rhs = Rp(1, 3) @ Rp(2, 3) @ R(1, 2)
    elif variant == "final_transposed":
        lhs = R(1, 2) @ Rp(1, 3) @ Rp(2, 3)
        rhs = Rp(2, 3) @ Rp(1, 3) @ R(1, 2)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    diff = lhs - rhs
    if points is not None:
        val = diff.evaluate(points)
        return IdentityReport(val.is_zero(), -1 if val.is_zero() else 0, "evaluated")
    return IdentityReport(diff.is_zero(), diff.max_degree(), "formal")
