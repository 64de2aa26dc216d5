"""Signed indices, bilinear forms, weights and explicit Lie algebra modules.

Indices live in I_N = {-n, ..., -1, 1, ..., n} with N = 2n.  Internally a
signed index i is stored at position ``pos(i, n)`` so that the position order
-n < ... < -1 < 1 < ... < n matches array order.

A :class:`GModule` is a concrete module: for ``kind == "gl"`` the action array
holds the matrices of E_ij, for ``kind == "g"`` it holds F_ij.  Either way the
array has shape (N, N, d, d) indexed by positions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactalg import QQ, FArray, FieldSpec, ModP, concatenate, kron, nullspace, rank, rref, stack

FLAVORS = ("o", "sp")


# ---------------------------------------------------------------------------
# signed indices
# ---------------------------------------------------------------------------


def pos(i: int, n: int) -> int:
    if i == 0 or abs(i) > n:
        raise ValueError(f"{i} is not in I_{2 * n}")
    return i + n if i < 0 else i + n - 1


def idx(p: int, n: int) -> int:
    if not 0 <= p < 2 * n:
        raise ValueError(f"position {p} out of range")
    return p - n if p < n else p - n + 1


def signed_indices(n: int) -> list[int]:
    return [idx(p, n) for p in range(2 * n)]


def sgn(i: int) -> int:
    return 1 if i > 0 else -1


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FormData:
    """The orthogonal or symplectic form on K^N and the sign conventions it induces."""

    flavor: str
    n: int

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}")
        if self.n < 1:
            raise ValueError("rank must be positive")

    @property
    def N(self) -> int:
        return 2 * self.n

    @property
    def orthogonal(self) -> bool:
        return self.flavor == "o"

    @property
    def sign(self) -> int:
        """+1 orthogonal, -1 symplectic (the sign in front of every 1/2 and of G^t = +-G)."""
        return 1 if self.orthogonal else -1

    def half(self, F: FieldSpec):
        return F(Fraction(self.sign, 2))

    def theta(self, i: int, j: int) -> int:
        return 1 if self.orthogonal else sgn(i) * sgn(j)

    def g(self, i: int, j: int) -> int:
        if i != -j:
            return 0
        return 1 if self.orthogonal else sgn(i)

    def theta_matrix(self) -> np.ndarray:
        """theta by positions."""
        ids = signed_indices(self.n)
        return np.array([[self.theta(i, j) for j in ids] for i in ids], dtype=np.int64)

    def G(self, F: FieldSpec = QQ) -> FArray:
        ids = signed_indices(self.n)
        return F.array([[self.g(i, j) for j in ids] for i in ids])

    def neg_perm(self) -> np.ndarray:
        """Position of -i for each position of i."""
        return np.array([pos(-idx(p, self.n), self.n) for p in range(self.N)])


def prime_transpose(A, form: FormData):
    """a'_ij = theta_ij a_{-j,-i} on the two leading axes.

    Accepts an :class:`FArray` (extra trailing axes allowed) or a nested
    list of scalars.
    """
    N = form.N
    neg = form.neg_perm()
    th = form.theta_matrix()
    if isinstance(A, FArray):
        if A.shape[:2] != (N, N):
            raise ValueError(f"expected leading shape ({N}, {N}), got {A.shape[:2]}")
        moved = A[neg][:, neg].swapaxes(0, 1)
        extra = (1,) * (A.ndim - 2)
        return FArray(A.field, moved.num * th.reshape(th.shape + extra), A.den).simplify()
    rows = [list(r) for r in A]
    if len(rows) != N or any(len(r) != N for r in rows):
        raise ValueError(f"expected a {N}x{N} matrix")
    return [[th[i, j] * rows[neg[j]][neg[i]] for j in range(N)] for i in range(N)]


def unit_matrix(F: FieldSpec, N: int, p: int, q: int) -> FArray:
    m = np.zeros((N, N), dtype=np.int64)
    m[p, q] = 1
    return FArray(F, m)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


def is_dominant(lam: Sequence, flavor: str | None = None) -> bool:
    """0 >= lam_1 >= ... >= lam_n for o/sp; lam_{-n} >= ... >= lam_n for gl."""
    vals = [Fraction(x) for x in lam]
    if any(a < b for a, b in zip(vals, vals[1:])):
        return False
    if flavor in FLAVORS:
        return not vals or vals[0] <= 0
    return True


def positive_roots(form: FormData) -> list[tuple[str, tuple]]:
    """Positive roots as (label, coefficient vector in eps_1..eps_n)."""
    n = form.n
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * n
            v[i], v[j] = 1, -1
            out.append((f"e{i + 1}-e{j + 1}", tuple(v)))
            w = [0] * n
            w[i], w[j] = -1, -1
            out.append((f"-e{i + 1}-e{j + 1}", tuple(w)))
    if not form.orthogonal:
        for i in range(n):
            v = [0] * n
            v[i] = -2
            out.append((f"-2e{i + 1}", tuple(v)))
    return out


def coroot_pairing(lam: Sequence, root: tuple) -> Fraction:
    """<lam, alpha^vee> with the standard normalisation (long roots -2 eps_i pair as -lam_i)."""
    s = sum(Fraction(a) * b for a, b in zip(lam, root))
    norm = sum(b * b for b in root)
    return s * 2 / norm


def rho(form: FormData) -> tuple:
    n = form.n
    if form.orthogonal:
        return tuple(-(i - 1) for i in range(1, n + 1))
    return tuple(-i for i in range(1, n + 1))


def _check_g_weight(lam: Sequence, form: FormData) -> tuple:
    if len(lam) != form.n:
        raise ValueError(f"weight must have {form.n} entries")
    if not is_dominant(lam, form.flavor):
        raise ValueError(f"weight {tuple(lam)} is not dominant")
    return tuple(Fraction(x) for x in lam)


def alcove_pairings(lam: Sequence, form: FormData) -> list[Fraction]:
    lr = [a + b for a, b in zip(_check_g_weight(lam, form), rho(form))]
    return [coroot_pairing(lr, r) for _, r in positive_roots(form)]


def in_fundamental_alcove(lam: Sequence, form: FormData, p: int) -> bool:
    """0 <= <lam + rho, alpha^vee> < p for every positive root (p = 0 means no upper bound)."""
    return all(0 <= c and (p == 0 or c < p) for c in alcove_pairings(lam, form))


def alcove_sufficient(lam: Sequence, form: FormData, p: int) -> bool:
    """The cheap sufficient test -2 lam_n + 2n < p."""
    lam = _check_g_weight(lam, form)
    if p == 0:
        return True
    last = lam[-1] if lam else 0
    return -2 * last + 2 * form.n < p


def weyl_dimension(lam: Sequence, form: FormData) -> int:
    """prod <lam + rho, a^vee> / <rho, a^vee> over positive roots (the g_n-module dimension)."""
    lam = _check_g_weight(lam, form)
    r = rho(form)
    num, den = Fraction(1), Fraction(1)
    for _, root in positive_roots(form):
        top = coroot_pairing([a + b for a, b in zip(lam, r)], root)
        bot = coroot_pairing(r, root)
        assert bot != 0
        num *= top
        den *= bot
    val = num / den
    assert val.denominator == 1 and val > 0
    return int(val)


def orthogonal_group_dimension(lam: Sequence, form: FormData) -> int:
    """Dimension of the simple O_N-module: twice the Lie algebra value when lam_1 != 0.

    The outer automorphism flips the sign of the coordinate nearest to zero,
    so for lam_1 != 0 the O_N-module is the sum of two conjugate so_N-modules.
    """
    if not form.orthogonal:
        raise ValueError("only meaningful for the orthogonal flavor")
    d = weyl_dimension(lam, form)
    return 2 * d if Fraction(lam[0]) != 0 else d


def simple_roots(form: FormData) -> list[tuple]:
    n = form.n
    out = []
    if form.orthogonal:
        if n >= 2:
            v = [0] * n
            v[0], v[1] = -1, -1
            out.append(tuple(v))
    else:
        v = [0] * n
        v[0] = -2
        out.append(tuple(v))
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        out.append(tuple(v))
    return out


def dominance_leq(lam: Sequence, mu: Sequence, form: FormData) -> bool:
    """lam <= mu: mu - lam is a nonnegative integer combination of simple roots."""
    diff = [Fraction(b) - Fraction(a) for a, b in zip(lam, mu)]
    roots = simple_roots(form)
    if not roots:
        return all(d == 0 for d in diff)
    A = QQ.array([list(r) for r in roots]).T
    from .exactalg import solve_combination

    sol = solve_combination(A.T, QQ.array(diff))
    if sol is None:
        return False
    return all(c >= 0 and c.denominator == 1 for c in sol)


def gl_to_g_weight(w: Sequence, n: int) -> tuple:
    """g_n-weight of a gl_N-weight (entries by position): lam_i = w_i - w_{-i}."""
    return tuple(w[pos(i, n)] - w[pos(-i, n)] for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GModule:
    """An explicit module: basis, action matrices, weight grading.

    ``action[p, q]`` is the matrix of E_{ij} (kind "gl") or F_{ij} (kind "g")
    with i = idx(p), j = idx(q).  ``weights`` lists the weight of each basis
    vector: a gl_N-weight by positions for kind "gl", a g_n-weight for kind "g".
    ``top`` is the index of a designated highest weight basis vector.
    """

    n: int
    field: FieldSpec
    kind: str
    action: FArray
    weights: tuple
    form: FormData | None = None
    top: int | None = 0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("gl", "g"):
            raise ValueError("kind must be 'gl' or 'g'")
        if self.kind == "g" and self.form is None:
            raise ValueError("a g_n-module needs a form")
        N = 2 * self.n
        if self.action.shape[:2] != (N, N) or self.action.shape[2] != self.action.shape[3]:
            raise ValueError("action array has the wrong shape")
        if len(self.weights) != self.dim:
            raise ValueError("one weight per basis vector required")

    @property
    def N(self) -> int:
        return 2 * self.n

    @property
    def dim(self) -> int:
        return self.action.shape[2]

    def E(self, i: int, j: int) -> FArray:
        if self.kind != "gl":
            raise ValueError("E_ij is only available on gl modules")
        return self.action[pos(i, self.n), pos(j, self.n)]

    def F_array(self) -> FArray:
        """Array of F_ij = E_ij - theta_ij E_{-j,-i} (by positions)."""
        if self.kind == "g":
            return self.action
        if self.form is None:
            raise ValueError("restriction to g_n needs a form")
        return self.action - prime_transpose(self.action, self.form)

    def F(self, i: int, j: int) -> FArray:
        return self.F_array()[pos(i, self.n), pos(j, self.n)]

    def g_weights(self) -> tuple:
        if self.kind == "g":
            return self.weights
        return tuple(gl_to_g_weight(w, self.n) for w in self.weights)

    def restrict(self) -> "GModule":
        """The same space viewed as a g_n-module."""
        if self.kind == "g":
            return self
        return GModule(self.n, self.field, "g", self.F_array(), self.g_weights(), self.form, self.top, self.label)

    def with_form(self, form: FormData | None) -> "GModule":
        return replace(self, form=form)

    def reduce_to(self, target: FieldSpec) -> "GModule":
        w = tuple(tuple(target(x) for x in wt) for wt in self.weights)
        return replace(self, field=target, action=self.action.with_field(target), weights=w)


def _weights_field(F: FieldSpec, rows) -> tuple:
    return tuple(tuple(F(x) for x in r) for r in rows)


def _units(F: FieldSpec, N: int, d: int, entries) -> FArray:
    """Action array from a list of (p, q, row, col, value)."""
    entries = list(entries)
    if all(type(e[4]) is int for e in entries):
        arr = np.zeros((N, N, d, d), dtype=np.int64)
        if entries:
            idx_arr = np.array([e[:4] for e in entries], dtype=np.int64).T
            np.add.at(arr, tuple(idx_arr), np.array([e[4] for e in entries], dtype=np.int64))
        return FArray(F, arr)
    num = np.zeros((N, N, d, d), dtype=object)
    num[...] = 0
    for p, q, r, c, v in entries:
        num[p, q, r, c] = num[p, q, r, c] + v
    return FArray.from_scalars(F, num)


def natural(n: int, F: FieldSpec = QQ, form: FormData | None = None) -> GModule:
    N = 2 * n
    entries = [(p, q, p, q, 1) for p in range(N) for q in range(N)]
    w = [[1 if k == p else 0 for k in range(N)] for p in range(N)]
    return GModule(n, F, "gl", _units(F, N, N, entries), _weights_field(F, w), form, 0, "natural")


def dual(n: int, F: FieldSpec = QQ, form: FormData | None = None) -> GModule:
    N = 2 * n
    # E_pq e*_k = -delta_{pk} e*_q
    entries = [(p, q, q, p, -1) for p in range(N) for q in range(N)]
    w = [[-1 if k == p else 0 for k in range(N)] for p in range(N)]
    return GModule(n, F, "gl", _units(F, N, N, entries), _weights_field(F, w), form, N - 1, "dual")


def one_dimensional(n: int, c, F: FieldSpec = QQ, form: FormData | None = None) -> GModule:
    """E_ij acts as delta_ij c."""
    N = 2 * n
    c = F(c)
    entries = [(p, p, 0, 0, c) for p in range(N)]
    return GModule(n, F, "gl", _units(F, N, 1, entries), _weights_field(F, [[c] * N]), form, 0, f"det^{c}")


def trivial_g(form: FormData, F: FieldSpec = QQ) -> GModule:
    N = form.N
    return GModule(form.n, F, "g", F.zeros((N, N, 1, 1)), ((F.zero,) * form.n,), form, 0, "trivial")


def o2_character(gamma, F: FieldSpec = QQ) -> GModule:
    """The one-dimensional o_2-module V(gamma): F_11 = gamma, F_{-1,-1} = -gamma."""
    form = FormData("o", 1)
    g = F(gamma)
    entries = [(pos(1, 1), pos(1, 1), 0, 0, g), (pos(-1, 1), pos(-1, 1), 0, 0, -g)]
    return GModule(1, F, "g", _units(F, 2, 1, entries), ((g,),), form, 0, f"V({g})")


def _combine_forms(a: GModule, b: GModule) -> FormData | None:
    if a.form and b.form and a.form != b.form:
        raise ValueError("forms disagree")
    return a.form or b.form


def tensor(a: GModule, b: GModule) -> GModule:
    """Lie algebra tensor product (X acts as X (x) 1 + 1 (x) X)."""
    if a.n != b.n or a.field != b.field:
        raise ValueError("tensor factors must share rank and field")
    form = _combine_forms(a, b)
    if a.kind != b.kind:
        a, b = a.with_form(form).restrict(), b.with_form(form).restrict()
    F = a.field
    N, da, db = a.N, a.dim, b.dim
    Ia, Ib = F.eye(da), F.eye(db)
    mats = []
    for p in range(N):
        for q in range(N):
            mats.append(kron(a.action[p, q], Ib) + kron(Ia, b.action[p, q]))
    act = stack(mats).reshape(N, N, da * db, da * db)
    w = tuple(tuple(x + y for x, y in zip(wa, wb)) for wa in a.weights for wb in b.weights)
    top = None if a.top is None or b.top is None else a.top * db + b.top
    return GModule(a.n, F, a.kind, act, w, form, top, f"({a.label} x {b.label})")


def tensor_all(mods: Sequence[GModule]) -> GModule:
    out = mods[0]
    for m in mods[1:]:
        out = tensor(out, m)
    return out


def wedge_power(n: int, k: int, F: FieldSpec = QQ, form: FormData | None = None) -> GModule:
    """Lambda^k of the natural module, basis e_S for increasing position tuples S."""
    N = 2 * n
    if not 0 <= k <= N:
        raise ValueError("bad wedge degree")
    basis = list(itertools.combinations(range(N), k))
    index = {s: r for r, s in enumerate(basis)}
    entries = []
    for c, S in enumerate(basis):
        for q in S:
            slot = S.index(q)
            for p in range(N):
                if p != q and p in S:
                    continue
                T = list(S)
                T[slot] = p
                sign = 1
                # sort T, tracking the sign of the permutation
                arr = T[:]
                for a in range(len(arr)):
                    for b in range(len(arr) - 1 - a):
                        if arr[b] > arr[b + 1]:
                            arr[b], arr[b + 1] = arr[b + 1], arr[b]
                            sign = -sign
                entries.append((p, q, index[tuple(arr)], c, sign))
    w = [[1 if p in S else 0 for p in range(N)] for S in basis]
    return GModule(n, F, "gl", _units(F, N, len(basis), entries), _weights_field(F, w), form, 0, f"wedge^{k}")


def sym_power(n: int, k: int, F: FieldSpec = QQ, form: FormData | None = None) -> GModule:
    """S^k of the natural module, basis monomials indexed by sorted position multisets."""
    N = 2 * n
    if k < 0:
        raise ValueError("bad symmetric degree")
    basis = list(itertools.combinations_with_replacement(range(N), k))
    index = {s: r for r, s in enumerate(basis)}
    entries = []
    for c, S in enumerate(basis):
        for q in set(S):
            mult = S.count(q)
            for p in range(N):
                T = list(S)
                T.remove(q)
                T.append(p)
                entries.append((p, q, index[tuple(sorted(T))], c, mult))
    w = [[S.count(p) for p in range(N)] for S in basis]
    return GModule(n, F, "gl", _units(F, N, len(basis), entries), _weights_field(F, w), form, 0, f"sym^{k}")


def raising_positions(N: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(N) for q in range(N) if p < q]


def lowering_positions(N: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(N) for q in range(N) if p > q]


def _weight_key(F: FieldSpec, w) -> tuple:
    return tuple(F.sort_key(x) for x in w)


def singular_basis(M: GModule, weight) -> FArray:
    """Rows spanning the vectors of the given weight killed by every raising operator."""
    F = M.field
    target = tuple(F(x) for x in weight)
    cols = [r for r, w in enumerate(M.weights) if tuple(w) == target]
    if not cols:
        return F.zeros((0, M.dim))
    A = concatenate([M.action[p, q][:, cols] for p, q in raising_positions(M.N)], axis=0)
    ker = nullspace(A)
    num = np.zeros((ker.shape[0], M.dim), dtype=ker.num.dtype)
    num[:, cols] = ker.num
    return FArray(F, num, ker.den)


def integer_value(F: FieldSpec, x) -> int:
    """An integer representing x: x itself over Q, the representative in (-p/2, p/2) over F_p."""
    x = F(x)
    if isinstance(x, ModP):
        return x.v - F.p if x.v > F.p // 2 else x.v
    if x.denominator != 1:
        raise ValueError(f"{x} is not integral")
    return int(x)


def highest_weight_submodule(
    parent: GModule, weight, allow_outside_alcove: bool = False, vector: FArray | None = None
) -> GModule:
    """Cyclic span of a singular vector of the given weight under the lowering operators.

    For a gl module ``weight`` may be a gl_N-weight (length N) or a g_n-weight
    (length n); in the latter case the parent is restricted to g_n first.
    """
    F = parent.field
    M = parent
    if M.kind == "gl" and len(weight) == M.n and M.n != M.N:
        M = M.restrict()
    if M.kind == "g":
        ints = [integer_value(F, x) for x in weight]
        if not is_dominant(ints, M.form.flavor):
            raise ValueError(f"weight {tuple(weight)} is not dominant")
        if F.p and not allow_outside_alcove:
            if not in_fundamental_alcove(ints, M.form, F.p):
                raise ValueError(f"weight {tuple(weight)} lies outside the fundamental alcove for p={F.p}")
    if vector is None:
        sing = singular_basis(M, weight)
        if sing.shape[0] == 0:
            raise ValueError(f"no singular vector of weight {tuple(weight)}")
        vector = sing[0]
    wkeys = [_weight_key(F, w) for w in M.weights]
    groups: dict[tuple, list[int]] = {}
    for r, k in enumerate(wkeys):
        groups.setdefault(k, []).append(r)
    spans: dict[tuple, FArray] = {}
    start_key = wkeys[int(vector.nonzero_index()[0])]
    spans[start_key] = vector.reshape(1, M.dim)
    frontier = [vector]
    lower = lowering_positions(M.N)
    while frontier:
        new = []
        for v in frontier:
            for p, q in lower:
                w = M.action[p, q] @ v.reshape(M.dim, 1)
                w = w.reshape(M.dim)
                nz = w.nonzero_index()
                if nz is None:
                    continue
                key = wkeys[nz[0]]
                cur = spans.get(key)
                if cur is None:
                    spans[key] = w.reshape(1, M.dim)
                    new.append(w)
                    continue
                cand = concatenate([cur, w.reshape(1, M.dim)])
                if rank(cand) > cur.shape[0]:
                    spans[key] = cand
                    new.append(w)
        frontier = new
    # ordered by the parent's basis order of weights; the starting weight first
    keys = sorted(spans, key=lambda k: (k != start_key, min(groups[k])))
    blocks, pivots, wts = [], [], []
    for k in keys:
        R, piv = rref(spans[k])
        blocks.append(R)
        pivots.extend(piv)
        wts.extend([M.weights[groups[k][0]]] * R.shape[0])
    B = concatenate(blocks)
    d = B.shape[0]
    N = M.N
    flat = M.action.reshape(N * N, M.dim, M.dim)
    # images of basis vectors: (N*N, d, dim); coordinates at pivot columns
    imgs = stack([B @ flat[a].T for a in range(N * N)])
    coords = imgs[:, :, pivots].transpose(0, 2, 1)
    act = coords.reshape(N, N, d, d)
    return GModule(M.n, F, M.kind, act, tuple(wts), M.form, 0, f"L{tuple(weight)}<{M.label}")


def check_bracket(M: GModule) -> bool:
    """Exact bracket relations for all generator pairs.

    gl: [E_ij, E_kl] = delta_jk E_il - delta_li E_kj.
    g:  [F_ij, F_kl] = 1/2 sum_ab c_ab F_ab where [F_ij, F_kl] = sum c_ab E_ab in gl_N.
    """
    N, d = M.N, M.dim
    F = M.field
    X = M.action.reshape(N * N, d, d)
    left = stack([X[a] @ X[b] - X[b] @ X[a] for a in range(N * N) for b in range(N * N)])
    if M.kind == "gl":
        rhs = []
        Z = F.zeros((d, d))
        for p in range(N):
            for q in range(N):
                for r in range(N):
                    for s in range(N):
                        term = Z
                        if q == r:
                            term = term + M.action[p, s]
                        if s == p:
                            term = term - M.action[r, q]
                        rhs.append(term)
        return left.equals(stack(rhs))
    form = M.form
    # structure constants from the defining N x N matrices
    Fdef = _defining_F(form, F)
    rhs = []
    half = F(Fraction(1, 2))
    flatF = Fdef.reshape(N * N, N, N)
    for a in range(N * N):
        for b in range(N * N):
            C = flatF[a] @ flatF[b] - flatF[b] @ flatF[a]
            rhs.append(_combine_by_coeffs(C, M.action, half))
    return left.equals(stack(rhs))


def _defining_F(form: FormData, F: FieldSpec) -> FArray:
    N = form.N
    E = np.zeros((N, N, N, N), dtype=np.int64)
    for p in range(N):
        for q in range(N):
            E[p, q, p, q] = 1
    Earr = FArray(F, E)
    return Earr - prime_transpose(Earr, form)


def _combine_by_coeffs(C: FArray, action: FArray, scale) -> FArray:
    """scale * sum_ab C[a,b] action[a,b]."""
    N = C.shape[0]
    d = action.shape[2]
    w = C.reshape(1, N * N)
    flat = action.reshape(N * N, d * d)
    return ((w @ flat) * scale).reshape(d, d)


def check_weight_grading(M: GModule) -> bool:
    """Every generator shifts weights by its root: nonzero matrix entries connect matching weights."""
    F = M.field
    N = M.N
    for p in range(N):
        for q in range(N):
            A = M.action[p, q].num
            rows, cols = np.nonzero(A)
            for r, c in zip(rows, cols):
                if M.kind == "gl":
                    shift = [0] * N
                    shift[p] += 1
                    shift[q] -= 1
                else:
                    shift = [0] * M.n
                    for s, sign in ((p, 1), (q, -1)):
                        i = idx(s, M.n)
                        shift[abs(i) - 1] += sign * sgn(i)
                if tuple(M.weights[r]) != tuple(x + F(s) for x, s in zip(M.weights[c], shift)):
                    return False
    return True


def partition_weight(parts: Sequence, n: int) -> tuple:
    """Rank-n g_n-weight of a negative partition: zeros, then the parts in the last k slots.

    Slot n - k + j receives parts[j-1], which makes the weight dominant
    (0 >= w_1 >= ... >= w_n) when the parts are weakly decreasing.
    """
    parts = [int(x) for x in parts]
    k = len(parts)
    if any(x >= 0 for x in parts):
        raise ValueError("parts of a negative partition must be negative")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError("parts must be weakly decreasing")
    if n < k:
        raise ValueError(f"rank {n} is smaller than the number of parts {k}")
    return (0,) * (n - k) + tuple(parts)


def _wedge_multiplicities(w: Sequence[int]) -> list[int]:
    """m_k with w = sum_k m_k * (0, ..., 0, -1 [k times]) for a dominant g_n-weight."""
    n = len(w)
    ext = [0] + list(w)
    return [ext[n - k] - ext[n - k + 1] for k in range(1, n + 1)]


def g_irreducible(parts: Sequence, form: FormData, F: FieldSpec = QQ, allow_outside_alcove: bool = False) -> GModule:
    """The simple g_n-module of highest weight partition_weight(parts, n), cut out of wedge powers."""
    n = form.n
    w = partition_weight(parts, n)
    if not parts:
        return trivial_g(form, F)
    factors = []
    for k, m in enumerate(_wedge_multiplicities(w), start=1):
        factors.extend([wedge_power(n, k, F, form)] * m)
    big = tensor_all(factors).restrict()
    return highest_weight_submodule(big, w, allow_outside_alcove)


def gl_irreducible(lam: Sequence, n: int, F: FieldSpec = QQ, form: FormData | None = None) -> GModule:
    """L(lam) for a dominant gl_N-weight given by positions, inside wedge powers and a determinant twist."""
    N = 2 * n
    vals = [integer_value(F, x) for x in lam]
    if len(vals) != N or not is_dominant(vals):
        raise ValueError(f"{tuple(lam)} is not a dominant gl_{N} weight")
    factors = []
    for k in range(1, N):
        factors.extend([wedge_power(n, k, F, form)] * (vals[k - 1] - vals[k]))
    factors.append(one_dimensional(n, vals[-1], F, form))
    big = tensor_all(factors)
    if len(factors) == 1:
        return big
    return highest_weight_submodule(big, [F(x) for x in vals])


# ---------------------------------------------------------------------------
# module-spec mini language
# ---------------------------------------------------------------------------


def build_module(expr, n: int, F: FieldSpec = QQ, form: FormData | None = None, allow_outside_alcove: bool = False) -> GModule:
    """Build a module from a nested list expression.

    ["natural"], ["dual"], ["one_dim", c], ["trivial"], ["vgamma", gamma],
    ["tensor", e1, e2, ...], ["sym", k], ["wedge", k], ["restrict", e],
    ["hw", e, [weight...]], ["irrep", [gl weight by positions]],
    ["gpart", [negative partition]] (the simple g_n-module of the embedded weight).
    """
    if isinstance(expr, str):
        expr = [expr]
    head, args = expr[0], list(expr[1:])
    rec = lambda e: build_module(e, n, F, form, allow_outside_alcove)  # noqa: E731
    if head == "natural":
        return natural(n, F, form)
    if head == "dual":
        return dual(n, F, form)
    if head == "one_dim":
        return one_dimensional(n, _scalar_arg(F, args[0]), F, form)
    if head == "trivial":
        if form is None:
            return one_dimensional(n, 0, F, form)
        return trivial_g(form, F)
    if head == "vgamma":
        if form is None or form.flavor != "o" or n != 1:
            raise ValueError("V(gamma) exists only for o_2")
        return o2_character(_scalar_arg(F, args[0]), F)
    if head == "tensor":
        if not args:
            raise ValueError("tensor needs at least one factor")
        return tensor_all([rec(a) for a in args])
    if head == "sym":
        return sym_power(n, int(args[0]), F, form)
    if head == "wedge":
        return wedge_power(n, int(args[0]), F, form)
    if head == "restrict":
        m = rec(args[0])
        if m.form is None:
            raise ValueError("restriction needs a flavor")
        return m.restrict()
    if head == "hw":
        return highest_weight_submodule(rec(args[0]), [_scalar_arg(F, x) for x in args[1]], allow_outside_alcove)
    if head == "irrep":
        return gl_irreducible([_scalar_arg(F, x) for x in args[0]], n, F, form)
    if head == "gpart":
        if form is None:
            raise ValueError("gpart needs a flavor")
        return g_irreducible(args[0], form, F, allow_outside_alcove)
    raise ValueError(f"unknown module constructor {head!r}")


def _scalar_arg(F: FieldSpec, x):
    if isinstance(x, str):
        return F(Fraction(x))
    return F(x)
