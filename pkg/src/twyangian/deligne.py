"""Brauer diagrams: the hom-spaces of Rep(O_t) and Rep(Sp_t).

A diagram from [r] to [s] is a perfect matching on r bottom dots and s top
dots.  Internally bottom dot a is the integer a (0-based) and top dot b is
r + b.  Morphisms are formal combinations with coefficients in Q[t]
(python-flint ``fmpq_poly``).

The evaluation functor sends the fundamental object to K^{2n} with the form
G of the chosen flavor.  For the symplectic flavor V is treated as an odd
vector space: permuting tensor slots carries the Koszul sign, caps are the
G-contraction and cups its inverse.  That assignment is functorial when a
removed loop is worth ``loop_value(flavor, n)``.
"""

from __future__ import annotations

import math
import random
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import flint
import numpy as np

from .liecore import FormData, is_dominant, partition_weight, signed_indices
from .rmatrix import perm_sign

T_GEN = flint.fmpq_poly([0, 1])


# ---------------------------------------------------------------------------
# diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BrauerDiagram:
    r: int
    s: int
    arcs: tuple  # sorted tuple of sorted pairs of dot numbers

    def __post_init__(self):
        pts = sorted(x for arc in self.arcs for x in arc)
        if pts != list(range(self.r + self.s)):
            raise ValueError("arcs must form a perfect matching on all dots")
        canon = tuple(sorted(tuple(sorted(a)) for a in self.arcs))
        object.__setattr__(self, "arcs", canon)

    @classmethod
    def make(cls, r: int, s: int, arcs: Iterable) -> "BrauerDiagram":
        return cls(r, s, tuple(tuple(a) for a in arcs))

    @classmethod
    def identity(cls, r: int) -> "BrauerDiagram":
        return cls(r, r, tuple((a, r + a) for a in range(r)))

    @classmethod
    def cup(cls) -> "BrauerDiagram":
        """[0] -> [2]."""
        return cls(0, 2, ((0, 1),))

    @classmethod
    def cap(cls) -> "BrauerDiagram":
        """[2] -> [0]."""
        return cls(2, 0, ((0, 1),))

    @classmethod
    def empty(cls) -> "BrauerDiagram":
        return cls(0, 0, ())

    def partner(self) -> dict:
        out = {}
        for a, b in self.arcs:
            out[a], out[b] = b, a
        return out

    def is_bottom(self, x: int) -> bool:
        return x < self.r

    def flip(self) -> "BrauerDiagram":
        """Reflect top and bottom: [s] -> [r]."""
        r, s = self.r, self.s
        relabel = lambda x: s + x if x < r else x - r  # noqa: E731
        return BrauerDiagram(s, r, tuple((relabel(a), relabel(b)) for a, b in self.arcs))

    # literal format: [["b1", "t2"], ...]
    def to_literal(self) -> list:
        lab = lambda x: f"b{x + 1}" if x < self.r else f"t{x - self.r + 1}"  # noqa: E731
        return [[lab(a), lab(b)] for a, b in self.arcs]

    @classmethod
    def from_literal(cls, pairs: Sequence, r: int | None = None, s: int | None = None) -> "BrauerDiagram":
        labels = [x for p in pairs for x in p]
        for x in labels:
            if not isinstance(x, str) or len(x) < 2 or x[0] not in "bt" or not x[1:].isdigit() or int(x[1:]) < 1:
                raise ValueError(f"bad dot label {x!r}")
        r = max([int(x[1:]) for x in labels if x[0] == "b"], default=0) if r is None else r
        s = max([int(x[1:]) for x in labels if x[0] == "t"], default=0) if s is None else s
        num = lambda x: int(x[1:]) - 1 + (0 if x[0] == "b" else r)  # noqa: E731
        if any(len(p) != 2 for p in pairs):
            raise ValueError("each arc joins two dots")
        return cls(r, s, tuple((num(a), num(b)) for a, b in pairs))

    def __repr__(self) -> str:
        return f"BrauerDiagram({self.r}->{self.s}: {self.to_literal()})"


def compose_diagrams(A: BrauerDiagram, B: BrauerDiagram) -> tuple[BrauerDiagram, int]:
    """A o B (B first) as a diagram and the number of erased loops."""
    if B.s != A.r:
        raise ValueError(f"arity mismatch: B ends at [{B.s}], A starts at [{A.r}]")
    r1, m, r3 = B.r, B.s, A.s
    # nodes: ("lo", i) bottom of B, ("mid", k) shared row, ("hi", j) top of A
    nb = lambda x: ("lo", x) if x < r1 else ("mid", x - r1)  # noqa: E731
    na = lambda x: ("mid", x) if x < m else ("hi", x - m)  # noqa: E731
    adj: dict = {}
    for a, b in B.arcs:
        adj.setdefault(nb(a), []).append(nb(b))
        adj.setdefault(nb(b), []).append(nb(a))
    for a, b in A.arcs:
        adj.setdefault(na(a), []).append(na(b))
        adj.setdefault(na(b), []).append(na(a))
    label = lambda v: v[1] if v[0] == "lo" else r1 + v[1]  # noqa: E731
    seen: set = set()
    arcs = []
    for start in [("lo", i) for i in range(r1)] + [("hi", j) for j in range(r3)]:
        if start in seen:
            continue
        prev, cur = None, start
        seen.add(cur)
        while True:
            nxt = [v for v in adj[cur] if v != prev] if len(adj[cur]) > 1 else adj[cur]
            prev, cur = cur, nxt[0]
            seen.add(cur)
            if cur[0] != "mid":
                break
        arcs.append((label(start), label(cur)))
    loops = 0
    for k in range(m):
        v = ("mid", k)
        if v in seen:
            continue
        loops += 1
        stack = [v]
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            stack.extend(adj[w])
    return BrauerDiagram(r1, r3, tuple(arcs)), loops


def all_diagrams(r: int, s: int) -> list[BrauerDiagram]:
    """Every perfect matching on r + s dots, in a fixed order."""
    if (r + s) % 2:
        return []
    out = []

    def rec(rest: list, acc: list):
        if not rest:
            out.append(BrauerDiagram(r, s, tuple(acc)))
            return
        a = rest[0]
        for k in range(1, len(rest)):
            rec(rest[1:k] + rest[k + 1 :], acc + [(a, rest[k])])

    rec(list(range(r + s)), [])
    return out


def hom_dimension(r1: int, r2: int) -> int:
    """(2m)!/(m! 2^m) with 2m = r1 + r2, and 0 for odd totals."""
    if (r1 + r2) % 2:
        return 0
    m = (r1 + r2) // 2
    return math.factorial(2 * m) // (math.factorial(m) * 2**m)


def random_diagram(r: int, s: int, rng: random.Random) -> BrauerDiagram:
    pts = list(range(r + s))
    rng.shuffle(pts)
    return BrauerDiagram(r, s, tuple((pts[2 * i], pts[2 * i + 1]) for i in range(len(pts) // 2)))


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


def _poly(c) -> flint.fmpq_poly:
    return c if isinstance(c, flint.fmpq_poly) else flint.fmpq_poly([c])


@dataclass(frozen=True, eq=False)
class BrauerMorphism:
    """sum of coefficient * diagram, all diagrams in Hom([r], [s]), coefficients in Q[t]."""

    r: int
    s: int
    terms: tuple  # ((diagram, fmpq_poly), ...) sorted by arcs, zero terms dropped

    @classmethod
    def make(cls, r: int, s: int, items: Iterable) -> "BrauerMorphism":
        acc: dict = {}
        for d, c in items:
            if (d.r, d.s) != (r, s):
                raise ValueError("diagram arity does not match the morphism")
            acc[d] = acc.get(d, flint.fmpq_poly([0])) + _poly(c)
        terms = tuple(sorted(((d, c) for d, c in acc.items() if not c.is_zero()), key=lambda dc: dc[0].arcs))
        return cls(r, s, terms)

    @classmethod
    def of(cls, d: BrauerDiagram, c=1) -> "BrauerMorphism":
        return cls.make(d.r, d.s, [(d, c)])

    def __add__(self, other: "BrauerMorphism") -> "BrauerMorphism":
        if (self.r, self.s) != (other.r, other.s):
            raise ValueError("arity mismatch")
        return BrauerMorphism.make(self.r, self.s, list(self.terms) + list(other.terms))

    def scale(self, c) -> "BrauerMorphism":
        return BrauerMorphism.make(self.r, self.s, [(d, x * _poly(c)) for d, x in self.terms])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BrauerMorphism)
            and (self.r, self.s) == (other.r, other.s)
            and [(d, list(c.coeffs())) for d, c in self.terms] == [(d, list(c.coeffs())) for d, c in other.terms]
        )

    def __hash__(self) -> int:
        return hash((self.r, self.s, tuple(d for d, _ in self.terms)))

    def at(self, t) -> dict:
        """Coefficients with t evaluated: {diagram: fmpq}."""
        tv = flint.fmpq(t) if not isinstance(t, flint.fmpq) else t
        return {d: c(tv) for d, c in self.terms}


def compose(A: BrauerMorphism | BrauerDiagram, B: BrauerMorphism | BrauerDiagram) -> BrauerMorphism:
    """A o B: stack, join arcs, erase loops multiplying by t for each."""
    if isinstance(A, BrauerDiagram):
        A = BrauerMorphism.of(A)
    if isinstance(B, BrauerDiagram):
        B = BrauerMorphism.of(B)
    if B.s != A.r:
        raise ValueError(f"arity mismatch: [{B.s}] vs [{A.r}]")
    items = []
    for da, ca in A.terms:
        for db, cb in B.terms:
            d, loops = compose_diagrams(da, db)
            items.append((d, ca * cb * T_GEN**loops))
    return BrauerMorphism.make(B.r, A.s, items)


# ---------------------------------------------------------------------------
# evaluation functor
# ---------------------------------------------------------------------------


def loop_value(flavor: str, n: int) -> int:
    """Value of a closed loop under ``evaluate_functor``: 2n (orthogonal), -2n (symplectic)."""
    return 2 * n if flavor == "o" else -2 * n


def _form_arrays(flavor: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    form = FormData(flavor, n)
    ids = signed_indices(n)
    G = np.array([[form.g(i, j) for j in ids] for i in ids], dtype=np.int64)
    # G^2 = +-1, so the inverse is +-G
    return G, G * form.sign


def koszul_sign(D: BrauerDiagram) -> int:
    """Sign of the slot permutation that brings D to the form (through strands | caps) and (through | cups).

    Bottom dots are sorted as: through strands in the order of their top ends,
    then each cap as an adjacent pair; top dots likewise with cups.
    """
    part = D.partner()
    r = D.r
    through = sorted((part[a] for a in range(r) if part[a] >= r))
    bottom = [part[t] for t in through]
    caps = [(a, part[a]) for a in range(r) if part[a] < r and a < part[a]]
    bottom += [x for c in caps for x in c]
    top = list(through)
    cups = [(b, part[b]) for b in range(r, r + D.s) if part[b] >= r and b < part[b]]
    top += [x for c in cups for x in c]
    return perm_sign(bottom) * perm_sign([x - r for x in top])


def evaluate_functor(D: BrauerDiagram | BrauerMorphism, flavor: str, n: int) -> np.ndarray:
    """Matrix of the image on (K^{2n})^{(x) r} -> (K^{2n})^{(x) s}, shape (N^s, N^r).

    Through strands are identities, caps contract with G, cups insert G^{-1};
    the symplectic flavor carries the Koszul sign of an odd space.
    """
    N = 2 * n
    if isinstance(D, BrauerMorphism):
        out = np.zeros((N**D.s, N**D.r), dtype=object)
        tv = loop_value(flavor, n)
        for d, c in D.terms:
            val = c(flint.fmpq(tv))
            if val.q != 1:
                raise ValueError("non-integral coefficient at the evaluated loop value")
            out = out + int(val.p) * evaluate_functor(d, flavor, n).astype(object)
        return out
    G, Ginv = _form_arrays(flavor, n)
    eye = np.eye(N, dtype=np.int64)
    letters = string.ascii_letters
    r, s = D.r, D.s
    # dot x gets letter letters[x]; output order: top dots then bottom dots
    operands, subs = [], []
    for a, b in D.arcs:
        if a < r and b < r:
            operands.append(G)
        elif a >= r and b >= r:
            operands.append(Ginv)
        else:
            operands.append(eye)
        subs.append(letters[a] + letters[b])
    out_sub = "".join(letters[r + j] for j in range(s)) + "".join(letters[i] for i in range(r))
    if not operands:
        return np.ones((1, 1), dtype=np.int64)
    M = np.einsum(",".join(subs) + "->" + out_sub, *operands)
    M = M.reshape(N**s, N**r)
    if flavor == "sp":
        M = M * koszul_sign(D)
    return M


def compose_check(A: BrauerDiagram, B: BrauerDiagram, flavor: str, n: int) -> bool:
    """evaluate(A o B) == evaluate(A) @ evaluate(B) with t set to the loop value."""
    lhs = evaluate_functor(compose(A, B), flavor, n)
    rhs = evaluate_functor(A, flavor, n).astype(object) @ evaluate_functor(B, flavor, n).astype(object)
    return bool(np.array_equal(lhs, rhs))


def cup_cap_probe(flavor: str, n: int) -> int:
    """cap o cup evaluated as operators on K^{2n}."""
    M = evaluate_functor(BrauerDiagram.cap(), flavor, n) @ evaluate_functor(BrauerDiagram.cup(), flavor, n)
    return int(M[0, 0])


def hom_rank(r1: int, r2: int, flavor: str, n: int) -> int:
    """Rank of the span of all evaluated diagrams in Hom([r1], [r2])."""
    ds = all_diagrams(r1, r2)
    if not ds:
        return 0
    rows = [evaluate_functor(d, flavor, n).ravel().tolist() for d in ds]
    return flint.fmpq_mat(rows).rank()


# ---------------------------------------------------------------------------
# Gram determinants
# ---------------------------------------------------------------------------


def closure_loops(D: BrauerDiagram) -> int:
    """Loops made by joining top dot j to bottom dot j of an endomorphism diagram."""
    if D.r != D.s:
        raise ValueError("closure needs an endomorphism")
    m = D.r
    part = D.partner()
    seen = set()
    loops = 0
    for start in range(2 * m):
        if start in seen:
            continue
        loops += 1
        x = start
        while x not in seen:
            seen.add(x)
            y = part[x]
            seen.add(y)
            x = y + m if y < m else y - m  # closing strand
    return loops


def gram_exponents(m: int) -> tuple[list[BrauerDiagram], list[list[int]]]:
    """Diagram basis of End([m]) and the loop counts of closure(flip(D) o E)."""
    ds = all_diagrams(m, m)
    mat = []
    for D in ds:
        Dt = D.flip()
        row = []
        for E in ds:
            d, loops = compose_diagrams(Dt, E)
            row.append(loops + closure_loops(d))
        mat.append(row)
    return ds, mat


def gram_determinant(m: int) -> flint.fmpq_poly:
    """det of the pairing <D, E> = t^{loops of closure(flip(D) o E)} on End([m]), as a polynomial in t."""
    if m > 4:
        raise ValueError("m must be at most 4")
    if m == 0:
        return flint.fmpq_poly([1])
    _, ex = gram_exponents(m)
    deg = m * len(ex)
    values = []
    for t in range(deg + 1):
        values.append(int(flint.fmpz_mat([[t**e for e in row] for row in ex]).det()))
    return _newton_interpolate(values)


def _newton_interpolate(values: list[int]) -> flint.fmpq_poly:
    """Polynomial through (k, values[k]) for k = 0..len-1 via forward differences."""
    diffs = []
    cur = list(values)
    while cur:
        diffs.append(cur[0])
        cur = [b - a for a, b in zip(cur, cur[1:])]
    out = flint.fmpq_poly([0])
    basis = flint.fmpq_poly([1])
    for k, d in enumerate(diffs):
        if d:
            out += basis * flint.fmpq(d, math.factorial(k))
        basis = basis * flint.fmpq_poly([-k, 1])
    return out


def image_gram_determinant(m: int, flavor: str, n: int) -> int:
    """det of tr(ev(flip D) ev(E)) over the diagram basis (supertrace for the symplectic flavor)."""
    ds = all_diagrams(m, m)
    imgs = [evaluate_functor(D, flavor, n).astype(object) for D in ds]
    flips = [evaluate_functor(D.flip(), flavor, n).astype(object) for D in ds]
    sgn = (-1) ** m if flavor == "sp" else 1
    rows = [[int(np.trace(F @ E)) * sgn for E in imgs] for F in flips]
    return int(flint.fmpz_mat(rows).det())


# ---------------------------------------------------------------------------
# negative partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NegativePartition:
    parts: tuple

    def __post_init__(self):
        ps = tuple(int(x) for x in self.parts)
        if any(x >= 0 for x in ps):
            raise ValueError("parts must be negative")
        if any(a < b for a, b in zip(ps, ps[1:])):
            raise ValueError("parts must be weakly decreasing")
        object.__setattr__(self, "parts", ps)

    def __len__(self) -> int:
        return len(self.parts)


def weight_embedding(lam: NegativePartition | Sequence, n: int) -> tuple:
    """The dominant g_n-weight with the parts of lam in the last len(lam) slots, in order."""
    parts = lam.parts if isinstance(lam, NegativePartition) else NegativePartition(tuple(lam)).parts
    if n < len(parts):
        raise ValueError(f"rank {n} is smaller than the number of parts {len(parts)}")
    w = partition_weight(parts, n) if parts else (0,) * n
    assert is_dominant(w)
    return w
