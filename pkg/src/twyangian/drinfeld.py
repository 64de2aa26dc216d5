"""Drinfeld polynomials of twisted Yangian modules.

Arrow recovery, the o_2 pair (P, gamma), type tags, gamma reordering, and the
two pipelines: ``pipeline_extract`` reads Drinfeld data off a module spec and
``pipeline_build`` writes a module spec realizing given data.

Conventions.  ``nu -> mu`` means nu(u)/mu(u) = P(u+1)/P(u) for a monic P.  The
highest weight (mu_1, ..., mu_n) is indexed by the positive indices 1..n, so
mu_1 is the component seen by the rank-one subalgebra on indices +-1.  The
data satisfy mu_1(-u) => mu_1(u) (P_1, symmetric) and mu_i -> mu_{i+1}
(P_{i+1}); in orthogonal type C the chain starts from mu_1 sharp instead.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exactalg import QQ, FactoredRational, FieldSpec, MonicPoly, ModP, even_part_normalizer, q_period
from .liecore import FormData, build_module, trivial_g
from .rtt import evaluation_T
from .twisted import MixedFactors, sharp_factors, top_weight, twisted_eval, unit_vector, x_ratio


class NoSolution(ValueError):
    """No monic polynomial realizes the requested ratio."""


class ExtractionError(ValueError):
    """An arrow condition failed while reading Drinfeld data off a module."""

    def __init__(self, arrow: int, message: str):
        super().__init__(f"arrow {arrow}: {message}")
        self.arrow = arrow


HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# arrows
# ---------------------------------------------------------------------------


def string_poly(F: FieldSpec, a, c) -> MonicPoly:
    """prod_{j=1}^{c-a} (u - (a + j)), the polynomial with P(u+1)/P(u) = (u-a)/(u-c)."""
    gap = F.integer_gap(a, c)
    if gap is None:
        raise NoSolution(f"{c} - {a} is not a positive integer")
    a = F(a)
    return MonicPoly.from_roots(F, [a + j for j in range(1, gap + 1)])


def arrow_ratio(P: MonicPoly) -> FactoredRational:
    """P(u+1)/P(u) in factored form."""
    F = P.field
    roots = P.roots()
    return FactoredRational(F, tuple(r - 1 for r in roots), tuple(roots)).reduce()


def _pairings_q(A: list, C: list, F: FieldSpec) -> list[tuple]:
    """Over Q: sorted matching inside each Z-coset, the only candidate needed."""
    groups: dict[Fraction, tuple[list, list]] = {}
    for a in A:
        groups.setdefault(a - (a.numerator // a.denominator), ([], []))[0].append(a)
    for c in C:
        key = c - (c.numerator // c.denominator)
        if key not in groups:
            raise NoSolution(f"denominator root {c} has no partner in its integer coset")
        groups[key][1].append(c)
    pairs = []
    for key, (ga, gc) in groups.items():
        if len(ga) != len(gc):
            raise NoSolution(f"coset {key} has unequal numbers of roots")
        for a, c in zip(sorted(ga), sorted(gc)):
            if F.integer_gap(a, c) is None:
                raise NoSolution(f"no positive integer gap from {a} to {c}")
            pairs.append((a, c))
    return pairs


def _optimal_pairings_fp(A: list, C: list, F: FieldSpec) -> list[list[tuple]]:
    """Over F_p: every minimum-cost perfect matching up to permuting equal roots."""
    k = len(A)
    if k > 16:
        raise ValueError("too many roots for exact matching")
    cost = [[F.integer_gap(a, c) for c in C] for a in A]

    @lru_cache(maxsize=None)
    def best(i: int, mask: int) -> int:
        if i == k:
            return 0
        out = None
        for j in range(k):
            if mask >> j & 1 or cost[i][j] is None:
                continue
            rest = best(i + 1, mask | 1 << j)
            if rest >= 0:
                tot = cost[i][j] + rest
                out = tot if out is None or tot < out else out
        return -1 if out is None else out

    if best(0, 0) < 0:
        raise NoSolution("no perfect pairing with positive integer gaps")
    results: list[list[tuple]] = []

    def walk(i: int, mask: int, acc: list):
        if i == k:
            results.append(list(acc))
            return
        target = best(i, mask)
        seen = set()
        for j in range(k):
            if mask >> j & 1 or cost[i][j] is None or C[j] in seen:
                continue
            rest = best(i + 1, mask | 1 << j)
            if rest >= 0 and cost[i][j] + rest == target:
                seen.add(C[j])
                acc.append((A[i], C[j]))
                walk(i + 1, mask | 1 << j, acc)
                acc.pop()

    walk(0, 0, [])
    return results


def _roots_of_pairs(F: FieldSpec, pairs) -> list:
    out = []
    for a, c in pairs:
        a = F(a)
        out.extend(a + j for j in range(1, F.integer_gap(a, c) + 1))
    return sorted(out, key=F.sort_key)


def _poly_of_pairs(F: FieldSpec, pairs) -> MonicPoly:
    return MonicPoly.from_roots(F, _roots_of_pairs(F, pairs))


def _symmetric_roots(F: FieldSpec, roots: list) -> bool:
    """Whether the root multiset is stable under a -> 1 - a, i.e. P(u) = P(-u+1)."""
    return Counter(roots) == Counter(F.one - a for a in roots)


def recover_arrow(nu: FactoredRational, mu: FactoredRational, symmetric: bool = False, max_degree: int | None = None) -> MonicPoly:
    """Degree-minimal monic P with nu/mu = P(u+1)/P(u).

    With ``symmetric`` the answer must also satisfy P(u) = P(-u+1); over F_p a
    symmetric minimizer is preferred among the optimal pairings.  Solutions
    of degree above ``max_degree`` are reported as :class:`NoSolution`.
    """
    F = nu.field
    r = (nu / mu).reduce()
    if r.prefactor != 1 or r.excess != 0:
        raise NoSolution("ratio does not tend to 1 at infinity")
    A, C = list(r.num), list(r.den)
    if not A:
        return MonicPoly.one(F)
    if F.p == 0:
        pairings = [_pairings_q(A, C, F)]
    else:
        pairings = _optimal_pairings_fp(A, C, F)
    degree = sum(F.integer_gap(a, c) for a, c in pairings[0])
    if max_degree is not None and degree > max_degree:
        raise NoSolution(f"every solution has degree {degree} > {max_degree}")
    cands = [_roots_of_pairs(F, prs) for prs in pairings]
    if symmetric:
        cands = [rs for rs in cands if _symmetric_roots(F, rs)]
        if not cands:
            raise NoSolution("no degree-minimal solution is symmetric under u -> 1 - u")
    best = min(cands, key=lambda rs: [F.sort_key(x) for x in rs])
    return MonicPoly.from_roots(F, best)


def differs_by_qp(P: MonicPoly, Q: MonicPoly) -> bool:
    """True when P/Q is a power of q_p(u) = u^p - u (q_p(u + c) = q_p(u) for c in F_p)."""
    F = P.field
    q = q_period(F)

    def strip(X: MonicPoly) -> MonicPoly:
        while X.degree >= q.degree:
            Y = X.exact_div(q)
            if Y is None:
                break
            X = Y
        return X

    return strip(P).coeffs == strip(Q).coeffs


# ---------------------------------------------------------------------------
# the rank-one orthogonal pair
# ---------------------------------------------------------------------------


def mu_prime(mu: FactoredRational) -> FactoredRational:
    """(1 + u^{-1}/2) mu(u)."""
    F = mu.field
    return mu * FactoredRational(F, (-F(HALF),), (F.zero,))


def recover_pair_o2(mu: FactoredRational) -> tuple[MonicPoly, object]:
    """(P, gamma) with mu'(-u)/mu'(u) = P(u+1)/P(u) (u - gamma)/(u + gamma), P symmetric, P(gamma) != 0.

    Write mu'(u) = prod (1 - gamma_i u^{-1}) after clearing an even factor
    (which leaves the ratio unchanged), padded with a zero root to an odd
    count.  The gamma_i are ordered by the pair-sum minimality rule and
    gamma = -gamma_{2k+1} is minus the leftover root; P is then forced.
    Several leftovers can satisfy the ordering rule when sums tie or none is
    admissible; the greedy one is tried first.
    """
    F = mu.field
    m1 = mu_prime(mu)
    r = (m1.neg_u() / m1).reduce()
    _, poly = even_part_normalizer(m1)
    roots = list(poly.num)
    if len(roots) % 2 == 0:
        roots.append(F.zero)
    one = FactoredRational.one(F)
    for c in _leftover_candidates(roots, F):
        g = -c
        try:
            P = recover_arrow(r * FactoredRational(F, (-g,), (g,)), one, symmetric=True)
        except NoSolution:
            continue
        if P(g) != 0:
            return P, g
    raise NoSolution("no pair (P, gamma) satisfies the rank-one relation")


def _leftover_candidates(roots: list, F: FieldSpec) -> list:
    """Roots that can sit last in an ordering obeying the pair-sum rule, greedy choice first."""
    out = [reorder_gammas(roots, F)[-1]]
    for c in sorted(set(roots), key=F.sort_key):
        if c in out:
            continue
        rest = list(roots)
        rest.remove(c)
        if ordering_condition_holds(reorder_gammas(rest, F) + [c], F):
            out.append(c)
    return out


def classify_type(gamma, F: FieldSpec = QQ) -> str:
    """A for gamma = 1/2, B for gamma in -1/2 - Z_+, C for gamma in 3/2 + Z_+; always A in characteristic p."""
    if F.p:
        return "A"
    g = F(gamma)
    shifted = g - HALF
    if shifted.denominator != 1:
        raise ValueError(f"gamma = {g} is not a half-integer")
    if shifted == 0:
        return "A"
    return "B" if shifted < 0 else "C"


def sharp_weight(mu: FactoredRational, gamma) -> FactoredRational:
    """mu(u) (u - gamma + 1)/(u + gamma)."""
    F = mu.field
    g = F(gamma)
    return (mu * FactoredRational(F, (g - 1,), (-g,))).reduce()


def half_strings(F: FieldSpec, delta: int) -> MonicPoly:
    """prod_{j=1}^{delta} (u - (j - 1/2)) (u - (1/2 - delta + j)), the factor absorbing a type B gamma."""
    h = F(HALF)
    roots = [h + (j - 1) for j in range(1, delta + 1)] + [h - delta + j for j in range(1, delta + 1)]
    return MonicPoly.from_roots(F, roots)


# ---------------------------------------------------------------------------
# reordering of evaluation parameters
# ---------------------------------------------------------------------------


def _sum_key(F: FieldSpec, s):
    """Sort key of a pair sum if it is admissible (Z_+ over Q, anything over F_p), else None."""
    s = F(s)
    if F.p:
        return s.v
    if s.denominator == 1 and s >= 0:
        return s
    return None


def reorder_gammas(gammas: Sequence, F: FieldSpec = QQ) -> list:
    """Greedy pairing: repeatedly move the admissible pair with the smallest sum to the front."""
    rest = [F(g) for g in gammas]
    out = []
    while len(rest) >= 2:
        best = None
        for i in range(len(rest)):
            for j in range(i + 1, len(rest)):
                key = _sum_key(F, rest[i] + rest[j])
                if key is not None and (best is None or key < best[0]):
                    best = (key, i, j)
        if best is None:
            out.extend(rest)
            return out
        _, i, j = best
        out.extend([rest[i], rest[j]])
        rest = [g for k, g in enumerate(rest) if k not in (i, j)]
    return out + rest


def ordering_condition_holds(gammas: Sequence, F: FieldSpec = QQ) -> bool:
    """For each leading pair: if any admissible sum remains, the pair's sum is admissible and minimal."""
    gs = [F(g) for g in gammas]
    for i in range(0, len(gs) - 1, 2):
        tail = gs[i:]
        keys = [_sum_key(F, tail[p] + tail[q]) for p in range(len(tail)) for q in range(p + 1, len(tail))]
        keys = [k for k in keys if k is not None]
        if not keys:
            continue
        lead = _sum_key(F, gs[i] + gs[i + 1])
        if lead is None or lead != min(keys):
            return False
    return True


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------


def _json_scalar(F: FieldSpec, x):
    return F.to_json(F(x))


def _g_to_json(g: FactoredRational):
    num, den = x_ratio(g)
    F = g.field
    num = [F.to_json(c) for c in _trim(num)]
    den = [F.to_json(c) for c in _trim(den)]
    return num if den == [1] else {"num": num, "den": den}


def _g_from_json(F: FieldSpec, v) -> FactoredRational:
    if isinstance(v, dict):
        return FactoredRational.from_x_ratio(F, [F.from_json(c) for c in v["num"]], [F.from_json(c) for c in v["den"]])
    return FactoredRational.from_x_poly(F, [F.from_json(c) for c in v])


def _trim(cs: list) -> list:
    cs = list(cs)
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return cs


def _is_even(g: FactoredRational) -> bool:
    return g.neg_u().equals(g)


@dataclass(frozen=True, eq=False)
class DrinfeldData:
    """(P_1, ..., P_n) with the even factor g of mu_1, plus gamma and the type for the orthogonal flavor."""

    field: FieldSpec
    flavor: str
    polys: tuple
    g: FactoredRational = None
    gamma: object = None
    type_tag: str | None = None

    def __post_init__(self):
        if self.g is None:
            object.__setattr__(self, "g", FactoredRational.one(self.field))

    @property
    def n(self) -> int:
        return len(self.polys)

    def to_json(self) -> dict:
        F = self.field
        return {
            "field": F.name,
            "flavor": self.flavor,
            "P": [P.to_json() for P in self.polys],
            "gamma": None if self.gamma is None else _json_scalar(F, self.gamma),
            "type": self.type_tag,
            "g": _g_to_json(self.g),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict, F: FieldSpec | None = None) -> "DrinfeldData":
        allowed = {"field", "flavor", "P", "gamma", "type", "g"}
        extra = set(obj) - allowed
        if extra:
            raise ValueError(f"unknown keys {sorted(extra)}")
        F = F or FieldSpec.parse(obj.get("field", "Q"))
        polys = tuple(MonicPoly.make(F, [F.from_json(c) for c in cs]) for cs in obj["P"])
        g = _g_from_json(F, obj["g"]) if obj.get("g") is not None else FactoredRational.one(F)
        gamma = obj.get("gamma")
        gamma = None if gamma is None else F.from_json(gamma)
        return cls(F, obj["flavor"], polys, g, gamma, obj.get("type"))

    def key(self) -> tuple:
        F = self.field
        g_num, g_den = x_ratio(self.g)
        return (
            F.name,
            self.flavor,
            tuple(P.coeffs for P in self.polys),
            (tuple(_trim(g_num)), tuple(_trim(g_den))),
            None if self.gamma is None else F(self.gamma),
            self.type_tag,
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, DrinfeldData) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def reduce_to(self, target: FieldSpec) -> "DrinfeldData":
        """Mod-p reduction; the type tag becomes A as it does for every module in characteristic p."""
        gamma = None if self.gamma is None else target(self.gamma)
        tag = None if self.type_tag is None else ("A" if target.p else self.type_tag)
        return DrinfeldData(target, self.flavor, tuple(P.reduce_to(target) for P in self.polys), self.g.reduce_to(target), gamma, tag)

    def complex_rank(self) -> tuple:
        """The part of the data that survives rank padding.

        Padding a module that is built from the last slots adds polynomials
        equal to 1 just after P_1, so the invariant is (P_n, ..., P_2) with
        trailing 1s dropped, then P_1, g, gamma and the type.
        """
        tail = [P.coeffs for P in reversed(self.polys[1:])]
        while tail and len(tail[-1]) == 1:
            tail.pop()
        g_num, g_den = x_ratio(self.g)
        gamma = None if self.gamma is None else self.field(self.gamma)
        return (tuple(tail), self.polys[0].coeffs, (tuple(_trim(g_num)), tuple(_trim(g_den))), gamma, self.type_tag)

    def __repr__(self) -> str:
        return f"DrinfeldData({self.dumps()})"


# ---------------------------------------------------------------------------
# module specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleSpec:
    """A mixed tensor L(1) (x) ... (x) L(k) (x) V described by build expressions.

    ``gl`` lists gl_N-module expressions for the evaluation factors, ``twisted``
    is the g_n-module expression of V (None for the trivial module),
    ``scale`` an even scalar (num, den) in u^{-1} multiplying S(u), and
    ``sharp`` composes the whole action with the sharp automorphism.
    """

    flavor: str
    n: int
    gl: tuple = ()
    twisted: object = None
    scale: tuple | None = None
    sharp: bool = False

    KEYS = ("flavor", "n", "gl", "twisted", "scale", "sharp")

    def to_json(self) -> dict:
        out = {"flavor": self.flavor, "n": self.n, "gl": [_listify(e) for e in self.gl], "sharp": self.sharp}
        out["twisted"] = None if self.twisted is None else _listify(self.twisted)
        out["scale"] = None if self.scale is None else {"num": list(self.scale[0]), "den": list(self.scale[1])}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "ModuleSpec":
        extra = set(obj) - set(cls.KEYS)
        if extra:
            raise ValueError(f"unknown keys {sorted(extra)}")
        if obj.get("flavor") not in ("o", "sp"):
            raise ValueError("flavor must be 'o' or 'sp'")
        n = obj.get("n")
        if not isinstance(n, int) or n < 1:
            raise ValueError("n must be a positive integer")
        scale = obj.get("scale")
        if scale is not None:
            scale = (tuple(scale["num"]), tuple(scale["den"]))
        return cls(
            obj["flavor"],
            n,
            tuple(_tuplify(e) for e in obj.get("gl", [])),
            None if obj.get("twisted") is None else _tuplify(obj["twisted"]),
            scale,
            bool(obj.get("sharp", False)),
        )

    @classmethod
    def loads(cls, text: str) -> "ModuleSpec":
        return cls.from_json(json.loads(text))

    def form(self) -> FormData:
        return FormData(self.flavor, self.n)


def _tuplify(e):
    return tuple(_tuplify(x) for x in e) if isinstance(e, list) else e


def _listify(e):
    return [_listify(x) for x in e] if isinstance(e, tuple) else e


def realize(spec: ModuleSpec, F: FieldSpec = QQ, allow_outside_alcove: bool = False) -> MixedFactors:
    """Build the factors of a module spec over F."""
    form = spec.form()
    Ts, tops = [], []
    for expr in spec.gl:
        M = build_module(_listify(expr), spec.n, F, form, allow_outside_alcove)
        if M.kind != "gl":
            raise ValueError("evaluation factors must be gl_N-modules")
        Ts.append(evaluation_T(M))
        tops.append(unit_vector(F, M.dim, M.top))
    if spec.twisted is None:
        V = trivial_g(form, F)
    else:
        V = build_module(_listify(spec.twisted), spec.n, F, form, allow_outside_alcove)
    SV = twisted_eval(V)
    scale = None
    if spec.scale is not None:
        scale = (tuple(F(_num(c)) for c in spec.scale[0]), tuple(F(_num(c)) for c in spec.scale[1]))
        g = FactoredRational.from_x_ratio(F, list(scale[0]), list(scale[1]))
        if not g.has_unit_constant_term() or not _is_even(g):
            raise ValueError("scale must be even with constant term 1")
    mf = MixedFactors(form, tuple(Ts), tuple(tops), SV, unit_vector(F, V.dim, V.top), scale)
    return sharp_factors(mf) if spec.sharp else mf


def _num(c):
    return Fraction(c) if isinstance(c, str) else c


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------


def even_factor(mu1: FactoredRational, P1: MonicPoly) -> FactoredRational:
    """g = mu_1(u) u^{deg P_1} / P_1(u), even whenever mu_1(-u) => mu_1(u) via P_1."""
    F = mu1.field
    roots = P1.roots()
    return (mu1 * FactoredRational(F, (F.zero,) * len(roots), tuple(roots))).reduce()


def data_from_weight(mus: Sequence[FactoredRational], flavor: str) -> DrinfeldData:
    """Drinfeld data of a highest weight (mu_1, ..., mu_n)."""
    F = mus[0].field
    gamma = tag = None
    lead = mus[0]
    if flavor == "o":
        try:
            P0, gamma = recover_pair_o2(lead)
        except NoSolution as exc:
            raise ExtractionError(1, f"rank-one pair: {exc}") from None
        try:
            tag = classify_type(gamma, F)
        except ValueError as exc:
            raise ExtractionError(1, str(exc)) from None
        if tag == "C":
            lead = sharp_weight(lead, gamma)
    try:
        P1 = recover_arrow(lead.neg_u(), lead, symmetric=True)
    except NoSolution as exc:
        raise ExtractionError(1, f"double arrow: {exc}") from None
    if flavor == "o" and F.p == 0:
        delta = int(abs(F(gamma) - HALF))
        if P1.coeffs != (P0 * half_strings(F, delta)).coeffs:
            raise ExtractionError(1, "double-arrow polynomial disagrees with the rank-one pair")
    polys = [P1]
    prev = lead
    for i, mu in enumerate(mus[1:], start=2):
        try:
            polys.append(recover_arrow(prev, mu))
        except NoSolution as exc:
            raise ExtractionError(i, str(exc)) from None
        prev = mu
    g = even_factor(lead, P1)
    if not _is_even(g):
        raise ExtractionError(1, "the even factor of mu_1 is not even")
    return DrinfeldData(F, flavor, tuple(polys), g, gamma, tag)


def pipeline_extract(spec: ModuleSpec | MixedFactors, F: FieldSpec = QQ, allow_outside_alcove: bool = False) -> DrinfeldData:
    """Read the Drinfeld data of the highest weight on the top vector of a module spec."""
    mf = spec if isinstance(spec, MixedFactors) else realize(spec, F, allow_outside_alcove)
    flavor = mf.form.flavor
    return data_from_weight(top_weight(mf), flavor)


# ---------------------------------------------------------------------------
# building
# ---------------------------------------------------------------------------


def degree_budget(data: DrinfeldData) -> int:
    """deg P_1 + 2 sum_{i>=2} deg P_i + 2n, which must stay below p."""
    return data.polys[0].degree + 2 * sum(P.degree for P in data.polys[1:]) + 2 * data.n


def mirror_half(P: MonicPoly) -> list:
    """One root from each pair {a, 1 - a} of a symmetric polynomial (the smaller in the field order)."""
    F = P.field
    roots = list(P.roots())
    out = []
    while roots:
        a = roots.pop(0)
        b = F.one - a
        if b not in roots:
            raise ValueError("polynomial is not symmetric under u -> 1 - u")
        roots.remove(b)
        out.append(min(a, b, key=F.sort_key))
    return out


def _gl_factors(F: FieldSpec, n: int, base: MonicPoly, others: Sequence[MonicPoly]) -> list:
    """wedge^k (x) det^{-a}: k = n for the mirror half of ``base``, k = n + i for the roots of P_{i+1}."""
    exprs = []
    for a in mirror_half(base):
        exprs.append(_factor(F, n, a))
    for i, P in enumerate(others, start=1):
        for a in P.roots():
            exprs.append(_factor(F, n + i, a))
    return exprs


def _factor(F: FieldSpec, k: int, a) -> tuple:
    c = F.to_json(-F(a))
    return ("tensor", ("wedge", k), ("one_dim", c))


def validate_data(data: DrinfeldData) -> None:
    F = data.field
    P1 = data.polys[0]
    if not P1.is_symmetric():
        raise ValueError("P_1 must satisfy P_1(u) = P_1(-u+1)")
    if F.p and degree_budget(data) >= F.p:
        raise ValueError(f"degree bound violated: {degree_budget(data)} >= p = {F.p}")
    if not data.g.has_unit_constant_term() or not _is_even(data.g):
        raise ValueError("g must be even with constant term 1")
    if data.flavor == "sp":
        if data.gamma is not None or data.type_tag is not None:
            raise ValueError("gamma and type belong to the orthogonal flavor")
        return
    if data.flavor != "o":
        raise ValueError("flavor must be 'o' or 'sp'")
    if F.p:
        if data.type_tag not in (None, "A"):
            raise ValueError("in characteristic p every module has type A")
        return
    if data.gamma is None or data.type_tag is None:
        raise ValueError("orthogonal data over Q need gamma and a type")
    if classify_type(data.gamma, F) != data.type_tag:
        raise ValueError(f"gamma = {data.gamma} does not have type {data.type_tag}")


def _base_and_delta(data: DrinfeldData) -> tuple[MonicPoly, int, object]:
    """(P of the rank-one pair, delta, gamma of the built module before sharp)."""
    F = data.field
    P1 = data.polys[0]
    g = F(data.gamma)
    if data.type_tag == "C":
        g = F.one - g
    delta = int(HALF - g)
    P0 = P1.exact_div(half_strings(F, delta)) if delta else P1
    if P0 is None:
        raise ValueError("P_1 does not contain the strings forced by gamma")
    if P0(g) == 0:
        raise ValueError("the rank-one polynomial vanishes at gamma")
    return P0, delta, g


def _with_scale(spec: ModuleSpec, F: FieldSpec, target: FactoredRational, allow_outside_alcove: bool) -> ModuleSpec:
    built = pipeline_extract(spec, F, allow_outside_alcove)
    ratio = (target / built.g).reduce()
    if ratio.equals(FactoredRational.one(F)):
        return spec
    num, den = x_ratio(ratio)
    scale = (tuple(F.to_json(c) for c in _trim(num)), tuple(F.to_json(c) for c in _trim(den)))
    return ModuleSpec(spec.flavor, spec.n, spec.gl, spec.twisted, scale, spec.sharp)


def pipeline_build(data: DrinfeldData, allow_outside_alcove: bool = False) -> ModuleSpec:
    """A module spec whose pipeline_extract returns ``data``."""
    validate_data(data)
    F = data.field
    n = data.n
    P1, rest = data.polys[0], data.polys[1:]
    twisted = None
    sharp = False
    if data.flavor == "o" and F.p == 0:
        P0, delta, _ = _base_and_delta(data)
        gl = _gl_factors(F, n, P0, rest)
        if delta:
            twisted = ("gpart", tuple([-delta] * n))
        sharp = data.type_tag == "C"
    else:
        gl = _gl_factors(F, n, P1, rest)
    spec = ModuleSpec(data.flavor, n, tuple(gl), twisted, None, sharp)
    spec = _with_scale(spec, F, data.g, allow_outside_alcove)
    if data.flavor == "o" and F.p:
        got = pipeline_extract(spec, F, allow_outside_alcove)
        if data.gamma is not None and F(data.gamma) != got.gamma:
            raise ValueError(f"in characteristic p gamma is determined by P_1 and g; expected {got.gamma}")
    return spec


def complete_data(data: DrinfeldData) -> DrinfeldData:
    """Fill in gamma for characteristic-p orthogonal data from P_1 and g."""
    if data.flavor != "o" or not data.field.p or data.gamma is not None:
        return data
    got = pipeline_extract(pipeline_build(data))
    return DrinfeldData(data.field, data.flavor, data.polys, data.g, got.gamma, "A")
