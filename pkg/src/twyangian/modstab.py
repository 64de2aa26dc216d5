"""Cross-characteristic stabilization harness.

Finite panels of primes and ranks stand in for an ultraproduct: a module spec
is realized over Q and over F_p for each prime of a panel, Drinfeld data are
extracted everywhere, and the report records exact agreement verdicts along
with the hypotheses (alcove and degree bounds) checked at each prime.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

import flint

from .deligne import weight_embedding
from .drinfeld import DrinfeldData, ModuleSpec, degree_budget, pipeline_extract
from .exactalg import QQ, FieldSpec, is_prime
from .liecore import FormData, alcove_sufficient, build_module

SCHEMA = "twyangian.stability/1"
DEFAULT_PANEL = (101, 211, 307)


# ---------------------------------------------------------------------------
# modular parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModularParams:
    """Pairs (p, s) with q(2s) = 0 in F_p, one pair per prime, primes increasing."""

    q: tuple  # rational coefficients, degree 0 upward
    pairs: tuple

    def __post_init__(self):
        ps = [p for p, _ in self.pairs]
        if any(a >= b for a, b in zip(ps, ps[1:])):
            raise ValueError("primes must be strictly increasing")
        for p, s in self.pairs:
            if p % 2 == 0 or _eval_mod(self.q, 2 * s, p) != 0:
                raise ValueError(f"pair ({p}, {s}) does not satisfy the congruence")

    def with_gap(self, c: int) -> "ModularParams":
        """Only the pairs with p - 2s > c."""
        return ModularParams(self.q, tuple((p, s) for p, s in self.pairs if p - 2 * s > c))

    def to_json(self) -> dict:
        return {"q": [_frac_json(c) for c in self.q], "pairs": [list(x) for x in self.pairs]}


def _frac_json(c: Fraction):
    return c.numerator if c.denominator == 1 else str(c)


def _eval_mod(q: Sequence[Fraction], x: int, p: int) -> int | None:
    """q(x) mod p, or None when a denominator vanishes mod p."""
    acc = 0
    for c in reversed(q):
        if c.denominator % p == 0:
            return None
        acc = (acc * x + c.numerator * pow(c.denominator, -1, p)) % p
    return acc


def find_modular_parameters(q: Sequence, count: int, p_min: int = 3, search_bound: int = 10**6) -> ModularParams:
    """The first ``count`` odd primes p >= p_min with a root s in [0, p) of q(2s) mod p.

    q is given by rational coefficients from degree 0 upward; it must be
    irreducible over Q and have no integer root.  For each prime the smallest
    such s is kept.
    """
    qs = tuple(Fraction(c) for c in q)
    while len(qs) > 1 and qs[-1] == 0:
        qs = qs[:-1]
    if len(qs) < 2:
        raise ValueError("q must have positive degree")
    fq = flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in qs])
    for r, _ in fq.roots():
        if r.q == 1:
            raise ValueError(f"q has the integer root {r}")
    _, factors = fq.factor()
    if len(factors) != 1 or factors[0][1] != 1:
        raise ValueError("q must be irreducible over Q")
    pairs = []
    p = max(3, p_min)
    while len(pairs) < count:
        if p > search_bound:
            raise ValueError(f"found only {len(pairs)} primes below the search bound {search_bound}")
        if is_prime(p):
            for s in range(p):
                v = _eval_mod(qs, 2 * s, p)
                if v is None:
                    break
                if v == 0:
                    pairs.append((p, s))
                    break
        p += 1 if p == 2 else 2 if p % 2 else 1
    return ModularParams(qs, tuple(pairs))


# ---------------------------------------------------------------------------
# rank-generic specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankGenericSpec:
    """A module spec that makes sense at every large rank.

    ``parts`` is a negative partition placed in the last slots of the twisted
    factor's weight.  Each entry of ``gl`` is ``("half", a)`` for
    wedge^n (x) det^{-a}, or ``("tail", j, a)`` for wedge^{2n-j} (x) det^{-a},
    which puts the root a into P_{n-j+1}.
    """

    flavor: str
    parts: tuple = ()
    gl: tuple = ()
    scale: tuple | None = None

    KEYS = ("flavor", "parts", "gl", "scale")

    def __post_init__(self):
        if self.flavor not in ("o", "sp"):
            raise ValueError("flavor must be 'o' or 'sp'")
        weight_embedding(self.parts, len(self.parts))
        for e in self.gl:
            if e[0] == "half" and len(e) == 2:
                continue
            if e[0] == "tail" and len(e) == 3 and int(e[1]) >= 1:
                continue
            raise ValueError(f"bad gl entry {e!r}")

    @property
    def min_rank(self) -> int:
        n = len(self.parts) + 1 if self.parts else 1
        for e in self.gl:
            if e[0] == "tail":
                n = max(n, int(e[1]) + 1)
        return n

    def at_rank(self, n: int) -> ModuleSpec:
        if n < self.min_rank:
            raise ValueError(f"rank {n} is below the minimum {self.min_rank}")
        gl = []
        for e in self.gl:
            k = n if e[0] == "half" else 2 * n - int(e[1])
            a = Fraction(e[-1])
            gl.append(("tensor", ("wedge", k), ("one_dim", _frac_json(-a))))
        twisted = ("gpart", tuple(self.parts)) if self.parts else None
        return ModuleSpec(self.flavor, n, tuple(gl), twisted, self.scale, False)

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor,
            "parts": list(self.parts),
            "gl": [list(e) for e in self.gl],
            "scale": None if self.scale is None else {"num": list(self.scale[0]), "den": list(self.scale[1])},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RankGenericSpec":
        extra = set(obj) - set(cls.KEYS)
        if extra:
            raise ValueError(f"unknown keys {sorted(extra)}")
        scale = obj.get("scale")
        if scale is not None:
            scale = (tuple(scale["num"]), tuple(scale["den"]))
        return cls(obj["flavor"], tuple(obj.get("parts", [])), tuple(tuple(e) for e in obj.get("gl", [])), scale)


# ---------------------------------------------------------------------------
# hypotheses
# ---------------------------------------------------------------------------


def twisted_weight(spec: ModuleSpec) -> tuple | None:
    """Highest g_n-weight of the twisted factor, or None when that factor is one-dimensional."""
    if spec.twisted is None:
        return None
    expr = spec.twisted
    if expr[0] == "gpart":
        return weight_embedding(expr[1], spec.n)
    V = build_module(_as_list(expr), spec.n, QQ, spec.form())
    if V.dim == 1:
        return None
    return tuple(V.weights[V.top])


def _as_list(e):
    return [_as_list(x) for x in e] if isinstance(e, tuple) else e


def check_hypotheses(spec: ModuleSpec, reference: DrinfeldData, p: int) -> dict:
    """Alcove bound -2 lam_n + 2n < p on the twisted factor and the degree bound of the data."""
    w = twisted_weight(spec)
    form = FormData(spec.flavor, spec.n)
    try:
        alcove = True if w is None else alcove_sufficient(w, form, p)
    except ValueError:
        alcove = False
    return {"alcove": bool(alcove), "degree_bound": degree_budget(reference) < p}


# ---------------------------------------------------------------------------
# canonical forms across primes
# ---------------------------------------------------------------------------


def rational_lift(v: int, p: int) -> Fraction | None:
    """The a/b with a = b v mod p and |a|, b <= sqrt(p/2), if one exists."""
    bound = isqrt(p // 2)
    r0, r1 = p, v % p
    s0, s1 = 0, 1
    while r1 > bound:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    out = Fraction(r1, s1)
    return out if (out.numerator - v * out.denominator) % p == 0 else None


def _lift_tree(x, p: int):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        f = rational_lift(x, p)
        return "?" if f is None else _frac_json(f)
    if isinstance(x, list):
        return [_lift_tree(y, p) for y in x]
    if isinstance(x, dict):
        return {k: _lift_tree(v, p) for k, v in x.items()}
    return x


def canonical_form(data: DrinfeldData, reference: DrinfeldData | None = None) -> str:
    """Field-free JSON of the data.

    F_p data that are the reduction of ``reference`` take the reference's
    form; otherwise every residue is replaced by its small rational lift
    (or "?" when there is none).
    """
    if reference is not None and data.field.p and data == reference.reduce_to(data.field):
        data = reference
    obj = data.to_json()
    obj.pop("field")
    if data.field.p:
        obj = {k: (v if k in ("flavor", "type") else _lift_tree(v, data.field.p)) for k, v in obj.items()}
        obj["type"] = None if obj["type"] is None else "*"
    elif obj["type"] is not None:
        obj["type"] = "*"
    return json.dumps(obj, sort_keys=True)


def data_shape(data: DrinfeldData) -> dict:
    """Keys and lengths of the serialized data, independent of the values."""
    obj = data.to_json()
    return {"keys": sorted(obj), "n_polys": len(obj["P"])}


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


@dataclass
class StabilityReport:
    spec: dict
    reference: dict | None
    panel: list = field(default_factory=list)
    agreement: list = field(default_factory=list)
    padding: dict | None = None
    verdict: str = "PASS"

    @property
    def skipped(self) -> list[str]:
        return [e["field"] for e in self.panel if e["status"] == "skipped"]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "spec": self.spec,
            "reference": self.reference,
            "panel": self.panel,
            "agreement": self.agreement,
            "padding": self.padding,
            "verdict": self.verdict,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def _run_panel(spec: ModuleSpec, primes: Sequence[int], compare_to_Q: bool) -> tuple[DrinfeldData, list, list, bool]:
    ref = pipeline_extract(spec, QQ)
    entries, datas = [], []
    ok = True
    for p in sorted(set(primes)):
        F = FieldSpec(p)
        entry = {"field": F.name, "hypotheses": check_hypotheses(spec, ref, p)}
        if not all(entry["hypotheses"].values()):
            entry.update(status="skipped", drinfeld=None, reason="hypothesis violated")
            entries.append(entry)
            continue
        try:
            data = pipeline_extract(spec, F)
        except ZeroDivisionError as exc:
            entry.update(status="skipped", drinfeld=None, reason=f"spec does not reduce: {exc}")
            entries.append(entry)
            continue
        entry.update(status="ran", drinfeld=data.to_json())
        if compare_to_Q:
            entry["matches_reference"] = data == ref.reduce_to(F)
            ok = ok and entry["matches_reference"]
        entries.append(entry)
        datas.append(data)
    forms = [canonical_form(d, ref) for d in datas]
    agreement = [[a == b for b in forms] for a in forms]
    ok = ok and all(all(row) for row in agreement)
    return ref, entries, agreement, ok


def stability_experiment(spec: ModuleSpec | RankGenericSpec, primes: Sequence[int] = DEFAULT_PANEL, compare_to_Q: bool = True, padding: int = 2) -> StabilityReport:
    """Extract Drinfeld data over Q and each F_p of the panel and record exact agreement.

    A :class:`RankGenericSpec` is run at its minimum rank and additionally at
    ``padding`` larger ranks, where the padding-stable part of the data must
    not change (over Q and over every prime that ran).
    """
    if not primes:
        raise ValueError("prime panel is empty")
    generic = isinstance(spec, RankGenericSpec)
    base = spec.at_rank(spec.min_rank) if generic else spec
    ref, entries, agreement, ok = _run_panel(base, primes, compare_to_Q)
    report = StabilityReport(spec.to_json(), {"field": "Q", "drinfeld": ref.to_json()}, entries, agreement)
    if generic and padding:
        ranks = [spec.min_rank + k for k in range(padding + 1)]
        stable = {"Q": [ref.complex_rank() == ref.complex_rank()]}
        ran = [FieldSpec(p) for p in sorted(set(primes)) if FieldSpec(p).name not in report.skipped]
        base_forms = {F.name: pipeline_extract(base, F).complex_rank() for F in ran}
        for n in ranks[1:]:
            padded = spec.at_rank(n)
            stable["Q"].append(pipeline_extract(padded, QQ).complex_rank() == ref.complex_rank())
            for F in ran:
                stable.setdefault(F.name, [True]).append(pipeline_extract(padded, F).complex_rank() == base_forms[F.name])
        report.padding = {"ranks": ranks, "stable": stable}
        ok = ok and all(all(v) for v in stable.values())
    if not ok:
        report.verdict = "FAIL"
    elif len(report.skipped) == len(entries):
        report.verdict = "SKIPPED"
    return report
