"""Command-line front end.

Subcommands: verify, drinfeld, stability, brauer, qdet, sdet.  Every command
prints (or writes with --out) a JSON report that embeds the library version
and a hash of the parsed configuration.  Exit codes: 0 success, 1 a check
failed, 2 bad configuration, 3 a hypothesis of the stability panel failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

from . import __version__
from .deligne import (
    BrauerDiagram,
    all_diagrams,
    compose,
    compose_check,
    cup_cap_probe,
    gram_determinant,
    hom_dimension,
    loop_value,
    random_diagram,
)
from .drinfeld import ExtractionError, ModuleSpec, pipeline_build, pipeline_extract, realize
from .exactalg import FactoredRational, FieldSpec, kron
from .liecore import FormData, build_module
from .modstab import DEFAULT_PANEL, RankGenericSpec, stability_experiment
from .rmatrix import antisymmetrizer, check_yang_baxter, fused_R
from .rtt import check_central, check_qdet_antisymmetrizer, check_ternary, coproduct_T, evaluation_T, qdet
from .twisted import (
    alpha_N,
    beta_N,
    check_sdet_parity,
    check_relations,
    full_operator,
    mixed_tensor,
    rescale,
    sdet,
    sdet_from_qdet,
    sharp,
    top_vector,
    twisted_eval,
    twisted_S,
    zhc_decomposition_check,
)

REPORT_SCHEMA = "twyangian.report/1"
DEFAULT_SEED = 20240101
COMMANDS = ("verify", "drinfeld", "stability", "brauer", "qdet", "sdet")
SUITES = ("ternary", "quaternary", "yang-baxter", "fused", "qdet", "sdet", "zhc", "all")


class ConfigError(ValueError):
    """Raised for an invalid run configuration (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    field: str = "Q"
    flavor: str | None = None
    n: int = 1
    spec: str | None = None
    order: int = 10
    out: str | None = None
    primes: tuple = DEFAULT_PANEL
    seed: int = DEFAULT_SEED
    suite: str = "all"
    roundtrip: bool = False
    action: str = "summary"
    diagrams: tuple = ()

    KEYS = (
        "command", "field", "flavor", "n", "spec", "order", "out", "primes", "seed", "suite", "roundtrip", "action", "diagrams",
    )

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        extra = set(obj) - set(cls.KEYS)
        if extra:
            raise ConfigError(f"unknown configuration keys {sorted(extra)}")
        cfg = cls(**obj)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        try:
            FieldSpec.parse(self.field)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.flavor not in (None, "o", "sp"):
            raise ConfigError("flavor must be 'o' or 'sp'")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.order < 1:
            raise ConfigError("order must be positive")
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.command == "stability" and not self.primes:
            raise ConfigError("prime panel is empty")
        for p in self.primes:
            try:
                FieldSpec(int(p))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.command == "drinfeld" and self.spec is None:
            raise ConfigError("drinfeld needs --spec")
        if self.command == "stability" and self.spec is None:
            raise ConfigError("stability needs --spec")

    @property
    def F(self) -> FieldSpec:
        return FieldSpec.parse(self.field)

    def hash(self) -> str:
        obj = asdict(self)
        obj.pop("out")
        if self.spec is not None:
            obj["spec_contents"] = _read_spec_text(self.spec)
        text = json.dumps(obj, sort_keys=True, default=list)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def flavors(self) -> tuple:
        return (self.flavor,) if self.flavor else ("o", "sp")


def _read_spec_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read spec file: {exc}") from None


# ---------------------------------------------------------------------------
# report items
# ---------------------------------------------------------------------------


@dataclass
class Item:
    name: str
    holds: bool
    location: object = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": "PASS" if self.holds else "FAIL"}
        if self.location is not None:
            out["location"] = _jsonable(self.location)
        return out


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return str(x)


def _rel(name: str, rep) -> Item:
    return Item(name, bool(rep.holds), getattr(rep, "location", None))


# ---------------------------------------------------------------------------
# module corpus
# ---------------------------------------------------------------------------


def gl_corpus(n: int, F: FieldSpec) -> list[tuple[str, Callable]]:
    """Named Yangian matrices T(u): evaluation modules and 2-, 3-fold tensor products."""
    ev = lambda expr: evaluation_T(build_module(expr, n, F))  # noqa: E731
    return [
        ("eval natural", lambda: ev(["natural"])),
        ("eval dual", lambda: ev(["dual"])),
        ("eval wedge^2 (x) det^(1/2)", lambda: ev(["tensor", ["wedge", 2], ["one_dim", "1/2"]])),
        ("natural (x) natural", lambda: coproduct_T([ev(["natural"]), ev(["tensor", ["natural"], ["one_dim", 3]])])),
        ("natural (x) dual", lambda: coproduct_T([ev(["natural"]), ev(["dual"])])),
        ("natural (x) natural (x) natural", lambda: coproduct_T([ev(["natural"]), ev(["tensor", ["natural"], ["one_dim", -1]]), ev(["natural"])])),
    ]


def twisted_corpus(flavor: str, n: int, F: FieldSpec) -> list[tuple[str, Callable]]:
    """Named twisted matrices S(u): evaluation modules, restricted tensors and mixed tensors."""
    form = FormData(flavor, n)
    ev = lambda expr: evaluation_T(build_module(expr, n, F, form))  # noqa: E731
    g = lambda expr: twisted_eval(build_module(expr, n, F, form))  # noqa: E731
    items = [
        ("g-eval natural", lambda: g(["restrict", ["natural"]])),
        ("g-eval wedge^2", lambda: g(["restrict", ["wedge", 2]])),
        ("T T'(-u) on eval natural", lambda: twisted_S(ev(["natural"]), form)),
        ("T T'(-u) on natural (x) natural", lambda: twisted_S(coproduct_T([ev(["natural"]), ev(["tensor", ["natural"], ["one_dim", 2]])]), form)),
        ("mixed: eval natural (x) g-eval natural", lambda: mixed_tensor(g(["restrict", ["natural"]]), [ev(["natural"])])),
        ("mixed: eval L(1,-1)-type (x) trivial", lambda: mixed_tensor(g(["trivial"]), [ev(["tensor", ["wedge", n], ["one_dim", -1]])])),
    ]
    if flavor == "o":
        items.append(("sharp of mixed", lambda: sharp(mixed_tensor(g(["restrict", ["natural"]]), [ev(["natural"])]))))
    half = F(1) / F(2)
    items.append(("rescaled g-eval natural", lambda: rescale(g(["restrict", ["natural"]]), FactoredRational(F, (half, -half), (F(1), F(-1))))))
    return items


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def suite_ternary(cfg: RunConfig) -> list[Item]:
    F = cfg.F
    return [_rel(f"ternary N={2 * cfg.n}: {name}", check_ternary(make())) for name, make in gl_corpus(cfg.n, F)]


def suite_quaternary(cfg: RunConfig) -> list[Item]:
    F = cfg.F
    out = []
    for flavor in cfg.flavors():
        for name, make in twisted_corpus(flavor, cfg.n, F):
            out.append(_rel(f"quaternary+symmetry {flavor} n={cfg.n}: {name}", check_relations(make())))
    return out


def suite_yang_baxter(cfg: RunConfig) -> list[Item]:
    F = cfg.F
    out = []
    for flavor in cfg.flavors():
        form = FormData(flavor, cfg.n)
        for variant in ("plain", "transposed", "final_transposed"):
            rep = check_yang_baxter(variant, form, None, F)
            out.append(Item(f"yang-baxter {variant} {flavor} N={form.N}", rep.holds, None if rep.holds else rep.residual_degree))
    return out


def suite_fused(cfg: RunConfig) -> list[Item]:
    F = cfg.F
    N = 2 * cfg.n
    out = []
    for m in range(2, min(N, 4) + 1):
        pts = list(range(m - 1, -1, -1))
        out.append(Item(f"fused R at points m-1..0 = A_{m} (N={N})", fused_R(pts, N, F).equals(antisymmetrizer(m, N, F))))
    return out


def suite_qdet(cfg: RunConfig) -> list[Item]:
    F = cfg.F
    out = []
    for name, make in gl_corpus(cfg.n, F)[:4]:
        T = make()
        out.append(_rel(f"qdet antisymmetrizer route: {name}", check_qdet_antisymmetrizer(T)))
        out.append(_rel(f"qdet central: {name}", check_central(qdet(T), T)))
    return out


def suite_sdet(cfg: RunConfig) -> list[Item]:
    F = cfg.F
    out = []
    Ns = sorted({2, 2 * cfg.n})
    for flavor in cfg.flavors():
        for N in Ns:
            form = FormData(flavor, N // 2)
            out.append(Item(f"beta_{N} = alpha_{N} ({flavor})", beta_N(form, F, cfg.order).equals(alpha_N(form, F).expand(cfg.order))))
        form = FormData(flavor, cfg.n)
        for name, make in gl_corpus(cfg.n, F)[:2]:
            T = make()
            S = twisted_S(T, form)
            sd = sdet(S)
            lhs = sd.scalar_series(top_vector(T), cfg.order)
            rhs = sdet_from_qdet(T, form, cfg.order)
            out.append(Item(f"sdet = alpha qdet(u) qdet(-u+N-1) {flavor}: {name}", lhs.equals(rhs)))
            out.append(_rel(f"sdet central {flavor}: {name}", check_central(sd, S)))
    return out


def suite_zhc(cfg: RunConfig) -> list[Item]:
    F = cfg.F
    out = []
    for flavor in cfg.flavors():
        form = FormData(flavor, cfg.n)
        for name, make in gl_corpus(cfg.n, F)[:2]:
            rep = zhc_decomposition_check(make(), form, (1, 1), cfg.order)
            out.append(Item(f"Z_HC decomposition {flavor}: {name}", rep.holds, None if rep.holds else rep.detail))
    return out


SUITE_FUNCS = {
    "ternary": suite_ternary,
    "quaternary": suite_quaternary,
    "yang-baxter": suite_yang_baxter,
    "fused": suite_fused,
    "qdet": suite_qdet,
    "sdet": suite_sdet,
    "zhc": suite_zhc,
}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _envelope(cfg: RunConfig, body: dict) -> dict:
    return {"schema": REPORT_SCHEMA, "version": __version__, "config_hash": cfg.hash(), "command": cfg.command, **body}


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    names = [s for s in SUITES if s != "all"] if cfg.suite == "all" else [cfg.suite]
    items: list[Item] = []
    for s in names:
        items.extend(SUITE_FUNCS[s](cfg))
    ok = all(it.holds for it in items)
    body = {"field": cfg.field, "n": cfg.n, "suites": names, "items": [it.to_json() for it in items], "verdict": "PASS" if ok else "FAIL"}
    return (0 if ok else 1), _envelope(cfg, body)


def load_module_spec(path: str) -> ModuleSpec:
    try:
        return ModuleSpec.loads(_read_spec_text(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad module spec: {exc}") from None


def cmd_drinfeld(cfg: RunConfig) -> tuple[int, dict]:
    spec = load_module_spec(cfg.spec)
    F = cfg.F
    try:
        data = pipeline_extract(spec, F)
    except ExtractionError as exc:
        return 1, _envelope(cfg, {"error": str(exc), "arrow": exc.arrow, "verdict": "FAIL"})
    body = {"drinfeld": data.to_json()}
    code = 0
    if cfg.roundtrip:
        rebuilt = pipeline_build(data)
        again = pipeline_extract(rebuilt, F)
        fixed = again == data
        body["roundtrip"] = {"spec": rebuilt.to_json(), "drinfeld": again.to_json(), "fixed_point": fixed}
        code = 0 if fixed else 1
    body["verdict"] = "PASS" if code == 0 else "FAIL"
    return code, _envelope(cfg, body)


def cmd_stability(cfg: RunConfig) -> tuple[int, dict]:
    text = _read_spec_text(cfg.spec)
    try:
        obj = json.loads(text)
        spec = ModuleSpec.from_json(obj) if "n" in obj else RankGenericSpec.from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad spec: {exc}") from None
    report = stability_experiment(spec, [int(p) for p in cfg.primes], compare_to_Q=True)
    body = report.to_json()
    if report.verdict == "FAIL":
        code = 1
    elif report.skipped:
        code = 3
    else:
        code = 0
    return code, _envelope(cfg, body)


def cmd_brauer(cfg: RunConfig) -> tuple[int, dict]:
    flavors = cfg.flavors()
    if cfg.action == "compose":
        if len(cfg.diagrams) != 2:
            raise ConfigError("compose needs two diagrams: --diagram A --diagram B (A after B)")
        try:
            A, B = (_parse_diagram(d) for d in cfg.diagrams)
            M = compose(A, B)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        terms = [{"diagram": d.to_literal(), "coeff": [str(c) for c in coef.coeffs()]} for d, coef in M.terms]
        return 0, _envelope(cfg, {"source": M.r, "target": M.s, "terms": terms})
    if cfg.action == "gram":
        m = cfg.n
        g = gram_determinant(m)
        return 0, _envelope(cfg, {"m": m, "gram_determinant": [str(c) for c in g.coeffs()]})
    # summary: hom dimensions, loop probes and functoriality on random pairs
    rng = random.Random(cfg.seed)
    items = []
    for total in range(0, 11, 2):
        for r1 in range(total + 1):
            items.append(Item(f"hom_dimension({r1},{total - r1})", hom_dimension(r1, total - r1) == len(all_diagrams(r1, total - r1))))
    for flavor in flavors:
        n = cfg.n
        items.append(Item(f"loop probe {flavor} n={n} equals {loop_value(flavor, n)}", cup_cap_probe(flavor, n) == loop_value(flavor, n)))
        bad = 0
        for _ in range(50):
            r, m, s = _random_arities(rng)
            if not compose_check(random_diagram(m, s, rng), random_diagram(r, m, rng), flavor, n):
                bad += 1
        items.append(Item(f"functoriality {flavor} n={n} (50 random pairs)", bad == 0, bad or None))
    ok = all(it.holds for it in items)
    return (0 if ok else 1), _envelope(cfg, {"items": [it.to_json() for it in items], "verdict": "PASS" if ok else "FAIL"})


def _random_arities(rng: random.Random) -> tuple[int, int, int]:
    while True:
        r, m, s = rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3)
        if (r + m) % 2 == 0 and (m + s) % 2 == 0:
            return r, m, s


def _parse_diagram(text: str) -> BrauerDiagram:
    obj = json.loads(text)
    if isinstance(obj, dict):
        return BrauerDiagram.from_literal(obj["arcs"], obj.get("r"), obj.get("s"))
    return BrauerDiagram.from_literal(obj)


def _spec_factors(cfg: RunConfig):
    spec = load_module_spec(cfg.spec)
    try:
        return spec, realize(spec, cfg.F)
    except ValueError as exc:
        raise ConfigError(f"cannot realize spec: {exc}") from None


def _series_json(s) -> list:
    return s.to_json()


def cmd_qdet(cfg: RunConfig) -> tuple[int, dict]:
    F = cfg.F
    if cfg.spec is None:
        T = evaluation_T(build_module(["natural"], cfg.n, F))
        vec = top_vector(T)
    else:
        _, mf = _spec_factors(cfg)
        if not mf.gl:
            raise ConfigError("the module spec has no gl factors")
        T = coproduct_T(list(mf.gl))
        vec = mf.gl_tops[0]
        for w in mf.gl_tops[1:]:
            vec = kron(vec.reshape(1, -1), w.reshape(1, -1)).reshape(-1)
    q = qdet(T)
    items = [_rel("qdet central", check_central(q, T)), _rel("qdet antisymmetrizer route", check_qdet_antisymmetrizer(T))]
    ok = all(it.holds for it in items)
    body = {"N": T.N, "qdet": _series_json(q.scalar_series(vec, cfg.order)), "items": [it.to_json() for it in items], "verdict": "PASS" if ok else "FAIL"}
    return (0 if ok else 1), _envelope(cfg, body)


def cmd_sdet(cfg: RunConfig) -> tuple[int, dict]:
    F = cfg.F
    items = []
    if cfg.spec is None:
        form = FormData(cfg.flavor or "sp", cfg.n)
        T = evaluation_T(build_module(["natural"], cfg.n, F))
        S = twisted_S(T, form)
        vec = top_vector(T)
    else:
        spec, mf = _spec_factors(cfg)
        form = spec.form()
        S = full_operator(mf)
        vec = mf.top()
        T = None
    sd = sdet(S)
    scalar = sd.scalar_series(vec, cfg.order)
    items.append(_rel("sdet central", check_central(sd, S)))
    items.append(Item(f"sdet parity {form.flavor} N={form.N}", check_sdet_parity(scalar, form)))
    if T is not None:
        items.append(Item("sdet = alpha_N qdet(u) qdet(-u+N-1)", scalar.equals(sdet_from_qdet(T, form, cfg.order))))
    for N in sorted({2, form.N}):
        f2 = FormData(form.flavor, N // 2)
        items.append(Item(f"alpha_N (N={N}) equals beta_N", beta_N(f2, F, cfg.order).equals(alpha_N(f2, F).expand(cfg.order))))
    ok = all(it.holds for it in items)
    body = {"N": form.N, "flavor": form.flavor, "sdet": _series_json(scalar), "items": [it.to_json() for it in items], "verdict": "PASS" if ok else "FAIL"}
    return (0 if ok else 1), _envelope(cfg, body)


HANDLERS = {
    "verify": cmd_verify,
    "drinfeld": cmd_drinfeld,
    "stability": cmd_stability,
    "brauer": cmd_brauer,
    "qdet": cmd_qdet,
    "sdet": cmd_sdet,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _primes(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--field", default="Q", help="Q or Fp:<prime>")
    common.add_argument("--flavor", choices=("o", "sp"), default=None)
    common.add_argument("--n", type=int, default=1, help="rank n (N = 2n)")
    common.add_argument("--spec", default=None, help="path to a JSON module spec")
    common.add_argument("--order", type=int, default=10, help="series truncation order")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--primes", type=_primes, default=DEFAULT_PANEL, help="comma-separated prime panel")
    parser = _Parser(prog="twyangian", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("verify", parents=[common], help="run exact identity suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p = sub.add_parser("drinfeld", parents=[common], help="extract Drinfeld data from a module spec")
    p.add_argument("--roundtrip", action="store_true")
    sub.add_parser("stability", parents=[common], help="cross-characteristic stabilization panel")
    p = sub.add_parser("brauer", parents=[common], help="Brauer diagram calculus")
    p.add_argument("--action", choices=("summary", "compose", "gram"), default="summary")
    p.add_argument("--diagram", dest="diagrams", action="append", default=[], help="diagram literal as JSON")
    sub.add_parser("qdet", parents=[common], help="quantum determinant on a module")
    sub.add_parser("sdet", parents=[common], help="Sklyanin determinant on a module")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = vars(build_parser().parse_args(list(argv)))
    if "diagrams" in ns:
        ns["diagrams"] = tuple(ns["diagrams"])
    return RunConfig.from_dict(ns)


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Parse, run and render; returns (exit code, report text)."""
    try:
        cfg = parse_config(argv)
        code, report = HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        return 2, json.dumps({"schema": REPORT_SCHEMA, "version": __version__, "error": str(exc)}, sort_keys=True)
    text = json.dumps(report, sort_keys=True, indent=2)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code, text


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if code == 2 else sys.stdout
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
