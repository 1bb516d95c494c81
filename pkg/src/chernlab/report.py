"""Reports: invariant tables, comparisons, rendered traces and the pinned regression document."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .catalog import (DEFAULT_BUILTINS, ManifoldRecord, build_builtin, check_record,
                      load_catalog_dir)
from .chern import (chern_numbers, complete_intersection, monomial_label, pontrjagin_classes,
                    pontrjagin_numbers, stiefel_whitney_classes, sw_numbers)
from .deduce import (DeductionTrace, bb_decompositions, cubic_partner_solve, divisor_c3_data,
                     cubic_partner_chi, render_value, replay, run_pipeline)
from .exact import ChernlabError, q_str
from .genus import l_genus_signature
from .hodge import freedman_equivalent, surface_lattice
from .poly import integer_roots
from .schubert import SchubertClass, schubert_integrate


def fmt(v) -> str:
    """Exact text form: integers plain, rationals p/q, booleans true/false."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, Fraction)):
        return q_str(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(fmt(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


@dataclass
class Table:
    title: str
    headers: tuple[str, ...]
    rows: list[tuple[str, ...]] = field(default_factory=list)

    def add(self, *cells) -> None:
        self.rows.append(tuple(fmt(c) for c in cells))

    def to_dict(self) -> dict:
        return {"title": self.title, "headers": list(self.headers), "rows": [list(r) for r in self.rows]}

    def to_markdown(self) -> str:
        lines = [f"### {self.title}", "", "| " + " | ".join(self.headers) + " |",
                 "|" + "|".join("---" for _ in self.headers) + "|"]
        lines += ["| " + " | ".join(r) + " |" for r in self.rows]
        return "\n".join(lines)


@dataclass
class Report:
    title: str
    tables: list[Table] = field(default_factory=list)
    traces: list[DeductionTrace] = field(default_factory=list)
    verdict: str | None = None
    exit_code: int = 0

    def table(self, title: str, *headers: str) -> Table:
        t = Table(title, tuple(headers))
        self.tables.append(t)
        return t

    def to_dict(self) -> dict:
        out = {"title": self.title, "tables": [t.to_dict() for t in self.tables],
               "traces": [t.to_dict() for t in self.traces]}
        if self.verdict is not None:
            out["verdict"] = self.verdict
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_markdown(self) -> str:
        parts = [f"# {self.title}"]
        parts += [t.to_markdown() for t in self.tables]
        parts += [render_trace_markdown(t) for t in self.traces]
        if self.verdict is not None:
            parts.append(f"**verdict:** {self.verdict}")
        return "\n\n".join(parts) + "\n"

    def render(self, fmt_name: str = "md") -> str:
        return self.to_json() if fmt_name == "json" else self.to_markdown()


def render_trace_markdown(trace: DeductionTrace) -> str:
    lines = [f"### {trace.pipeline}: {trace.target}", ""]
    if trace.args:
        lines += ["arguments: " + ", ".join(f"{k} = {fmt(v)}" for k, v in sorted(trace.args.items())), ""]
    for i, step in enumerate(trace.steps, 1):
        vals = ", ".join(f"{k} = {fmt(render_value(v))}" for k, v in step.values)
        lines.append(f"{i}. [{step.tag}] {step.claim}" + (f" ({vals})" if vals else ""))
    lines.append("")
    for k, v in trace.verdict.items():
        if k != "summary":
            lines.append(f"- {k}: {fmt(render_value(v))}")
    lines.append(f"\n**{trace.summary}**")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# invariants and comparison


def invariants_report(record: ManifoldRecord) -> Report:
    m = record.model
    rep = Report(f"Invariants of {record.name}")
    s = rep.table("summary", "invariant", "value")
    s.add("dim", m.dim)
    s.add("tags", ", ".join(sorted(m.tags)) or "-")
    s.add("index", m.index)
    s.add("euler", m.euler_number())
    stored = record.stored
    for key in ("chi_O", "signature", "signature_legacy", "l_signature", "w2_vanishes"):
        if key in stored:
            s.add(key, stored[key])
    betti = record.betti()
    if betti is not None:
        for k, b in enumerate(betti):
            s.add(f"b{k}", b)
    for key, value in sorted(record.annotations.items()):
        s.add(f"annotation {key}", value)

    if m.hodge is not None:
        h = rep.table("Hodge numbers h^{p,q}", "p", *[f"q={q}" for q in range(m.dim + 1)])
        for p in range(m.dim + 1):
            h.add(p, *m.hodge.h[p])
    c = rep.table("Chern classes", "i", "c_i")
    for i, ci in enumerate(m.chern_list()[1:], 1):
        c.add(i, str(ci))
    if m.dim <= 6:
        pc = rep.table("Pontrjagin classes", "i", "p_i")
        for i, pi in enumerate(pontrjagin_classes(m)[: m.dim // 2], 1):
            pc.add(i, str(pi))
    w = rep.table("Stiefel-Whitney classes", "class", "value")
    for i, wi in enumerate(stiefel_whitney_classes(m)[1:], 1):
        w.add(f"w{2 * i}", str(wi))
    cn = rep.table("Chern numbers", "monomial", "value")
    for k, v in chern_numbers(m).named().items():
        cn.add(k, v)
    if m.dim % 2 == 0 and m.dim <= 6:
        pn = rep.table("Pontrjagin numbers", "monomial", "value")
        for k, v in stored.get("pontrjagin_numbers", {}).items():
            pn.add(k, v)
    sw = rep.table("Stiefel-Whitney numbers", "monomial", "value")
    for k, v in sw_number_items(m):
        sw.add(k, v)
    return rep


def homeomorphism_invariants(record: ManifoldRecord) -> list[tuple[str, Any]]:
    """Ordered (name, value) pairs preserved by orientation-preserving homeomorphisms."""
    m = record.model
    out: list[tuple[str, Any]] = []
    betti = record.betti()
    if betti is not None:
        out += [(f"b{k}", b) for k, b in enumerate(betti)]
    if m.dim % 2 == 0 and m.dim <= 6:
        out += [(f"pontrjagin {k}", v) for k, v in pontrjagin_number_items(record)]
    out += [(f"sw {k}", v) for k, v in sw_number_items(m)]
    if "signature" in record.stored:
        out.append(("signature", record.stored["signature"]))
    out.append(("w2 vanishes", record.stored["w2_vanishes"]))
    if m.dim == 2:
        cn = chern_numbers(m)
        lat = surface_lattice(int(cn["c1^2"]), int(cn["c2"]), record.stored["w2_vanishes"])
        out.append(("H^2 lattice (rank, signature, parity)", lat.as_tuple()))
    return out


def sw_number_items(m) -> list[tuple[str, int]]:
    """Stiefel-Whitney numbers labelled by real degree, e.g. w2^2w4."""
    return [(monomial_label(tuple(2 * p for p in lam), "w"), v) for lam, v in sw_numbers(m).items()]


def pontrjagin_number_items(record: ManifoldRecord):
    return [(monomial_label(t, "p"), v) for t, v in pontrjagin_numbers(record.model).items()]


def compare_report(a: ManifoldRecord, b: ManifoldRecord) -> Report:
    if a.model.dim != b.model.dim:
        raise ChernlabError(f"dimension mismatch: {a.name} has dim {a.model.dim}, {b.name} has dim {b.model.dim}")
    rep = Report(f"Comparison of {a.name} and {b.name}")
    t = rep.table("homeomorphism invariants", "invariant", a.name, b.name, "equal")
    ia, ib = dict(homeomorphism_invariants(a)), dict(homeomorphism_invariants(b))
    first = None
    for key, va in homeomorphism_invariants(a):
        vb = ib.get(key)
        same = key in ib and fmt(va) == fmt(vb)
        t.add(key, va, vb, same)
        if not same and first is None:
            first = (key, va, vb)
    for key, vb in homeomorphism_invariants(b):
        if key not in ia:
            t.add(key, None, vb, False)
            if first is None:
                first = (key, None, vb)
    if first is None:
        rep.verdict = "no obstruction found among computed invariants"
    else:
        rep.verdict = f"obstructed ({first[0]}: {fmt(first[1])} vs {fmt(first[2])})"
    return rep


# --------------------------------------------------------------------------
# pinned verdicts and the regression document

PINNED_VERDICTS = {
    "ricci-flat-exclusion cubic4": "no K-trivial partner: w2 obstruction",
    "ricci-flat-exclusion quadric4": "excluded: no K-trivial partner",
    "ricci-flat-exclusion quadric(6)": "excluded: no K-trivial partner",
    "index-match cubic4": "any Fano partner has r_Y = r_X = 3 and c1^4 = 243",
    "index-match dp5": "any Fano partner has r_Y = r_X = 3 and c1^4 = 405",
    "index-match pn(4)": "any Fano partner has r_Y = r_X = 5 and c1^4 = 625",
    "general-type-index cubic4": "any general-type partner has K_Y = 3 L_Y",
    "general-type-index dp5": "any general-type partner has K_Y = 3 L_Y",
    "general-type-index quadric4": "any general-type partner has K_Y = 4 L_Y",
    "cubic-partner cubic4": "(r,a)=(3,0)",
    "divisor-c3 cubic d=1": "c3(V) != c3(W) for d = 1: equality needs 2 + 3d^2 = 0",
    "divisor-c3 dp5 d=2": "(d-3)d^2 = -4 != (d+3)d^2 = 20",
    "hk-pipeline hilb2_k3": "a=1; c1^4 - 4c1^2c2 = 0; not of general type; ν ∈ {0,2}",
    "cy-hk n=2": "never o-homeomorphic: chi(O) 2 != 3",
    "bb dim=4,chi=0": "no decompositions",
    "bb dim=4,chi=3": "decompositions: HK4",
    "bb dim=6,chi=0": "decompositions: CY3 x CY3",
}


def pin_key(trace: DeductionTrace) -> str:
    if trace.pipeline == "divisor-c3":
        return f"divisor-c3 {trace.target} d={trace.args['d']}"
    return f"{trace.pipeline} {trace.target}"


def deduce_report(trace: DeductionTrace, pins: dict[str, str] | None = None) -> Report:
    """Rendered trace; exit code 1 when a pinned verdict exists and differs."""
    pins = PINNED_VERDICTS if pins is None else pins
    rep = Report(f"Deduction {trace.pipeline}: {trace.target}", traces=[trace])
    expected = pins.get(pin_key(trace))
    if expected is None:
        rep.verdict = f"{trace.summary} (no pinned verdict)"
    elif expected == trace.summary:
        rep.verdict = f"{trace.summary} (matches pinned verdict)"
    else:
        rep.verdict = f"{trace.summary} (MISMATCH: pinned {expected!r})"
        rep.exit_code = 1
    return rep


@dataclass(frozen=True)
class Check:
    section: str
    label: str
    expected: Any
    compute: Callable[[], Any]


def _b(name):
    return build_builtin(name)


def _shapes(dim, chi):
    return tuple(str(s) for s in bb_decompositions(dim, chi))


def _cubic_closed_forms_hold() -> bool:
    for d in range(1, 51):
        data = divisor_c3_data("cubic", d)
        if data["c3V"] != 3 * d * (2 - 6 * d + 3 * d * d - d ** 3):
            return False
        if data["c3W"] != 3 * d * (-2 - 6 * d - 3 * d * d - d ** 3):
            return False
    return True


def _step_value(trace, claim_start, key):
    for s in trace.steps:
        if s.claim.startswith(claim_start):
            return s.value(key)
    raise KeyError(claim_start)


def _lattice(name):
    m = _b(name).model
    cn = chern_numbers(m)
    return surface_lattice(int(cn["c1^2"]), int(cn["c2"]), _b(name).stored["w2_vanishes"])


def pinned_checks() -> list[Check]:
    cubic = lambda: complete_intersection(5, [3])  # noqa: E731
    partner = lambda: cubic_partner_solve(_b("cubic4"))  # noqa: E731
    hk = lambda: run_pipeline("hk-pipeline", "hilb2_k3")  # noqa: E731
    checks = [
        Check("cubic fourfold", "c1", "3h", lambda: str(cubic().chern(1))),
        Check("cubic fourfold", "c2", "6h^2", lambda: str(cubic().chern(2))),
        Check("cubic fourfold", "c3", "2h^3", lambda: str(cubic().chern(3))),
        Check("cubic fourfold", "integral of c4", 27, lambda: cubic().euler_number()),
        Check("cubic fourfold", "b4", 23, lambda: _b("cubic4").b(4)),
        Check("cubic fourfold", "p1", "3h^2", lambda: str(pontrjagin_classes(cubic())[0])),
        Check("cubic fourfold", "integral of p2", 126, lambda: pontrjagin_numbers(cubic())[(2,)]),
        Check("cubic fourfold", "signature (Hodge index)", 19, lambda: _b("cubic4").stored["signature"]),
        Check("cubic fourfold", "signature (legacy evaluator)", 23, lambda: _b("cubic4").stored["signature_legacy"]),
        Check("cubic fourfold", "stated signature annotation", 23,
              lambda: _b("cubic4").annotations["stated_signature"]),
        Check("cubic partner", "solutions (r, a)", ((3, 0),), lambda: partner().verdict["solutions"]),
        Check("cubic partner", "r = 5 witness r L.c3", -258,
              lambda: _step_value(partner(), "r = 5:", "r_times_Lc3")),
        Check("cubic partner", "a + 1 at r = 3", 1, lambda: cubic_partner_chi(3)),
        Check("cubic partner", "same verdict under the legacy evaluator", True,
              lambda: cubic_partner_solve(_b("cubic4"), "legacy").verdict == partner().verdict),
        Check("divisor c3", "cubic d = 1: c3(V)", -6, lambda: divisor_c3_data("cubic", 1)["c3V"]),
        Check("divisor c3", "cubic d = 1: c3(W)", -36, lambda: divisor_c3_data("cubic", 1)["c3W"]),
        Check("divisor c3", "cubic closed forms for d in [1, 50]", True, _cubic_closed_forms_hold),
        Check("divisor c3", "integer roots of 2 + 3d^2", (), lambda: tuple(integer_roots([2, 0, 3])[0])),
        Check("divisor c3", "dp5 d = 2: L.c2 term difference", 24,
              lambda: divisor_c3_data("dp5", 2)["termW"] - divisor_c3_data("dp5", 2)["termV"]),
        Check("del Pezzo fivefold", "integral of sigma_1^6 on G(2,5)", 5,
              lambda: schubert_integrate(SchubertClass.sigma((1,), (2, 5)) ** 6)),
        Check("del Pezzo fivefold", "c4", 6, lambda: _b("dp5").model.euler_number()),
        Check("del Pezzo fivefold", "Betti Euler number", 6,
              lambda: sum((-1) ** k * b for k, b in enumerate(_b("dp5").betti()))),
        Check("del Pezzo fivefold", "general-type index", "any general-type partner has K_Y = 3 L_Y",
              lambda: run_pipeline("general-type-index", "dp5").summary),
        Check("Hilbert square of K3", "euler", 324, lambda: _b("hilb2_k3").model.euler_number()),
        Check("Hilbert square of K3", "b2", 23, lambda: _b("hilb2_k3").b(2)),
        Check("Hilbert square of K3", "b4", 276, lambda: _b("hilb2_k3").b(4)),
        Check("Hilbert square of K3", "c2^2", 828, lambda: chern_numbers(_b("hilb2_k3").model)["c2^2"]),
        Check("Hilbert square of K3", "chi(O)", 3, lambda: _b("hilb2_k3").stored["chi_O"]),
        Check("Hilbert square of K3", "dim Sym^2 H^2", 276, lambda: _step_value(hk(), "cup product", "sym2_dim")),
        Check("Hilbert square of K3", "signature equation roots", (1, Fraction(19, 2)),
              lambda: _step_value(hk(), "rational roots", "roots")),
        Check("Hilbert square of K3", "a", 1, lambda: hk().verdict["a"]),
        Check("Hilbert square of K3", "relation", "c1^4 - 4c1^2c2 = 0", lambda: hk().verdict["relation"]),
        Check("Hilbert square of K3", "residual Riemann-Roch coefficient", Fraction(-1, 720) * Fraction(15, 8),
              lambda: _step_value(hk(), "Riemann-Roch after substitution", "k")),
        Check("Hilbert square of K3", "general type possible", False, lambda: hk().verdict["general_type"]),
        Check("Hilbert square of K3", "numerical dimension", (0, 2), lambda: hk().verdict["nu"]),
    ]
    for name in ("k3", "hilb2_k3", "dp5", "quadric4", "cubic4"):
        checks.append(Check("signature cross-check", f"{name}: Hodge index = L-genus", True,
                            lambda n=name: _b(n).stored["signature"] == l_genus_signature(_b(n).model)))
    checks += [
        Check("decompositions", "dim 4, chi 0", (), lambda: _shapes(4, 0)),
        Check("decompositions", "dim 4, chi 3", ("HK4",), lambda: _shapes(4, 3)),
        Check("decompositions", "dim 6, chi 0", ("CY3 x CY3",), lambda: _shapes(6, 0)),
        Check("decompositions", "CY4 in dim 4, chi 2", True, lambda: "CY4" in _shapes(4, 2)),
        Check("decompositions", "CY6 in dim 6, chi 2", True, lambda: "CY6" in _shapes(6, 2)),
    ]
    for n in range(2, 7):
        checks.append(Check("CY versus HK", f"n = {n}: chi witnesses", (2, n + 1),
                            lambda n=n: (run_pipeline("cy-hk", n=n).verdict["chi_cy"],
                                         run_pipeline("cy-hk", n=n).verdict["chi_hk"])))
    checks += [
        Check("surface lattices", "k3", (22, -16, "even"), lambda: _lattice("k3").as_tuple()),
        Check("surface lattices", "kodaira_w_surface", (22, -16, "even"),
              lambda: _lattice("kodaira_w_surface").as_tuple()),
        Check("surface lattices", "k3 and kodaira_w_surface equivalent", True,
              lambda: freedman_equivalent(_lattice("k3"), _lattice("kodaira_w_surface"))),
        Check("surface lattices", "k3 and pn(2) equivalent", False,
              lambda: freedman_equivalent(_lattice("k3"), _lattice("pn(2)"))),
    ]
    for key, expected in PINNED_VERDICTS.items():
        checks.append(Check("pinned deductions", key, expected, lambda k=key: _run_pinned(k).summary))
    return checks


def _run_pinned(key: str) -> DeductionTrace:
    name, _, rest = key.partition(" ")
    if name == "divisor-c3":
        family, d = rest.split(" d=")
        return run_pipeline(name, family, d=int(d))
    if "=" in rest:
        args = dict(item.split("=") for item in rest.split(","))
        return run_pipeline(name, **{k: int(v) for k, v in args.items()})
    return run_pipeline(name, rest)


def report_all(catalog_dir=None) -> Report:
    rep = Report("Regression report")
    table = rep.table("pinned values", "section", "check", "expected", "actual", "status")
    failures = 0
    for check in pinned_checks():
        try:
            actual = check.compute()
            ok = fmt(actual) == fmt(check.expected)
        except ChernlabError as exc:
            actual, ok = f"error: {exc}", False
        failures += not ok
        table.add(check.section, check.label, check.expected, actual, "pass" if ok else "FAIL")

    cat = rep.table("catalog records", "record", "status", "detail")
    records = {name: build_builtin(name) for name in DEFAULT_BUILTINS}
    if catalog_dir is not None:
        loaded, errors = load_catalog_dir(catalog_dir)
        for path, message in errors.items():
            cat.add(path, "FAIL", message)
            failures += 1
        records.update(loaded)
    for name, record in records.items():
        problems = check_record(record)
        failures += bool(problems)
        cat.add(name, "FAIL" if problems else "pass", "; ".join(problems) or "-")

    rt = rep.table("trace replay", "trace", "status")
    for key in PINNED_VERDICTS:
        problems = replay(_run_pinned(key))
        failures += bool(problems)
        rt.add(key, "FAIL: " + "; ".join(problems) if problems else "pass")

    rep.exit_code = 1 if failures else 0
    rep.verdict = "all pass" if not failures else f"{failures} failure(s)"
    return rep
