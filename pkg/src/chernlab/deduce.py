"""Executable obstruction arguments.

Each pipeline reads invariants from a catalog record and emits a
:class:`DeductionTrace`: an ordered list of tagged steps carrying the exact
values they use, followed by a structured verdict. Traces are replayable:
:func:`replay` re-runs the pipeline and checks every step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Any, Callable, Mapping

from .catalog import ManifoldRecord, build_builtin
from .chern import (BundleSpec, chern_numbers, dual_bundle_class, pontrjagin_classes,
                    pontrjagin_numbers, stiefel_whitney_classes)
from .exact import ChernlabError, _format_terms, LinearSystem, invert_unit, q_str, solve_linear, to_q
from .genus import hrr_chi, todd_polynomials
from .hodge import SIGNATURE_EVALUATORS, signature_weight, two_divisible
from .poly import Poly, integer_roots, interpolate, rational_roots_quadratic
from .rings import UnivariateRing

TAGS = frozenset({
    "pontrjagin-invariance", "sw-invariance", "hodge-symmetry", "serre-duality",
    "kodaira-vanishing", "rr", "integrality", "divisibility", "fujiki", "miyaoka",
    "bb-decomposition", "lefschetz", "hypothesis",
})


def _norm(x):
    """Exact, comparable form of a step value."""
    if isinstance(x, str):
        return _maybe_rational(x)
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, (set, frozenset)):
        return tuple(sorted((_norm(v) for v in x), key=_sort_key))
    if isinstance(x, (list, tuple)):
        return tuple(_norm(v) for v in x)
    if isinstance(x, Mapping):
        return tuple((str(k), _norm(v)) for k, v in x.items())
    return str(x)


def _maybe_rational(s: str):
    try:
        return to_q(s)
    except (ValueError, ZeroDivisionError):
        return s


def _sort_key(v):
    return (0, v) if isinstance(v, Fraction) else (1, str(v))


def render_value(v) -> Any:
    """JSON-ready rendering: rationals as "p/q" strings, tuples as lists."""
    if isinstance(v, Fraction):
        return q_str(v)
    if isinstance(v, tuple):
        return [render_value(x) for x in v]
    return v


def _parse_rendered(v):
    if isinstance(v, list):
        return tuple(_parse_rendered(x) for x in v)
    if isinstance(v, str):
        return _maybe_rational(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    return v


@dataclass(frozen=True)
class Step:
    claim: str
    tag: str
    values: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ChernlabError(f"unknown justification tag {self.tag!r}")

    def value(self, key: str):
        return dict(self.values)[key]

    def to_dict(self) -> dict:
        return {"claim": self.claim, "tag": self.tag,
                "values": {k: render_value(v) for k, v in self.values}}


@dataclass
class DeductionTrace:
    pipeline: str
    target: str
    args: dict = field(default_factory=dict)
    steps: list[Step] = field(default_factory=list)
    verdict: dict = field(default_factory=dict)

    def add(self, claim: str, tag: str, **values) -> Step:
        step = Step(claim, tag, tuple((k, _norm(v)) for k, v in values.items()))
        self.steps.append(step)
        return step

    def conclude(self, summary: str, **fields) -> "DeductionTrace":
        self.verdict = {"summary": summary, **{k: _norm(v) for k, v in fields.items()}}
        return self

    @property
    def summary(self) -> str:
        return self.verdict.get("summary", "")

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline, "target": self.target, "args": dict(self.args),
            "steps": [s.to_dict() for s in self.steps],
            "verdict": {k: render_value(v) for k, v in self.verdict.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DeductionTrace":
        steps = [Step(s["claim"], s["tag"], tuple((k, _parse_rendered(v)) for k, v in s["values"].items()))
                 for s in data["steps"]]
        verdict = {k: (v if k == "summary" else _parse_rendered(v)) for k, v in data["verdict"].items()}
        return cls(data["pipeline"], data["target"], dict(data.get("args", {})), steps, verdict)


# --------------------------------------------------------------------------
# Beauville-Bogomolov shapes

CHI_CY_ODD = 0
CHI_CY_EVEN = 2


@dataclass(frozen=True, order=True)
class DecompositionShape:
    """Multiset of factors (kind, complex dimension); kinds CY_odd, CY_even, HK."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        for kind, d in self.factors:
            if kind == "CY_odd" and not (d >= 3 and d % 2):
                raise ValueError(f"odd Calabi-Yau factor of dimension {d}")
            if kind == "CY_even" and not (d >= 4 and d % 2 == 0):
                raise ValueError(f"even Calabi-Yau factor of dimension {d}")
            if kind == "HK" and not (d >= 2 and d % 2 == 0):
                raise ValueError(f"hyperkaehler factor of dimension {d}")
            if kind not in ("CY_odd", "CY_even", "HK"):
                raise ValueError(f"unknown factor kind {kind}")
        object.__setattr__(self, "factors", tuple(sorted(self.factors, key=lambda f: (-f[1], f[0]))))

    @property
    def dim(self) -> int:
        return sum(d for _, d in self.factors)

    @property
    def chi(self) -> int:
        out = 1
        for kind, d in self.factors:
            out *= factor_chi(kind, d)
        return out

    def __str__(self) -> str:
        return " x ".join(("HK" if k == "HK" else "CY") + str(d) for k, d in self.factors)


def factor_chi(kind: str, d: int) -> int:
    """chi(O) of a factor: 0 for odd CY, 2 for even CY, m + 1 for a hyperkaehler 2m-fold."""
    if kind == "CY_odd":
        return CHI_CY_ODD
    if kind == "CY_even":
        return CHI_CY_EVEN
    return d // 2 + 1


def factor_types(max_dim: int) -> list[tuple[str, int]]:
    out = []
    for d in range(2, max_dim + 1):
        if d % 2:
            if d >= 3:
                out.append(("CY_odd", d))
        else:
            if d >= 4:
                out.append(("CY_even", d))
            out.append(("HK", d))
    return out


def bb_decompositions(dim: int, chi: int) -> list[DecompositionShape]:
    """Every product of Calabi-Yau and hyperkaehler factors of total dimension
    ``dim`` whose chi(O) equals ``chi``, sorted."""
    if dim < 2:
        raise ChernlabError("decompositions need dim >= 2")
    types = factor_types(dim)
    out = []

    def rec(start, remaining, acc):
        if remaining == 0:
            shape = DecompositionShape(tuple(acc))
            if shape.chi == chi:
                out.append(shape)
            return
        for i in range(start, len(types)):
            kind, d = types[i]
            if d <= remaining:
                rec(i, remaining - d, acc + [(kind, d)])

    rec(0, dim, [])
    return sorted(set(out))


# --------------------------------------------------------------------------
# helpers


def _require_hodge(x: ManifoldRecord):
    if x.model.hodge is None:
        raise ChernlabError(f"{x.name}: the pipeline needs a Hodge diamond")
    return x.model.hodge


def _require_fano_b2_one(x: ManifoldRecord) -> None:
    m = x.model
    if "fano" not in m.tags or m.index is None:
        raise ChernlabError(f"{x.name} is not a Fano record with an index")
    hodge = _require_hodge(x)
    betti = x.betti()
    if betti[2] != 1:
        raise ChernlabError(f"{x.name}: b2 = {betti[2]}, the pipeline needs b2 = 1")
    if any(hodge[0, q] for q in range(1, m.dim + 1)):
        raise ChernlabError(f"{x.name}: some H^q(O) with q > 0 is nonzero")


def hilbert_polynomial(x: ManifoldRecord) -> list[Fraction]:
    """Coefficients (ascending) of t -> chi(X, O(t h)), interpolated from Riemann-Roch values."""
    n = x.model.dim
    return interpolate([(t, hrr_chi(x.model, t)) for t in range(n + 1)])


def _poly_str(coeffs, var="t") -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if c:
            terms.append({(): c} if k == 0 else {((var, k),): c})
    p = Poly()
    for t in terms:
        p = p + Poly(t)
    return str(p)


# --------------------------------------------------------------------------
# Fano pipelines


def ricci_flat_exclusion(x: ManifoldRecord) -> DeductionTrace:
    m = x.model
    if "fano" not in m.tags or m.index is None:
        raise ChernlabError(f"{x.name} is not a Fano record")
    tr = DeductionTrace("ricci-flat-exclusion", x.name)
    r = m.index
    tr.add("X is Fano with K_X = -r h", "hypothesis", r=r, dim=m.dim)
    w2 = stiefel_whitney_classes(m)[1]
    tr.add("w2(X) is c1(X) mod 2", "sw-invariance", w2=str(w2))
    if not two_divisible(w2):
        tr.add("a partner with trivial canonical class has w2 = 0; w2 is a homeomorphism invariant",
               "sw-invariance", w2_x=str(w2), w2_y="0")
        return tr.conclude("no K-trivial partner: w2 obstruction", excluded=True, shapes=())
    half = -r // 2
    chi = hrr_chi(m, half)
    tr.add("K_X = 2L with L = (-r/2) h; chi(X, L) by Riemann-Roch", "rr", L_multiple=half, chi=chi)
    tr.add("-r < -r/2 < 0, so all cohomology of L vanishes and chi(X, L) = 0",
           "kodaira-vanishing", predicted=0, computed=chi)
    tr.add("for a partner Y with K_Y = 0: chi(O_Y) = chi(X, K_X/2)", "rr", chi_O_Y=chi)
    shapes = bb_decompositions(m.dim, int(chi))
    tr.add("products of Calabi-Yau and hyperkaehler factors with this chi(O)", "bb-decomposition",
           dim=m.dim, chi=chi, shapes=tuple(str(s) for s in shapes))
    betti = x.betti()
    b2 = betti[2] if betti is not None else x.annotations.get("picard_rank")
    if b2 is None:
        raise ChernlabError(f"{x.name}: b2 unknown")
    survivors = []
    for s in shapes:
        if len(s.factors) >= 2 and b2 < 2:
            tr.add(f"{s} has {len(s.factors)} positive-dimensional factors, so b2 >= 2", "bb-decomposition",
                   shape=str(s), b2=b2, survives=False)
        else:
            survivors.append(s)
    if not survivors:
        return tr.conclude("excluded: no K-trivial partner", excluded=True, shapes=())
    return tr.conclude("possible K-trivial shapes: " + ", ".join(map(str, survivors)),
                       excluded=False, shapes=tuple(str(s) for s in survivors))


def fano_index_match(x: ManifoldRecord) -> DeductionTrace:
    _require_fano_b2_one(x)
    m = x.model
    r, n = m.index, m.dim
    tr = DeductionTrace("index-match", x.name)
    tr.add("X Fano of index r with b2 = 1 and H^q(O_X) = 0 for q > 0", "hypothesis", r=r, n=n)
    tr.add("a Fano partner Y has chi(O_Y) = 1", "kodaira-vanishing", chi_O_Y=1)
    tr.add("c1(Y) = c1(X) + 2s L_X, so r_Y = r_X + 2s, and chi(O_Y) = chi(X, s L_X)", "sw-invariance")
    tr.add("exchanging X and Y turns s > 0 into s < 0", "hypothesis")
    eliminated = []
    survivors = []
    for s in range(-r, 0):
        r_y = r + 2 * s
        chi = hrr_chi(m, s)
        if r_y < 1:
            tr.add(f"s = {s}: r_Y = {r_y} < 1, so Y would not be Fano", "hypothesis", s=s, r_Y=r_y, chi=chi)
            eliminated.append(s)
        elif chi != 1:
            tr.add(f"s = {s}: chi(X, {s}h) = {q_str(chi)} != 1", "rr", s=s, r_Y=r_y, chi=chi)
            eliminated.append(s)
        else:
            survivors.append(s)
    c1n = m.integrate(m.chern(1) ** n)
    if survivors:
        return tr.conclude("index not determined: s in {" + ", ".join(map(str, survivors)) + "}",
                           s_candidates=tuple(survivors), eliminated_s=tuple(eliminated))
    tr.add("s = 0, so r_Y = r_X and c1(Y)^n = c1(X)^n", "rr", r_Y=r, c1n=c1n)
    return tr.conclude(f"any Fano partner has r_Y = r_X = {r} and c1^{n} = {q_str(c1n)}",
                       r_Y=r, c1n=c1n, eliminated_s=tuple(eliminated))


def _betti_hypotheses(x: ManifoldRecord) -> tuple[bool, list[int]]:
    betti = x.betti()
    n = x.model.dim
    odd_ok = all(betti[k] == 0 for k in range(1, 2 * n, 2))
    even_ok = all(betti[2 * k] <= 2 for k in range(2, n + 1))
    return odd_ok and even_ok, betti


def general_type_index(x: ManifoldRecord) -> DeductionTrace:
    _require_fano_b2_one(x)
    m = x.model
    r, n = m.index, m.dim
    tr = DeductionTrace("general-type-index", x.name)
    tr.add("X Fano of index r with b2 = 1; Y of general type o-homeomorphic to X", "hypothesis", r=r, n=n)
    ok, betti = _betti_hypotheses(x)
    if ok:
        tr.add("b_odd = 0 and b_2k <= 2 (k > 1) force h^{0,q}(Y) = 0 for q > 0, so chi(O_Y) = 1",
               "hodge-symmetry", betti=tuple(betti), chi_O_Y=1)
    else:
        try:
            partner = cubic_partner_solve(x)
        except ChernlabError:
            raise ChernlabError(f"hypothesis violated: {x.name} has Betti numbers {betti}") from None
        a = partner.verdict["solutions"][0][1]
        tr.add("Betti bound fails; the partner solve gives h^{4,0}(Y) = a = 0, so chi(O_Y) = a + 1 = 1",
               "hypothesis", betti=tuple(betti), a=a, chi_O_Y=a + 1)
    coeffs = hilbert_polynomial(x)
    tr.add("chi(X, t h) as a polynomial in t", "rr", polynomial=_poly_str(coeffs))
    shifted = list(coeffs)
    shifted[0] -= 1
    roots, bound = integer_roots(shifted)
    tr.add("integer roots of chi(X, t h) = 1 (exhaustive inside the Cauchy bound)", "integrality",
           bound=bound, roots=tuple(roots))
    positive = [t for t in roots if t > 0]
    if positive:
        raise ChernlabError(f"hypothesis violated: h^0(X, {positive[0]}h) = 1")
    tr.add("h^0(X, m h) = chi(X, m h) != 1 for every m > 0", "kodaira-vanishing")
    kept = []
    for s in (t for t in roots if t < 0):
        m_sections = -s - r
        if n % 2:
            tr.add(f"s = {s}: (-1)^n h^n(X, {s}h) = 1 is impossible for odd n", "serre-duality", s=s)
            continue
        if m_sections < 0:
            tr.add(f"s = {s}: h^0(X, {m_sections}h) = 0, not 1", "serre-duality", s=s, m=m_sections, h0=0)
        elif m_sections == 0:
            tr.add(f"s = {s}: h^n(X, {s}h) = h^0(X, O) = 1", "serre-duality", s=s, m=0, h0=1)
            kept.append(s)
        else:
            h0 = hrr_chi(m, m_sections)
            tr.add(f"s = {s}: h^0(X, {m_sections}h) = {q_str(h0)} != 1", "serre-duality", s=s, m=m_sections, h0=h0)
    if not kept:
        return tr.conclude("no general-type partner", n_even=(n % 2 == 0), s=())
    tr.add("chi(O_Y) = (-1)^n h^n(X, s h) = 1 forces n even", "kodaira-vanishing", n=n, n_even=(n % 2 == 0))
    tr.add("K_Y = -(r + 2s) L with s = -r gives K_Y = r L_Y", "sw-invariance", s=tuple(kept), K_multiple=r)
    return tr.conclude(f"any general-type partner has K_Y = {r} L_Y", K_multiple=r, n_even=(n % 2 == 0),
                       s=tuple(kept))


# --------------------------------------------------------------------------
# Cubic fourfold

CUBIC_SIGNATURE = {"top": 3, "p1": 3, "p2": 126, "c4": 27, "b4": 23, "signature": 19}


def _cubic_invariants(x: ManifoldRecord) -> dict[str, Fraction]:
    m = x.model
    if m.dim != 4 or not isinstance(m.ring, UnivariateRing) or m.hodge is None:
        raise ChernlabError(f"{x.name}: invariant signature mismatch (need a b2 = 1 fourfold with a Hodge diamond)")
    p1 = pontrjagin_classes(m)[0]
    vals = {
        "top": m.ring.top,
        "p1": p1.coefficient(2),
        "p2": pontrjagin_numbers(m)[(2,)],
        "c4": m.euler_number(),
        "b4": Fraction(x.betti()[4]),
        "signature": Fraction(SIGNATURE_EVALUATORS["canonical"](m.hodge)),
    }
    mismatch = [f"{k} = {q_str(v)} (expected {CUBIC_SIGNATURE[k]})" for k, v in vals.items()
                if v != CUBIC_SIGNATURE[k]]
    if mismatch or x.betti()[2] != 1:
        raise ChernlabError(f"{x.name}: invariant signature mismatch: " + ", ".join(mismatch or ["b2 != 1"]))
    return vals


def cubic_partner_solve(x: ManifoldRecord, evaluator: str = "canonical") -> DeductionTrace:
    """Hodge numbers, canonical class and Chern numbers of a non-Fano partner Y
    of a cubic fourfold, from homeomorphism invariants alone."""
    inv = _cubic_invariants(x)
    hodge = x.model.hodge
    n = 4
    tr = DeductionTrace("cubic-partner", x.name, {"evaluator": evaluator})
    tr.add("Y o-homeomorphic to X with K_Y = r L ample (Fano and K-trivial partners are settled separately)",
           "hypothesis", **{k: v for k, v in inv.items()})

    # (i) Hodge numbers of Y: off-middle ones equal those of X (b2 = 1, odd Betti 0)
    sigma_x = SIGNATURE_EVALUATORS[evaluator](hodge)
    middle = {(4, 0): "a", (0, 4): "a", (3, 1): "b", (1, 3): "b", (2, 2): "c"}
    off_const = Fraction(0)
    coeffs = {"a": Fraction(0), "b": Fraction(0), "c": Fraction(0)}
    for p in range(n + 1):
        for q in range(n + 1):
            w = signature_weight(evaluator, n, p, q)
            if (p, q) in middle:
                coeffs[middle[(p, q)]] += w
            else:
                off_const += w * hodge[p, q]
    b4 = int(inv["b4"])
    system = LinearSystem.from_equations(["b", "c", "a"], [
        ({"a": 2, "b": 2, "c": 1}, b4),
        (coeffs, sigma_x - off_const),
    ])
    tr.add("b4(Y) = 2a + 2b + c", "hodge-symmetry", b4=b4)
    lhs = _format_terms([(v, coeffs[v]) for v in ("a", "b", "c")] + [("1", off_const)])
    tr.add(f"signature ({evaluator} evaluator): {lhs} = {sigma_x}", "hodge-symmetry",
           signature=sigma_x, offset=off_const)
    sol = solve_linear(system, targets=["a"])
    if sol.status == "inconsistent" or set(sol.pivots) != {"b", "c"}:
        raise ChernlabError("Hodge system does not determine b and c in terms of a")
    b_expr, c_expr = sol.pivots["b"], sol.pivots["c"]
    if b_expr.coeffs:
        raise ChernlabError("b is not determined")
    c0 = c_expr.constant
    ca = dict(c_expr.coeffs).get("a", Fraction(0))
    a_max = int(c0 // -ca) if ca < 0 else None
    tr.add("elimination gives b and c in terms of a", "hodge-symmetry", b=b_expr.constant, c=str(c_expr))
    tr.add("c >= 0 bounds a", "integrality", a_min=0, a_max=a_max)
    chi_const = sum(((-1) ** q * hodge[0, q] for q in range(1, n)), Fraction(1))
    tr.add("chi(O_Y) = sum (-1)^q h^{0,q}(Y) = a + 1", "serre-duality", chi_constant=chi_const)

    # (ii) Pontrjagin invariance: c1(Y) = -r L, p1(Y) = p L^2
    r = Poly.var("r")
    d, p, p2, e = inv["top"], inv["p1"], inv["p2"], inv["c4"]
    c2_coeff = (r * r + p) / 2
    numbers = {
        "c1^4": r ** 4 * d,
        "c1^2c2": r * r * c2_coeff * d,
        "c2^2": c2_coeff * c2_coeff * d,
        "c4": Poly.const(e),
    }
    numbers["c1c3"] = (numbers["c2^2"] + 2 * e - p2) / 2
    tr.add("p1(Y) = 2c2(Y) - c1(Y)^2 = p1(X) gives c2(Y) = ((r^2 + p)/2) L^2", "pontrjagin-invariance",
           p1=p, c2=str(c2_coeff))
    tr.add("Chern numbers of Y in terms of r (p2 and c4 invariant)", "pontrjagin-invariance",
           **{k: str(v) for k, v in numbers.items()})

    # (iii) Riemann-Roch
    td4 = todd_polynomials(4)[4]
    chi_poly = _td4_from_numbers(td4, numbers)
    closed = ((r * r + 3) ** 2 - 16) / 128
    tr.add("a + 1 = chi(O_Y) = td_4 of the Chern numbers", "rr", a_plus_1=str(chi_poly),
           matches_closed_form=(chi_poly == closed))

    # (iv) search over r
    r_bound = isqrt(16 * b4)
    r_x = x.model.index
    tr.add("search range for r", "hypothesis", r_min=1, r_max=r_bound)
    tr.add("c1(Y) = c1(X) mod 2, so r = r_X mod 2", "sw-invariance", r_X=r_x, parity=r_x % 2)
    candidates = []
    for rv in range(1 + (r_x + 1) % 2, r_bound + 1, 2):
        val = chi_poly.evaluate({"r": rv})
        if val.denominator != 1:
            tr.add(f"r = {rv}: a + 1 = {q_str(val)} is not an integer", "integrality", r=rv, a_plus_1=val)
            continue
        a = val - 1
        if a < 0 or (a_max is not None and a > a_max):
            tr.add(f"r = {rv}: a = {q_str(a)} outside [0, {a_max}]", "integrality", r=rv, a=a)
            continue
        candidates.append((rv, a))
    tr.add("candidates surviving integrality and bounds", "integrality",
           candidates=tuple((rv, a) for rv, a in candidates))

    # (v) divisibility: c1 c3 = -r (L . c3) with L . c3 an integer
    solutions = []
    for rv, a in candidates:
        c1c3 = numbers["c1c3"].evaluate({"r": rv})
        lc3 = -c1c3 / rv
        if lc3.denominator != 1:
            tr.add(f"r = {rv}: {rv} L.c3(Y) = {q_str(-c1c3)} is not divisible by {rv}", "divisibility",
                   r=rv, r_times_Lc3=-c1c3, divisible=False)
            continue
        tr.add(f"r = {rv}: L.c3(Y) = {q_str(lc3)}", "divisibility", r=rv, Lc3=lc3, divisible=True)
        solutions.append((rv, a))
    if len(solutions) != 1:
        return tr.conclude("solution set: {" + ", ".join(f"(r,a)=({rv},{q_str(a)})" for rv, a in solutions) + "}",
                           solutions=tuple(solutions), unique=False)
    rv, a = solutions[0]
    a_int = int(a)
    y_entries = {(p_, q_): hodge[p_, q_] for p_ in range(n + 1) for q_ in range(n + 1)}
    values = {"a": a_int, "b": int(b_expr.constant), "c": int(c_expr.evaluate({"a": a_int}))}
    for (p_, q_), name in middle.items():
        y_entries[(p_, q_)] = values[name]
    y_grid = tuple(tuple(y_entries[(p_, q_)] for q_ in range(n + 1)) for p_ in range(n + 1))
    tr.add("Hodge numbers of Y", "hodge-symmetry", hodge=y_grid, equals_X=(y_grid == hodge.h))
    ch = {k: v.evaluate({"r": rv}) for k, v in numbers.items()}
    tr.add("Chern numbers of Y", "rr", **ch)
    return tr.conclude(f"(r,a)=({rv},{a_int})", solutions=((rv, a_int),), unique=True, hodge_Y=y_grid,
                       K_multiple=rv, chern_numbers=tuple(ch.items()))


def _td4_from_numbers(td4: Poly, numbers: Mapping[str, Poly]) -> Poly:
    """Substitute Chern numbers (polynomials in r) into td_4 monomial by monomial."""
    key = {(("c1", 4),): "c1^4", (("c1", 2), ("c2", 1)): "c1^2c2", (("c2", 2),): "c2^2",
           (("c1", 1), ("c3", 1)): "c1c3", (("c4", 1),): "c4"}
    out = Poly()
    for mono, coeff in td4.terms.items():
        out = out + numbers[key[mono]] * coeff
    return out


def cubic_partner_chi(r: int) -> Fraction:
    """a + 1 as a function of r for a cubic partner: ((r^2 + 3)^2 - 16) / 128."""
    return Fraction((r * r + 3) ** 2 - 16, 128)


# --------------------------------------------------------------------------
# Divisor comparison


@lru_cache(maxsize=None)
def _family_model(family: str):
    if family == "cubic":
        return build_builtin("cubic4").model
    if family == "dp5":
        return build_builtin("dp5").model
    raise ChernlabError(f"unknown family {family!r}; use cubic or dp5")


def divisor_c3_data(family: str, d: int) -> dict[str, Fraction]:
    """Ring computation of c3 and L.c2 for smooth V in |dL| on X and W in |dL| on the partner Y."""
    if d < 1:
        raise ChernlabError("d must be a positive integer")
    X = _family_model(family)
    ring = X.ring
    L = ring.generator()
    cX = X.tangent_total
    cY = dual_bundle_class(BundleSpec(X.dim, cX)).total_class
    normal_inv = invert_unit(ring.one() + L * d)
    cV = cX * normal_inv
    cW = cY * normal_inv

    def on_divisor(a):
        return X.integrate(a * L * d)

    L4 = X.integrate(L ** 4)
    out = {
        "c3V": on_divisor(cV.part(3)),
        "c3W": on_divisor(cW.part(3)),
        "LVc2V": on_divisor(L * cV.part(2)),
        "LWc2W": on_divisor(L * cW.part(2)),
        "dL2c2X": X.integrate(L * L * cX.part(2)) * d,
        "dL2c2Y": X.integrate(L * L * cY.part(2)) * d,
        "L4": L4,
        "Lc3X": X.integrate(L * cX.part(3)),
        "Lc3Y": X.integrate(L * cY.part(3)),
    }
    out["termV"] = (out["LVc2V"] - out["dL2c2X"]) / L4
    out["termW"] = (out["LWc2W"] - out["dL2c2Y"]) / L4
    return out


@lru_cache(maxsize=None)
def _c3_difference_polynomial(family: str) -> tuple[Fraction, ...]:
    points = []
    for d in range(1, 7):
        data = divisor_c3_data(family, d)
        points.append((d, data["c3V"] - data["c3W"]))
    return tuple(interpolate(points))


def divisor_c3_compare(family: str, d: int) -> DeductionTrace:
    data = divisor_c3_data(family, d)
    tr = DeductionTrace("divisor-c3", family, {"d": d})
    tr.add("Y of general type with K_Y = 3L; Chern numbers of X and Y agree, so c(Y) is c(X) with "
           "odd classes negated", "pontrjagin-invariance", Lc3X=data["Lc3X"], Lc3Y=data["Lc3Y"])
    tr.add("V in |dL| on X, W in |dL| on Y: c(V) = c(X)(1 + dL)^-1, c(W) = c(Y)(1 + dL)^-1",
           "lefschetz", d=d)
    tr.add("c3 of the divisors", "rr", c3V=data["c3V"], c3W=data["c3W"])
    diff = _c3_difference_polynomial(family)
    roots, bound = integer_roots(diff, predicate=lambda t: t >= 1)
    tr.add("c3(V) - c3(W) as a polynomial in d", "integrality", polynomial=_poly_str(diff, "d"),
           positive_roots=tuple(roots), bound=bound)
    if family == "cubic":
        closed_v = 3 * d * (2 - 6 * d + 3 * d * d - d ** 3)
        closed_w = 3 * d * (-2 - 6 * d - 3 * d * d - d ** 3)
        quotient = [c / 6 for c in diff[1:]]  # c3(V) - c3(W) = 6d (2 + 3d^2)
        tr.add("closed forms 3d(2-6d+3d^2-d^3) and 3d(-2-6d-3d^2-d^3)", "rr",
               closed_V=closed_v, closed_W=closed_w,
               matches=(closed_v == data["c3V"] and closed_w == data["c3W"]))
        tr.add("equality would need 2 + 3d^2 = 0, which has no integer root", "integrality",
               witness=_poly_str(quotient, "d"), value=2 + 3 * d * d)
        return tr.conclude(f"c3(V) != c3(W) for d = {d}: equality needs 2 + 3d^2 = 0",
                           c3V=data["c3V"], c3W=data["c3W"], witness="2 + 3d^2 = 0",
                           impossible=not roots)
    tr.add("L.c2 terms: L_V c2(V) = d L^2 c2(X) + (d-3)d^2 L^4 and L_W c2(W) = d L^2 c2(Y) + (d+3)d^2 L^4",
           "rr", termV=data["termV"], termW=data["termW"], difference=data["termW"] - data["termV"])
    return tr.conclude(f"(d-3)d^2 = {q_str(data['termV'])} != (d+3)d^2 = {q_str(data['termW'])}",
                       termV=data["termV"], termW=data["termW"], difference=data["termW"] - data["termV"],
                       c3V=data["c3V"], c3W=data["c3W"], impossible=not roots)


# --------------------------------------------------------------------------
# Hilbert square of a K3


NEF_KEYS = ("kappa_nonnegative", "k_two_divisible", "fourth_powers_nonnegative", "b3")


def nef_hypotheses_check(x) -> bool:
    """Kodaira dimension >= 0, K 2-divisible, E^4 >= 0 for all E, b3 = 0.

    ``x`` is a record (flags read from its annotations, b3 from its Betti
    numbers when not annotated) or a mapping of the four flags.
    """
    if isinstance(x, ManifoldRecord):
        flags = dict(x.annotations)
        if "b3" not in flags and x.betti() is not None:
            flags["b3"] = x.betti()[3]
    else:
        flags = dict(x)
    missing = [k for k in NEF_KEYS if k not in flags]
    if missing:
        raise ChernlabError("missing flag(s) " + ", ".join(missing))
    return bool(flags["kappa_nonnegative"] and flags["k_two_divisible"]
                and flags["fourth_powers_nonnegative"] and flags["b3"] == 0)


HK_EQUATION_ORDER = ("euler", "p1_squared", "p2", "rr")
CHERN_VARS = ("c1^4", "c1^2c2", "c2^2", "c1c3", "c4")


def hk_linear_system(x: ManifoldRecord, order=HK_EQUATION_ORDER) -> LinearSystem:
    """Constraints on the Chern numbers of a partner of ``x`` (unknowns c1^4 .. c4)."""
    m = x.model
    e = m.euler_number()
    p = pontrjagin_numbers(m)
    chi = hrr_chi(m, 0)
    td4 = todd_polynomials(4)[4]
    rr = {"c1^4": td4.coefficient(c1=4), "c1^2c2": td4.coefficient(c1=2, c2=1),
          "c2^2": td4.coefficient(c2=2), "c1c3": td4.coefficient(c1=1, c3=1), "c4": td4.coefficient(c4=1)}
    rows = {
        "euler": ({"c4": 1}, e),
        # (c1^2 - 2c2)^2 = p1(X)^2
        "p1_squared": ({"c1^4": 1, "c1^2c2": -4, "c2^2": 4}, p[(1, 1)]),
        "p2": ({"c2^2": 1, "c1c3": -2, "c4": 2}, p[(2,)]),
        "rr": (rr, chi),
    }
    return LinearSystem.from_equations(CHERN_VARS, [rows[k] for k in order])


def hk_elimination(x: ManifoldRecord, order=HK_EQUATION_ORDER):
    """Relation among c1^4 and c1^2c2 after eliminating c2^2, c1c3 and c4."""
    return solve_linear(hk_linear_system(x, order), targets=["c1^4", "c1^2c2"])


def hk_partner_pipeline(x: ManifoldRecord) -> DeductionTrace:
    m = x.model
    if m.fujiki is None or m.hodge is None or not x.annotations.get("sym2_isomorphism"):
        raise ChernlabError(f"{x.name}: needs Fujiki data and the Sym^2 structure of H^4")
    betti = x.betti()
    b2, b4 = betti[2], betti[4]
    tr = DeductionTrace("hk-pipeline", x.name)

    # (i) Sym^2
    sym2 = b2 * (b2 + 1) // 2
    if sym2 != b4:
        raise ChernlabError(f"{x.name}: dim Sym^2 H^2 = {sym2} != b4 = {b4}")
    tr.add("cup product Sym^2 H^2 -> H^4 is an isomorphism; it transfers to Y", "fujiki",
           b2=b2, sym2_dim=sym2, b4=b4)

    # (ii) Hodge numbers of Y in terms of a = h^{2,0}(Y)
    a = Poly.var("a")
    b = Poly.const(b2) - a * 2
    hy = {(0, 0): Poly.const(1), (2, 0): a, (1, 1): b,
          (4, 0): a * (a + 1) / 2, (3, 1): a * b, (2, 2): b * (b + 1) / 2 + a * a}
    grid = {}
    for (p_, q_), v in hy.items():
        for s, t in ((p_, q_), (q_, p_), (4 - p_, 4 - q_), (4 - q_, 4 - p_)):
            grid[(s, t)] = v
    sig_poly = Poly()
    for (p_, q_), v in grid.items():
        sig_poly = sig_poly + v * ((-1) ** q_)
    sigma = SIGNATURE_EVALUATORS["canonical"](m.hodge)
    tr.add("h^{1,1}(Y) = b2 - 2a; H^4 = Sym^2 H^2 splits by type", "hodge-symmetry",
           h40=str(hy[(4, 0)]), h31=str(hy[(3, 1)]), h22=str(hy[(2, 2)]))
    tr.add("signature of Y as a polynomial in a equals the signature of X", "hodge-symmetry",
           polynomial=str(sig_poly), signature=sigma)
    quad = (sig_poly - sigma).univariate_coefficients("a")
    roots = rational_roots_quadratic(quad[2], quad[1], quad[0])
    integral = [r_ for r_ in roots if r_.denominator == 1 and r_ >= 0]
    tr.add("rational roots of the signature equation", "integrality", roots=tuple(roots),
           integral_roots=tuple(integral))
    if len(integral) != 1:
        return tr.conclude("Hodge numbers not determined", a_candidates=tuple(integral))
    a_val = integral[0]
    y_grid = tuple(tuple(int(grid.get((p_, q_), Poly()).evaluate({"a": a_val})) for q_ in range(5))
                   for p_ in range(5))
    tr.add("Hodge numbers of Y", "hodge-symmetry", a=a_val, hodge=y_grid, equals_X=(y_grid == m.hodge.h))

    # (iii) linear elimination on Chern numbers
    system = hk_linear_system(x)
    sol = solve_linear(system, targets=["c1^4", "c1^2c2"])
    e = m.euler_number()
    p = pontrjagin_numbers(m)
    chi = hrr_chi(m, 0)
    tr.add("c4(Y) = c4(X)", "hodge-symmetry", c4=e)
    tr.add("(c1^2 - 2c2)^2(Y) = p1(X)^2", "pontrjagin-invariance", p1_squared=p[(1, 1)])
    tr.add("c2^2 - 2c1c3 + 2c4 = p2(X)", "pontrjagin-invariance", p2=p[(2,)])
    tr.add("chi(O_Y) = chi(O_X) by Riemann-Roch", "rr", chi=chi)
    if sol.status == "inconsistent" or len(sol.relations) != 1:
        return tr.conclude("elimination did not produce a single relation", status=sol.status)
    relation = sol.relations[0]
    rel = relation.as_dict()
    tr.add("relation among c1^4 and c1^2c2 after eliminating c2^2, c1c3, c4", "rr",
           relation=str(relation), c1_4=rel.get("c1^4", 0), c1_2c2=rel.get("c1^2c2", 0),
           constant=relation.constant)
    # residual coefficient: substitute the three topological equations into Riemann-Roch
    partial = solve_linear(LinearSystem.from_equations(CHERN_VARS, [
        ({"c4": 1}, e), ({"c1^4": 1, "c1^2c2": -4, "c2^2": 4}, p[(1, 1)]),
        ({"c2^2": 1, "c1c3": -2, "c4": 2}, p[(2,)])]), targets=["c1^4", "c1^2c2"])
    rr_row = dict(zip(CHERN_VARS, system.rows[HK_EQUATION_ORDER.index("rr")][0]))
    resid = {"c1^4": rr_row["c1^4"], "c1^2c2": rr_row["c1^2c2"], "const": Fraction(0)}
    for var in ("c2^2", "c1c3", "c4"):
        expr = partial.pivots[var]
        resid["const"] += rr_row[var] * expr.constant
        for v, c in expr.coeffs:
            resid[v] += rr_row[var] * c
    coefficient = resid["c1^4"]
    tr.add("Riemann-Roch after substitution: chi = k (c1^4 - 4 c1^2c2) + chi", "rr",
           k=coefficient, c1_2c2_coefficient=resid["c1^2c2"], constant=resid["const"],
           factored=(coefficient == Fraction(-1, 720) * Fraction(15, 8)))

    # (iv) Miyaoka
    nef_flags = {
        "kappa_nonnegative": int(y_grid[4][0]) >= 1,
        "k_two_divisible": bool(two_divisible(stiefel_whitney_classes(m)[1])),
        "fourth_powers_nonnegative": m.fujiki.constant > 0,
        "b3": betti[3],
    }
    nef = nef_hypotheses_check(nef_flags)
    tr.add("h^0(K_Y) >= 1, K_Y 2-divisible, E^4 = c q(E)^2 >= 0, b3 = 0: K_Y is nef", "hypothesis",
           **nef_flags, nef=nef)
    if not nef:
        return tr.conclude("nefness hypotheses fail", nef=False)
    # on the relation, c1^2c2 = -(coeff of c1^4 / coeff of c1^2c2) c1^4
    ratio = -rel.get("c1^4", Fraction(0)) / rel["c1^2c2"]
    miyaoka = 3 * ratio - 1
    tr.add("3c2 - c1^2 is pseudo-effective for K nef: (3c2 - c1^2)c1^2 >= 0", "miyaoka",
           c1_2c2_per_c1_4=ratio, miyaoka_per_c1_4=miyaoka)
    general_type_possible = miyaoka >= 0
    tr.add("general type means c1^4 > 0; then (3c2 - c1^2)c1^2 = "
           f"{q_str(miyaoka)} c1^4 {'<' if miyaoka < 0 else '>='} 0", "miyaoka", general_type_possible=general_type_possible)

    # (v) numerical dimension
    fc = m.fujiki.constant
    tr.add("K nef and not big: K^4 = 0 = c q(K)^2, so q(K) = 0", "fujiki", fujiki_constant=fc)
    tr.add("q(K) = 0 implies K^3 = 0, so nu <= 2", "fujiki")
    tr.add("nu <= 1 means K^2 = 0 in H^4; Sym^2 H^2 -> H^4 injective gives K = 0, nu = 0", "fujiki")
    nu = (0, 2)
    # (vi) sections of K
    h0k = y_grid[4][0]
    tr.add("h^0(K_Y) = h^{4,0}(Y)", "serre-duality", h0_K=h0k)
    gt = "general type not excluded" if general_type_possible else "not of general type"
    return tr.conclude(f"a={q_str(a_val)}; {relation}; {gt}; ν ∈ {{0,2}}",
                       a=a_val, relation=str(relation), general_type=general_type_possible,
                       nu=nu, h0_K=h0k)


# --------------------------------------------------------------------------
# CY versus HK


def cy_hk_distinction(n: int) -> DeductionTrace:
    if n < 2:
        if n == 1:
            raise ChernlabError("not applicable for n = 1: both are K3 surfaces")
        raise ChernlabError("n must be at least 2")
    tr = DeductionTrace("cy-hk", f"n={n}", {"n": n})
    cy = [1 if p in (0, 2 * n) else 0 for p in range(2 * n + 1)]
    hk = [1 if p % 2 == 0 else 0 for p in range(2 * n + 1)]
    chi_cy = sum((-1) ** p * v for p, v in enumerate(cy))
    chi_hk = sum((-1) ** p * v for p, v in enumerate(hk))
    tr.add("w2 = 0 on both sides, so chi(O) is an o-homeomorphism invariant", "sw-invariance")
    tr.add(f"Calabi-Yau {2 * n}-fold: h^{{p,0}} = 1 only for p = 0, {2 * n}", "hodge-symmetry",
           h_p0=tuple(cy), chi=chi_cy)
    tr.add(f"hyperkaehler {2 * n}-fold: h^{{p,0}} = 1 for even p", "hodge-symmetry", h_p0=tuple(hk), chi=chi_hk)
    return tr.conclude(f"never o-homeomorphic: chi(O) {chi_cy} != {chi_hk}", chi_cy=chi_cy, chi_hk=chi_hk)


def bb_trace(dim: int, chi: int) -> DeductionTrace:
    tr = DeductionTrace("bb", f"dim={dim},chi={chi}", {"dim": dim, "chi": chi})
    shapes = bb_decompositions(dim, chi)
    tr.add("chi(O) is multiplicative over factors: CY odd 0, CY even 2, HK 2m -> m + 1",
           "bb-decomposition", dim=dim, chi=chi, shapes=tuple(str(s) for s in shapes))
    if not shapes:
        return tr.conclude("no decompositions", shapes=())
    return tr.conclude("decompositions: " + "; ".join(map(str, shapes)), shapes=tuple(str(s) for s in shapes))


# --------------------------------------------------------------------------
# registry and replay


@dataclass(frozen=True)
class Pipeline:
    name: str
    func: Callable[..., DeductionTrace]
    takes_record: bool
    params: tuple[str, ...] = ()


PIPELINES: dict[str, Pipeline] = {
    "ricci-flat-exclusion": Pipeline("ricci-flat-exclusion", ricci_flat_exclusion, True),
    "index-match": Pipeline("index-match", fano_index_match, True),
    "general-type-index": Pipeline("general-type-index", general_type_index, True),
    "cubic-partner": Pipeline("cubic-partner", cubic_partner_solve, True, ("evaluator",)),
    "divisor-c3": Pipeline("divisor-c3", divisor_c3_compare, False, ("family", "d")),
    "hk-pipeline": Pipeline("hk-pipeline", hk_partner_pipeline, True),
    "cy-hk": Pipeline("cy-hk", cy_hk_distinction, False, ("n",)),
    "bb": Pipeline("bb", bb_trace, False, ("dim", "chi")),
}


def run_pipeline(name: str, target: str | None = None, resolve: Callable[[str], ManifoldRecord] = build_builtin,
                 **args) -> DeductionTrace:
    if name not in PIPELINES:
        raise ChernlabError(f"unknown pipeline {name!r}; known: {', '.join(PIPELINES)}")
    pipe = PIPELINES[name]
    args = {k: v for k, v in args.items() if v is not None}
    unknown = set(args) - set(pipe.params)
    if unknown:
        raise ChernlabError(f"pipeline {name} does not take {', '.join(sorted(unknown))}")
    if pipe.takes_record:
        if target is None:
            raise ChernlabError(f"pipeline {name} needs a target manifold")
        trace = pipe.func(resolve(target), **args)
        trace.target = target
        return trace
    if name == "divisor-c3":
        family = args.get("family", target)
        if family is None:
            raise ChernlabError("divisor-c3 needs a family (cubic or dp5)")
        return divisor_c3_compare(family, int(args.get("d", 1)))
    missing = [p for p in pipe.params if p not in args]
    if missing:
        raise ChernlabError(f"pipeline {name} needs {', '.join('--' + p for p in missing)}")
    return pipe.func(**{k: int(v) for k, v in args.items()})


def replay(trace: DeductionTrace, resolve: Callable[[str], ManifoldRecord] = build_builtin) -> list[str]:
    """Re-run the trace's pipeline and list every step or verdict that fails to reproduce."""
    pipe = PIPELINES.get(trace.pipeline)
    if pipe is None:
        return [f"unknown pipeline {trace.pipeline!r}"]
    args = dict(trace.args)
    if pipe.takes_record:
        fresh = run_pipeline(trace.pipeline, trace.target, resolve, **args)
    elif trace.pipeline == "divisor-c3":
        fresh = divisor_c3_compare(trace.target, int(args["d"]))
    else:
        fresh = run_pipeline(trace.pipeline, None, resolve, **args)
    problems = []
    if len(fresh.steps) != len(trace.steps):
        problems.append(f"step count {len(trace.steps)} != recomputed {len(fresh.steps)}")
    for i, (old, new) in enumerate(zip(trace.steps, fresh.steps)):
        if old.tag != new.tag or old.claim != new.claim:
            problems.append(f"step {i}: claim or tag differs")
        if _norm(dict(old.values)) != _norm(dict(new.values)):
            problems.append(f"step {i} ({old.claim}): values differ")
    if _norm(trace.verdict) != _norm(fresh.verdict):
        problems.append("verdict differs")
    return problems
