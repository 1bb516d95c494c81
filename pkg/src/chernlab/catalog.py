"""Built-in manifold records and their JSON persistence.

A record bundles a :class:`ManifoldModel` with provenance notes, free-form
annotations and a redundant copy of the derived invariants. Loading always
re-derives those invariants and rejects files whose stored values disagree.
"""
from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

from .chern import (FujikiData, ManifoldModel, chern_numbers, complete_intersection,
                    grassmannian_complete_intersection, monomial_label, pontrjagin_numbers,
                    projective_space, stiefel_whitney_classes)
from .exact import ChernlabError, InconsistentModelError, q_str, to_q
from .genus import hrr_chi, l_genus_signature
from .hodge import (HodgeDiamond, betti_euler, legacy_signature_from_hodge,
                    signature_from_hodge, two_divisible, validate_diamond)
from .rings import IntersectionRing, UnivariateRing, ring_from_dict

SCHEMA_VERSION = 1
TOP_LEVEL_KEYS = {"schema_version", "name", "dim", "ring", "tangent_total", "hodge", "fujiki",
                  "index", "tags", "provenance", "annotations", "stored"}
REQUIRED_KEYS = {"name", "dim", "ring", "tangent_total"}


class RecordError(ChernlabError, ValueError):
    """A manifold file could not be parsed or failed its cross-checks."""


@dataclass(frozen=True)
class ManifoldRecord:
    model: ManifoldModel
    provenance: Mapping[str, str] = field(default_factory=dict)
    annotations: Mapping[str, Any] = field(default_factory=dict)
    stored: Mapping[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.model.name

    def betti(self) -> list[int] | None:
        return self.model.betti()

    def b(self, k: int) -> int | None:
        betti = self.betti()
        return None if betti is None else betti[k]


def derive_stored(model: ManifoldModel) -> dict[str, Any]:
    """Derived invariants in their serialized form (rationals as strings)."""
    out: dict[str, Any] = {}
    out["chern_numbers"] = {k: q_str(v) for k, v in chern_numbers(model).named().items()}
    out["euler"] = q_str(model.euler_number())
    if model.dim <= 6:
        out["chi_O"] = q_str(hrr_chi(model, 0))
    if model.dim % 2 == 0 and model.dim <= 6:
        out["pontrjagin_numbers"] = {monomial_label(t, "p"): q_str(v)
                                     for t, v in pontrjagin_numbers(model).items()}
    out["w2_vanishes"] = two_divisible(stiefel_whitney_classes(model)[1])
    if model.hodge is not None:
        betti, euler = betti_euler(model.hodge)
        out["betti"] = betti
        if model.dim % 2 == 0:
            out["signature"] = signature_from_hodge(model.hodge)
            out["signature_legacy"] = legacy_signature_from_hodge(model.hodge)
    if model.dim in (2, 4):
        out["l_signature"] = q_str(l_genus_signature(model))
    return out


def check_record(record: ManifoldRecord) -> list[str]:
    """Mismatches between stored and re-derived values plus model-level cross-checks."""
    problems = []
    m = record.model
    if m.hodge is not None:
        problems += validate_diamond(m.hodge)
    derived = derive_stored(m)
    for key, value in record.stored.items():
        if key not in derived:
            problems.append(f"stored.{key}: not a derived quantity")
        elif _normalize(value) != _normalize(derived[key]):
            problems.append(f"stored.{key}: file has {_show(value)}, recomputed {_show(derived[key])}")
    if m.hodge is not None and "l_signature" in derived:
        if to_q(derived["l_signature"]) != derived["signature"]:
            problems.append(f"signature: Hodge index {derived['signature']} != L-genus {derived['l_signature']}")
    if m.hodge is not None and "chi_O" in derived:
        if to_q(derived["chi_O"]) != m.hodge.chi_structure_sheaf():
            problems.append(f"chi_O: Riemann-Roch {derived['chi_O']} != Hodge {m.hodge.chi_structure_sheaf()}")
    return problems


def _normalize(v):
    if isinstance(v, dict):
        return {k: _normalize(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_normalize(x) for x in v]
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (int, Fraction)):
        return to_q(v)
    if isinstance(v, str):
        try:
            return to_q(v)
        except (ValueError, ZeroDivisionError):
            return v
    return v


def _show(v) -> str:
    return json.dumps(v, sort_keys=True) if not isinstance(v, str) else v


def make_record(model: ManifoldModel, provenance=None, annotations=None) -> ManifoldRecord:
    record = ManifoldRecord(model, dict(provenance or {}), dict(annotations or {}), derive_stored(model))
    problems = check_record(record)
    if problems:
        raise InconsistentModelError(f"{model.name}: " + "; ".join(problems))
    return record


# --------------------------------------------------------------------------
# Hodge data of the built-ins

def _pp_diamond(n: int, middle: int = 1) -> HodgeDiamond:
    """Diamond with only h^{p,p} nonzero, all 1 except h^{n/2,n/2} = middle."""
    return HodgeDiamond.from_entries(n, {(p, p): (middle if 2 * p == n else 1) for p in range(n + 1)})


K3_DIAMOND = HodgeDiamond.from_entries(2, {(0, 0): 1, (2, 0): 1, (1, 1): 20})
CUBIC4_DIAMOND = HodgeDiamond.from_entries(4, {(0, 0): 1, (1, 1): 1, (2, 2): 21, (3, 1): 1, (4, 0): 0})


def sym2_diamond(surface: HodgeDiamond) -> HodgeDiamond:
    """Hodge diamond of the Hilbert square of a surface with h^{1,0} = 0,
    built from H^4 = Sym^2 H^2: a = h^{2,0}, b = h^{1,1} + 1."""
    if surface.n != 2 or surface[1, 0] != 0:
        raise ChernlabError("Hilbert-square Hodge data needs a surface with h^{1,0} = 0")
    a = surface[2, 0]
    b = surface[1, 1] + 1
    return HodgeDiamond.from_entries(4, {
        (0, 0): 1, (2, 0): a, (1, 1): b,
        (4, 0): a * (a + 1) // 2, (3, 1): a * b, (2, 2): b * (b + 1) // 2 + a * a,
    })


def hilb2_topology(e: int, b2: int) -> dict[str, int]:
    """Euler number and even Betti numbers of the Hilbert square of a simply connected surface."""
    euler = (e * e - e) // 2 + 2 * e
    b2h = b2 + 1
    return {"euler": euler, "b2": b2h, "b4": euler - 2 * (1 + b2h)}


def _is_k3(record: ManifoldRecord) -> bool:
    m = record.model
    return (m.dim == 2 and m.chern(1).is_zero() and m.euler_number() == 24
            and m.hodge is not None and m.hodge[2, 0] == 1 and m.hodge[1, 0] == 0)


def build_hilb2(surface: ManifoldRecord) -> ManifoldRecord:
    """Hilbert square S^[2] of a K3 surface as an intersection-ring model.

    The ring has generators h (a degree-2 polarization pulled back, q(h) = 2),
    c = c2 and the point class. h^4 = 3 q(h)^2 by the Fujiki relation,
    h^2 c = 30 q(h), and c^2 follows from Riemann-Roch and chi(O) = 3.
    """
    if surface.model.dim != 2:
        raise ChernlabError(f"{surface.name} is not a surface")
    if not _is_k3(surface):
        raise ChernlabError(
            f"{surface.name}: the full Hilbert-square model needs a K3 surface; use hilb2_topology(e, b2)")
    e = int(surface.model.euler_number())
    b2 = betti_euler(surface.model.hodge)[0][2]
    topo = hilb2_topology(e, b2)
    diamond = sym2_diamond(surface.model.hodge)
    chi = diamond.chi_structure_sheaf()
    euler = topo["euler"]
    # Riemann-Roch with c1 = c3 = 0: chi(O) = (3 c2^2 - c4) / 720
    c2sq = Fraction(720 * chi + euler, 3)
    q_h = 2
    fujiki_c = 3
    ring = IntersectionRing.make(4, [("h", 1), ("c", 2), ("pt", 4)], {
        "h^4": fujiki_c * q_h ** 2, "h^2*c": 30 * q_h, "c^2": c2sq, "pt": 1,
    })
    tangent = ring.one() + ring.gen("c") + ring.gen("pt") * euler
    model = ManifoldModel(
        "hilb2_k3", 4, ring, tangent, hodge=diamond,
        fujiki=FujikiData(Fraction(fujiki_c), Fraction(q_h), "x^4 = 3 q(x)^2, q(h) = 2"),
        tags={"hyperkahler", "K_trivial"})
    return make_record(model, provenance={
        "euler": "(e^2 - e)/2 + 2e with e = 24",
        "b2": "b2(S) + 1",
        "b4": "euler - 2(1 + b2)",
        "hodge": "H^4 = Sym^2 H^2 decomposed by type",
        "c2^2": "Riemann-Roch with chi(O) = 3 and c4 = 324",
        "h^4": "Fujiki relation with constant 3",
        "h^2*c": "standard value 30 q(h) for K3^[2]-type manifolds",
    }, annotations={
        "simply_connected": True, "kappa": 0, "kappa_nonnegative": True,
        "k_two_divisible": True, "fourth_powers_nonnegative": True,
        "sym2_isomorphism": True, "b3": 0,
        "generalized_kummer4_b2": 7,
    })


def _k3() -> ManifoldRecord:
    ring = UnivariateRing(2, 2)
    h = ring.generator()
    model = ManifoldModel("k3", 2, ring, ring.one() + h * h * 12, hodge=K3_DIAMOND,
                          tags={"hyperkahler", "K_trivial"})
    return make_record(model, provenance={
        "ring": "degree-2 polarization, h^2 = 2",
        "tangent_total": "c1 = 0, c2 = 24 (Noether: chi(O) = 2)",
        "hodge": "K3 Hodge diamond",
    }, annotations={"simply_connected": True, "kappa": 0, "k_two_divisible": True})


def _kodaira_w() -> ManifoldRecord:
    ring = IntersectionRing.make(2, [("h", 1), ("f", 1), ("pt", 2)], {"h^2": 2, "h*f": 1, "f^2": 0, "pt": 1})
    tangent = ring.one() - ring.gen("f") * 2 + ring.gen("pt") * 24
    model = ManifoldModel("kodaira_w_surface", 2, ring, tangent, hodge=K3_DIAMOND)
    return make_record(model, provenance={
        "ring": "polarization h and elliptic fibre f with f^2 = 0",
        "tangent_total": "K = 2f (canonical bundle formula), c2 = 24",
        "hodge": "same Betti numbers as K3, p_g = 1, q = 0",
    }, annotations={"simply_connected": True, "kappa": 1, "k_two_divisible": True})


def _pn(k: int) -> ManifoldRecord:
    model = projective_space(k, name=f"pn({k})", hodge=_pp_diamond(k))
    return make_record(model, provenance={
        "tangent_total": f"Euler sequence (1+h)^{k + 1}",
        "hodge": "cell decomposition",
    }, annotations={"simply_connected": True, "fano_index": k + 1, "picard_rank": 1})


def _quadric(k: int) -> ManifoldRecord:
    if k < 3:
        raise ChernlabError("quadrics are provided from dimension 3 on (b2 = 1)")
    name = "quadric4" if k == 4 else f"quadric({k})"
    model = complete_intersection(k + 1, [2], name=name, hodge=_pp_diamond(k, 2 if k % 2 == 0 else 1))
    return make_record(model, provenance={
        "tangent_total": f"adjunction (1+h)^{k + 2} (1+2h)^-1 in P^{k + 1}",
        "hodge": "Lefschetz plus Euler number",
    }, annotations={"simply_connected": True, "fano_index": k, "picard_rank": 1})


def _cubic4() -> ManifoldRecord:
    model = complete_intersection(5, [3], name="cubic4", hodge=CUBIC4_DIAMOND)
    return make_record(model, provenance={
        "tangent_total": "adjunction (1+h)^6 (1+3h)^-1 in P^5",
        "top": "degree 3 hypersurface, h^4 = 3",
        "betti": "Lefschetz off the middle, b4 from the Euler number",
        "hodge": "middle Hodge numbers from the Jacobian ring",
    }, annotations={"simply_connected": True, "fano_index": 3, "picard_rank": 1,
                    "stated_signature": 23})


def _dp5() -> ManifoldRecord:
    model = grassmannian_complete_intersection(2, 5, 2, name="dp5", hodge=_pp_diamond(4, 2))
    return make_record(model, provenance={
        "ring": "G(2,5) in its Pluecker embedding cut by two hyperplanes",
        "tangent_total": "c(S^dual (x) Q) (1 + s1)^-2",
        "hodge": "b4 = 2, all classes algebraic",
    }, annotations={"simply_connected": True, "fano_index": 3, "picard_rank": 1})


_PN = re.compile(r"^(?:pn\((\d+)\)|p(\d+))$")
_QUADRIC = re.compile(r"^quadric\((\d+)\)$")

BUILTIN_NAMES = ("cubic4", "quadric4", "pn(k)", "quadric(k)", "dp5", "k3", "hilb2_k3", "kodaira_w_surface")
DEFAULT_BUILTINS = ("cubic4", "quadric4", "pn(4)", "dp5", "k3", "hilb2_k3", "kodaira_w_surface")


def build_builtin(name: str) -> ManifoldRecord:
    """Record of a built-in manifold; construction is memoized per normalized name."""
    return _build_builtin(name.strip().lower())


@lru_cache(maxsize=None)
def _build_builtin(key: str) -> ManifoldRecord:
    fixed = {"cubic4": _cubic4, "quadric4": lambda: _quadric(4), "dp5": _dp5, "k3": _k3,
             "hilb2_k3": lambda: build_hilb2(_k3()), "kodaira_w_surface": _kodaira_w}
    if key in fixed:
        return fixed[key]()
    m = _PN.match(key)
    if m:
        k = int(m.group(1) or m.group(2))
        if not 1 <= k <= 6:
            raise ChernlabError("pn(k) is provided for 1 <= k <= 6")
        return _pn(k)
    m = _QUADRIC.match(key)
    if m:
        k = int(m.group(1))
        if k > 6:
            raise ChernlabError("quadric(k) is provided for 3 <= k <= 6")
        return _quadric(k)
    raise ChernlabError(f"unknown built-in manifold {key!r}; known: {', '.join(BUILTIN_NAMES)}")


# --------------------------------------------------------------------------
# Persistence


def record_to_dict(record: ManifoldRecord) -> dict[str, Any]:
    m = record.model
    return {
        "schema_version": SCHEMA_VERSION,
        "name": m.name,
        "dim": m.dim,
        "ring": m.ring.describe(),
        "tangent_total": m.ring.class_to_dict(m.tangent_total),
        "hodge": None if m.hodge is None else m.hodge.grid(),
        "fujiki": None if m.fujiki is None else {
            "constant": q_str(m.fujiki.constant), "q_generator": q_str(m.fujiki.q_generator),
            "description": m.fujiki.description},
        "index": m.index,
        "tags": sorted(m.tags),
        "provenance": dict(sorted(record.provenance.items())),
        "annotations": copy.deepcopy(dict(sorted(record.annotations.items()))),
        "stored": copy.deepcopy(dict(record.stored)),
    }


def dumps_record(record: ManifoldRecord) -> str:
    return json.dumps(record_to_dict(record), indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def save_record(record: ManifoldRecord, path) -> None:
    Path(path).write_text(dumps_record(record), encoding="utf-8")


def record_from_dict(data: Mapping[str, Any], source: str = "<record>") -> ManifoldRecord:
    if not isinstance(data, dict):
        raise RecordError(f"{source}: top level must be an object")
    unknown = sorted(set(data) - TOP_LEVEL_KEYS)
    if unknown:
        raise RecordError(f"{source}: unknown field(s) {', '.join(unknown)}")
    missing = sorted(REQUIRED_KEYS - set(data))
    if missing:
        raise RecordError(f"{source}: missing field(s) {', '.join(missing)}")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise RecordError(f"{source}: schema_version {version!r} is not supported (expected {SCHEMA_VERSION})")

    def field_error(name, exc):
        return RecordError(f"{source}: field {name!r}: {exc}")

    try:
        dim = int(data["dim"])
    except (TypeError, ValueError) as exc:
        raise field_error("dim", exc) from None
    try:
        ring = ring_from_dict(dim, data["ring"])
    except (ChernlabError, TypeError, ValueError) as exc:
        raise field_error("ring", exc) from None
    try:
        tangent = ring.class_from_dict(data["tangent_total"])
    except (ChernlabError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise field_error("tangent_total", exc) from None
    hodge = None
    if data.get("hodge") is not None:
        try:
            hodge = HodgeDiamond.from_grid(data["hodge"])
        except (TypeError, ValueError) as exc:
            raise field_error("hodge", exc) from None
        if hodge.n != dim:
            raise field_error("hodge", f"diamond has dimension {hodge.n}, record has {dim}")
        problems = validate_diamond(hodge)
        if problems:
            raise field_error("hodge", "; ".join(problems))
    fujiki = None
    if data.get("fujiki") is not None:
        f = data["fujiki"]
        try:
            extra = sorted(set(f) - {"constant", "q_generator", "description"})
            if extra:
                raise ValueError(f"unknown key(s) {', '.join(extra)}")
            fujiki = FujikiData(to_q(f["constant"]), to_q(f["q_generator"]), str(f.get("description", "")))
        except (KeyError, TypeError, ValueError) as exc:
            raise field_error("fujiki", exc) from None
    index = data.get("index")
    if index is not None and (not isinstance(index, int) or isinstance(index, bool)):
        raise field_error("index", "must be an integer or null")
    tags = data.get("tags", [])
    if not isinstance(tags, list):
        raise field_error("tags", "must be a list")
    for name in ("provenance", "annotations", "stored"):
        if not isinstance(data.get(name, {}), dict):
            raise field_error(name, "must be an object")
    try:
        model = ManifoldModel(str(data["name"]), dim, ring, tangent, hodge=hodge, fujiki=fujiki,
                              index=index, tags=frozenset(tags))
    except ChernlabError as exc:
        raise RecordError(f"{source}: {exc}") from None
    record = ManifoldRecord(model, dict(data.get("provenance", {})), dict(data.get("annotations", {})),
                            dict(data.get("stored", {})))
    try:
        problems = check_record(record)
    except ChernlabError as exc:
        raise RecordError(f"{source}: {exc}") from None
    if problems:
        raise RecordError(f"{source}: rejected, " + "; ".join(problems))
    return record


def loads_record(text: str, source: str = "<string>") -> ManifoldRecord:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"{source}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return record_from_dict(data, source)


def load_record(path) -> ManifoldRecord:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RecordError(f"{path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError as exc:
        raise RecordError(f"{path}: not UTF-8 ({exc.reason})") from None
    return loads_record(text, str(path))


def load_catalog_dir(directory) -> tuple[dict[str, ManifoldRecord], dict[str, str]]:
    """All ``*.json`` records of a directory, plus an error message per bad file."""
    records: dict[str, ManifoldRecord] = {}
    errors: dict[str, str] = {}
    for path in sorted(Path(directory).glob("*.json")):
        try:
            rec = load_record(path)
        except RecordError as exc:
            errors[str(path)] = str(exc)
            continue
        records[rec.name] = rec
    return records, errors
