"""Cohomology models a manifold can carry.

Three kinds are supported:

* ``UnivariateRing``: Q[h]/(h^(n+1)) with a top normalization d = integral of h^n.
* ``SchubertRing``: classes pulled back from G(k, m), integrated on the
  intersection of the Grassmannian with some hyperplane sections.
* ``IntersectionRing``: a graded polynomial ring on named generators with a
  table of top-degree intersection numbers.

All rings expose ``dim``, ``one()``, ``zero()``, ``generator()``,
``integrate(cls)``, ``class_to_dict``/``class_from_dict`` and ``describe()``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

from .exact import (ChernlabError, GradedClass, TruncationError, _format_terms,
                    integrate, q_str, to_q)
from .schubert import (SchubertClass, normalize_partition,
                       schubert_integrate)


@dataclass(frozen=True)
class UnivariateRing:
    dim: int
    top: Fraction

    kind = "univariate"

    def __post_init__(self):
        if self.dim < 0:
            raise ChernlabError("dimension must be non-negative")
        object.__setattr__(self, "top", to_q(self.top))

    def one(self) -> GradedClass:
        return GradedClass.one(self.dim)

    def zero(self) -> GradedClass:
        return GradedClass.zero(self.dim)

    def generator(self) -> GradedClass:
        if self.dim == 0:
            return self.zero()
        return GradedClass.generator(self.dim)

    def integrate(self, a: GradedClass) -> Fraction:
        return integrate(a, self)

    def class_to_dict(self, a: GradedClass) -> dict[str, str]:
        return {str(k): q_str(c) for k, c in sorted(a.as_dict().items())}

    def class_from_dict(self, data: Mapping[str, object]) -> GradedClass:
        coeffs = {}
        for key, val in data.items():
            try:
                deg = int(key)
            except ValueError:
                raise ChernlabError(f"degree key {key!r} is not an integer") from None
            coeffs[deg] = to_q(val)
        return GradedClass.from_dict(coeffs, self.dim)

    def describe(self) -> dict:
        return {"kind": self.kind, "top": q_str(self.top)}


@dataclass(frozen=True)
class SchubertRing:
    k: int
    n: int
    hyperplanes: int = 0

    kind = "schubert"

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ChernlabError(f"invalid Grassmannian G({self.k},{self.n})")
        if self.hyperplanes < 0 or self.full_dim - self.hyperplanes < 1:
            raise ChernlabError(
                f"{self.hyperplanes} hyperplane sections of G({self.k},{self.n}) leave no positive-dimensional variety")

    @property
    def full_dim(self) -> int:
        return self.k * (self.n - self.k)

    @property
    def dim(self) -> int:
        return self.full_dim - self.hyperplanes

    @property
    def ambient(self) -> tuple[int, int]:
        return (self.k, self.n)

    def one(self) -> SchubertClass:
        return SchubertClass.sigma((), self.ambient, self.dim)

    def zero(self) -> SchubertClass:
        return self.one() * 0

    def generator(self) -> SchubertClass:
        return SchubertClass.sigma((1,), self.ambient, self.dim)

    def integrate(self, a: SchubertClass) -> Fraction:
        if a.ambient != self.ambient:
            raise ChernlabError(f"class lives on G{a.ambient}, ring is G{self.ambient}")
        lifted = a.truncate(self.full_dim)
        h = SchubertClass.sigma((1,), self.ambient)
        for _ in range(self.hyperplanes):
            lifted = lifted * h
        return schubert_integrate(lifted)

    def class_to_dict(self, a: SchubertClass) -> dict[str, str]:
        return {"[" + ",".join(map(str, p)) + "]": q_str(c) for p, c in a.terms}

    def class_from_dict(self, data: Mapping[str, object]) -> SchubertClass:
        terms = {}
        for key, val in data.items():
            key = key.strip()
            if not (key.startswith("[") and key.endswith("]")):
                raise ChernlabError(f"partition key {key!r} must look like [2,1]")
            body = key[1:-1].strip()
            try:
                parts = normalize_partition(int(x) for x in body.split(",")) if body else ()
            except ValueError as exc:
                raise ChernlabError(f"bad partition key {key!r}: {exc}") from None
            terms[parts] = to_q(val)
        return SchubertClass.make(terms, self.ambient, self.dim)

    def describe(self) -> dict:
        return {"kind": self.kind, "k": self.k, "n": self.n, "hyperplanes": self.hyperplanes}


@dataclass(frozen=True)
class IntersectionRing:
    """Graded ring on named generators; ``integrals`` maps each top-degree
    monomial (an exponent tuple aligned with ``generators``) to its degree."""

    dim: int
    generators: tuple[tuple[str, int], ...]
    integrals: tuple[tuple[tuple[int, ...], Fraction], ...]

    kind = "intersection"

    @classmethod
    def make(cls, dim: int, generators, integrals: Mapping) -> "IntersectionRing":
        gens = tuple((str(g), int(d)) for g, d in generators)
        if any(d < 1 for _, d in gens):
            raise ChernlabError("generator degrees must be positive")
        names = [g for g, _ in gens]
        if len(set(names)) != len(names):
            raise ChernlabError("duplicate generator names")
        table = {}
        for mono, val in integrals.items():
            exps = _parse_monomial(mono, names) if isinstance(mono, str) else tuple(mono)
            table[exps] = to_q(val)
        ring = cls(dim, gens, tuple(sorted(table.items())))
        missing = [m for m in ring.top_monomials() if m not in table]
        extra = [m for m in table if _degree(m, gens) != dim]
        if missing:
            raise ChernlabError("intersection table lacks " + ", ".join(ring.label(m) for m in missing))
        if extra:
            raise ChernlabError("intersection table has non-top monomials " + ", ".join(ring.label(m) for m in extra))
        return ring

    def top_monomials(self) -> list[tuple[int, ...]]:
        bounds = [self.dim // d for _, d in self.generators]
        return [e for e in product(*(range(b + 1) for b in bounds)) if _degree(e, self.generators) == self.dim]

    def label(self, exps: tuple[int, ...]) -> str:
        parts = [g if e == 1 else f"{g}^{e}" for (g, _), e in zip(self.generators, exps) if e]
        return "*".join(parts) if parts else "1"

    def one(self) -> "PolyClass":
        return PolyClass.make({(0,) * len(self.generators): 1}, self)

    def zero(self) -> "PolyClass":
        return PolyClass.make({}, self)

    def gen(self, name: str) -> "PolyClass":
        names = [g for g, _ in self.generators]
        exps = tuple(1 if g == name else 0 for g in names)
        if name not in names:
            raise ChernlabError(f"unknown generator {name}")
        return PolyClass.make({exps: 1}, self)

    def generator(self) -> "PolyClass":
        return self.gen(self.generators[0][0])

    def integrate(self, a: "PolyClass") -> Fraction:
        table = dict(self.integrals)
        return sum((c * table[m] for m, c in a.terms if _degree(m, self.generators) == self.dim), Fraction(0))

    def class_to_dict(self, a: "PolyClass") -> dict[str, str]:
        return {self.label(m): q_str(c) for m, c in a.terms}

    def class_from_dict(self, data: Mapping[str, object]) -> "PolyClass":
        names = [g for g, _ in self.generators]
        return PolyClass.make({_parse_monomial(k, names): to_q(v) for k, v in data.items()}, self)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "generators": [[g, d] for g, d in self.generators],
            "integrals": {self.label(m): q_str(v) for m, v in self.integrals},
        }


def _degree(exps, gens) -> int:
    return sum(e * d for e, (_, d) in zip(exps, gens))


def _parse_monomial(text: str, names: list[str]) -> tuple[int, ...]:
    exps = [0] * len(names)
    text = text.strip()
    if text == "1":
        return tuple(exps)
    for factor in text.split("*"):
        name, _, power = factor.strip().partition("^")
        if name not in names:
            raise ChernlabError(f"unknown generator {name!r} in monomial {text!r}")
        try:
            exps[names.index(name)] += int(power) if power else 1
        except ValueError:
            raise ChernlabError(f"bad exponent in monomial {text!r}") from None
    return tuple(exps)


@dataclass(frozen=True)
class PolyClass:
    """An element of an :class:`IntersectionRing`, truncated above its dimension."""

    terms: tuple[tuple[tuple[int, ...], Fraction], ...]
    ring: IntersectionRing

    @classmethod
    def make(cls, terms: Mapping, ring: IntersectionRing) -> "PolyClass":
        acc: dict[tuple[int, ...], Fraction] = {}
        for m, c in dict(terms).items():
            m = tuple(m)
            if len(m) != len(ring.generators) or any(e < 0 for e in m):
                raise ChernlabError(f"bad monomial {m}")
            c = to_q(c)
            if c and _degree(m, ring.generators) <= ring.dim:
                acc[m] = acc.get(m, Fraction(0)) + c
        return cls(tuple(sorted((m, c) for m, c in acc.items() if c)), ring)

    @property
    def trunc(self) -> int:
        return self.ring.dim

    def degree_of(self, m) -> int:
        return _degree(m, self.ring.generators)

    def constant(self) -> Fraction:
        return dict(self.terms).get((0,) * len(self.ring.generators), Fraction(0))

    def like(self, c) -> "PolyClass":
        return PolyClass.make({(0,) * len(self.ring.generators): c}, self.ring)

    def part(self, degree: int) -> "PolyClass":
        return PolyClass.make({m: c for m, c in self.terms if self.degree_of(m) == degree}, self.ring)

    def is_zero(self) -> bool:
        return not self.terms

    def basis_items(self) -> Iterator[tuple[int, str, Fraction]]:
        for m, c in self.terms:
            yield self.degree_of(m), self.ring.label(m), c

    def _check(self, other):
        if other.ring != self.ring:
            raise TruncationError("classes live in different rings")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = self.like(other)
        if not isinstance(other, PolyClass):
            return NotImplemented
        self._check(other)
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, Fraction(0)) + c
        return PolyClass.make(acc, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return PolyClass.make({m: -c for m, c in self.terms}, self.ring)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = self.like(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = to_q(other)
            return PolyClass.make({m: x * c for m, x in self.terms}, self.ring)
        if not isinstance(other, PolyClass):
            return NotImplemented
        self._check(other)
        acc: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(a + b for a, b in zip(m1, m2))
                if self.degree_of(m) <= self.ring.dim:
                    acc[m] = acc.get(m, Fraction(0)) + c1 * c2
        return PolyClass.make(acc, self.ring)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self.like(1)
        for _ in range(e):
            out = out * self
        return out

    def __str__(self) -> str:
        return _format_terms([(self.ring.label(m), c) for m, c in self.terms])


def ring_from_dict(dim: int, data: Mapping) -> UnivariateRing | SchubertRing | IntersectionRing:
    kind = data.get("kind")
    try:
        if kind == "univariate":
            _expect_keys(data, {"kind", "top"}, "ring")
            return UnivariateRing(dim, to_q(data["top"]))
        if kind == "schubert":
            _expect_keys(data, {"kind", "k", "n", "hyperplanes"}, "ring")
            ring = SchubertRing(int(data["k"]), int(data["n"]), int(data["hyperplanes"]))
            if ring.dim != dim:
                raise ChernlabError(f"ring dimension {ring.dim} does not match dim {dim}")
            return ring
        if kind == "intersection":
            _expect_keys(data, {"kind", "generators", "integrals"}, "ring")
            return IntersectionRing.make(dim, [tuple(g) for g in data["generators"]], data["integrals"])
    except KeyError as exc:
        raise ChernlabError(f"ring: missing key {exc.args[0]!r}") from None
    raise ChernlabError(f"ring: unknown kind {kind!r}")


def _expect_keys(data: Mapping, allowed: set[str], where: str) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise ChernlabError(f"{where}: unknown key(s) {', '.join(extra)}")
