"""Chern-class calculus on manifold models: bundle operations, adjunction,
Pontrjagin and Stiefel-Whitney classes, characteristic numbers."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exact import (ChernlabError, InconsistentModelError, Mod2Class, NonUnitError,
                    invert_unit, q_str, reduce_mod2, to_q)
from .hodge import HodgeDiamond, betti_euler
from .poly import tensor_elementary
from .rings import SchubertRing, UnivariateRing
from .schubert import grassmannian_tangent_chern

TAGS = frozenset({"fano", "calabi_yau", "hyperkahler", "general_type", "K_trivial"})
MAX_TENSOR_RANK = 4


@dataclass(frozen=True)
class BundleSpec:
    rank: int
    total_class: Any

    def __post_init__(self):
        if not isinstance(self.rank, int) or self.rank < 1:
            raise ChernlabError("bundle rank must be a positive integer")
        if self.total_class.constant() != 1:
            raise NonUnitError("total Chern class must start with 1")

    def chern(self, i: int):
        if i > self.rank or i > self.total_class.trunc:
            return self.total_class.like(0)
        return self.total_class.part(i)

    def chern_list(self, upto: int | None = None) -> list:
        upto = self.total_class.trunc if upto is None else upto
        return [self.total_class.like(1)] + [self.chern(i) for i in range(1, upto + 1)]


def line_bundle(c1) -> BundleSpec:
    """Line bundle with first Chern class ``c1`` (a degree-1 class)."""
    return BundleSpec(1, c1.like(1) + c1)


def dual_bundle_class(e: BundleSpec) -> BundleSpec:
    """c_i -> (-1)^i c_i."""
    total = e.total_class.like(0)
    for i in range(e.total_class.trunc + 1):
        total = total + e.total_class.part(i) * ((-1) ** i)
    return BundleSpec(e.rank, total)


def direct_sum(a: BundleSpec, b: BundleSpec) -> BundleSpec:
    """Whitney sum: c(A + B) = c(A) c(B)."""
    return BundleSpec(a.rank + b.rank, a.total_class * b.total_class)


def tensor_product_class(a: BundleSpec, b: BundleSpec, trunc: int | None = None) -> BundleSpec:
    """Total Chern class of a (x) b by the splitting principle."""
    if a.rank > MAX_TENSOR_RANK or b.rank > MAX_TENSOR_RANK:
        raise ChernlabError(f"tensor products are supported up to rank {MAX_TENSOR_RANK}")
    n = a.total_class.trunc if trunc is None else trunc
    one = a.total_class.like(1)
    zero = one * 0
    e = tensor_elementary(a.chern_list(n), a.rank, b.chern_list(n), b.rank, n, one, zero)
    total = zero
    for x in e:
        total = total + x
    return BundleSpec(a.rank * b.rank, total)


@dataclass(frozen=True)
class FujikiData:
    """Fujiki relation x^(2m) = constant * q(x)^m, with q evaluated on the ring generator."""

    constant: Fraction
    q_generator: Fraction
    description: str = ""


@dataclass(frozen=True)
class ManifoldModel:
    name: str
    dim: int
    ring: Any
    tangent_total: Any
    hodge: HodgeDiamond | None = None
    fujiki: FujikiData | None = None
    index: int | None = None
    tags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "tags", frozenset(self.tags))
        unknown = self.tags - TAGS
        if unknown:
            raise ChernlabError(f"unknown tags {sorted(unknown)}")
        if self.ring.dim != self.dim:
            raise InconsistentModelError(f"ring dimension {self.ring.dim} != {self.dim}")
        if self.tangent_total.constant() != 1:
            raise InconsistentModelError("tangent total class must start with 1")
        if self.index is not None and self.chern(1) != self.line_generator * self.index:
            raise InconsistentModelError(f"c1 = {self.chern(1)} is not {self.index} times the generator")
        if self.hodge is not None:
            if self.hodge.n != self.dim:
                raise InconsistentModelError(f"Hodge diamond has dimension {self.hodge.n}, model {self.dim}")
            _, euler = betti_euler(self.hodge)
            if self.euler_number() != euler:
                raise InconsistentModelError(
                    f"top Chern class integrates to {q_str(self.euler_number())} "
                    f"but the Betti numbers give {euler}")

    @property
    def line_generator(self):
        return self.ring.generator()

    def chern(self, i: int):
        if i > self.dim:
            return self.ring.zero()
        return self.tangent_total.part(i)

    def chern_list(self) -> list:
        return [self.ring.one()] + [self.chern(i) for i in range(1, self.dim + 1)]

    def tangent_bundle(self) -> BundleSpec:
        return BundleSpec(self.dim, self.tangent_total)

    def integrate(self, a) -> Fraction:
        return self.ring.integrate(a)

    def euler_number(self) -> Fraction:
        return self.integrate(self.chern(self.dim))

    def canonical_multiple(self) -> Fraction | None:
        """k with c1 = k * generator, when c1 is a multiple of the generator."""
        c1 = self.chern(1)
        h = self.line_generator
        if c1.is_zero():
            return Fraction(0)
        for _, label, coeff in c1.basis_items():
            if h * coeff == c1:
                return coeff
        return None

    def betti(self) -> list[int] | None:
        return None if self.hodge is None else betti_euler(self.hodge)[0]


def _index_and_tags(c1_multiple: int, extra: frozenset = frozenset()) -> tuple[int | None, frozenset]:
    if c1_multiple > 0:
        return c1_multiple, frozenset({"fano"}) | extra
    if c1_multiple == 0:
        return None, frozenset({"K_trivial"}) | extra
    return None, frozenset({"general_type"}) | extra


def complete_intersection(ambient_dim: int, degrees, top_norm_ambient=1, name: str | None = None,
                          hodge: HodgeDiamond | None = None) -> ManifoldModel:
    """Smooth complete intersection in P^ambient_dim by adjunction:
    c(X) = (1+h)^(n+1) * prod (1 + d_i h)^(-1)."""
    degrees = [int(d) for d in degrees]
    if not degrees or any(d < 1 for d in degrees):
        raise ChernlabError("degrees must be a nonempty list of positive integers")
    dim = ambient_dim - len(degrees)
    if dim <= 0:
        raise ChernlabError(f"complete intersection of {len(degrees)} hypersurfaces in P^{ambient_dim} has dim {dim}")
    top = to_q(top_norm_ambient)
    for d in degrees:
        top *= d
    ring = UnivariateRing(dim, top)
    h = ring.generator()
    one = ring.one()
    total = (one + h) ** (ambient_dim + 1)
    for d in degrees:
        total = total * invert_unit(one + h * d)
    index, tags = _index_and_tags(ambient_dim + 1 - sum(degrees))
    if name is None:
        name = f"CI({ambient_dim};{','.join(map(str, degrees))})"
    return ManifoldModel(name, dim, ring, total, hodge=hodge, index=index, tags=tags)


def projective_space(k: int, name: str | None = None, hodge: HodgeDiamond | None = None) -> ManifoldModel:
    """P^k as the hyperplane {x_(k+1) = 0} of P^(k+1)."""
    return complete_intersection(k + 1, [1], name=name or f"P{k}", hodge=hodge)


def grassmannian_complete_intersection(k: int, n: int, num_hyperplanes: int, name: str | None = None,
                                       hodge: HodgeDiamond | None = None) -> ManifoldModel:
    """Intersection of G(k, n) in its Pluecker embedding with general hyperplanes."""
    ring = SchubertRing(k, n, num_hyperplanes)
    dim = ring.dim
    h = ring.generator()
    total = grassmannian_tangent_chern(k, n, trunc=dim)
    normal_inv = invert_unit(ring.one() + h)
    for _ in range(num_hyperplanes):
        total = total * normal_inv
    index, tags = _index_and_tags(n - num_hyperplanes)
    if name is None:
        name = f"G({k},{n})" + (f"-cap-{num_hyperplanes}H" if num_hyperplanes else "")
    return ManifoldModel(name, dim, ring, total, hodge=hodge, index=index, tags=tags)


# --------------------------------------------------------------------------
# Characteristic classes and numbers


def _c(cl: list, i: int):
    return cl[i] if i < len(cl) else cl[0] * 0


def pontrjagin_classes(m: ManifoldModel) -> list:
    """[p1, p2, p3] with p_i = c_{2i}(T + conj T):
    p1 = 2c2 - c1^2, p2 = c2^2 - 2c1c3 + 2c4, p3 = -c3^2 - 2c1c5 + 2c2c4 + 2c6."""
    if m.dim > 6:
        raise ChernlabError("Pontrjagin classes are implemented up to dimension 6")
    c = m.chern_list()
    p1 = _c(c, 2) * 2 - _c(c, 1) * _c(c, 1)
    p2 = _c(c, 2) * _c(c, 2) - _c(c, 1) * _c(c, 3) * 2 + _c(c, 4) * 2
    p3 = -(_c(c, 3) * _c(c, 3)) - _c(c, 1) * _c(c, 5) * 2 + _c(c, 2) * _c(c, 4) * 2 + _c(c, 6) * 2
    return [p1, p2, p3]


def pontrjagin_classes_of_bundle(e: BundleSpec) -> list:
    """[p1, p2, ...] of a bundle as the even parts of c(E) c(E^dual)."""
    prod = e.total_class * dual_bundle_class(e).total_class
    return [prod.part(2 * i) for i in range(1, prod.trunc // 2 + 1)]


def stiefel_whitney_classes(m: ManifoldModel) -> list[Mod2Class]:
    """[w_0, ..., w_n] with w_i = c_i mod 2 (indexed by complex degree)."""
    return [reduce_mod2(c) for c in m.chern_list()]


def partitions(n: int, max_part: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of n into parts <= max_part, largest part first, sorted."""
    max_part = n if max_part is None else max_part
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return sorted(out)


def monomial_label(parts: tuple[int, ...], prefix: str = "c") -> str:
    counts: dict[int, int] = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    return "".join(f"{prefix}{i}" + (f"^{e}" if e > 1 else "") for i, e in sorted(counts.items())) or "1"


@dataclass(frozen=True)
class ChernNumbers:
    """Integrals of all degree-n Chern monomials, keyed by partitions of n."""

    dim: int
    values: tuple[tuple[tuple[int, ...], Fraction], ...]

    def as_dict(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self.values)

    def named(self) -> dict[str, Fraction]:
        return {monomial_label(p): v for p, v in self.values}

    def __getitem__(self, key) -> Fraction:
        if isinstance(key, str):
            return self.named()[key]
        return self.as_dict()[tuple(sorted(key, reverse=True))]


def _monomial_product(classes: list, parts: tuple[int, ...], one):
    out = one
    for p in parts:
        out = out * _c(classes, p)
    return out


def chern_numbers(m: ManifoldModel) -> ChernNumbers:
    c = m.chern_list()
    one = m.ring.one()
    vals = []
    for lam in partitions(m.dim):
        v = m.integrate(_monomial_product(c, lam, one))
        if v.denominator != 1:
            raise InconsistentModelError(
                f"inconsistent model: Chern number {monomial_label(lam)} = {q_str(v)} of {m.name} is not an integer")
        vals.append((lam, v))
    return ChernNumbers(m.dim, tuple(vals))


def pontrjagin_numbers(m: ManifoldModel) -> dict[tuple[int, ...], Fraction]:
    if m.dim % 2:
        raise ChernlabError("Pontrjagin numbers are not defined in odd dimension")
    p = [m.ring.one()] + pontrjagin_classes(m)
    return {tau: m.integrate(_monomial_product(p, tau, m.ring.one())) for tau in partitions(m.dim // 2)}


def sw_numbers(m: ManifoldModel) -> dict[tuple[int, ...], int]:
    """Mod-2 integrals of products of w_i; since w_i = c_i mod 2 these are Chern numbers mod 2."""
    nums = chern_numbers(m).as_dict()
    return {lam: int(v.numerator % 2) for lam, v in nums.items()}
