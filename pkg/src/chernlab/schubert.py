"""Schubert calculus on the Grassmannian G(k, n) of k-planes in C^n.

Classes are indexed by partitions inside the k x (n-k) box; partitions are
stored as tuples without trailing zeros. Products that leave the box vanish
and are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

from .exact import ChernlabError, TruncationError, _format_terms, to_q
from .poly import tensor_elementary

Partition = tuple[int, ...]


def normalize_partition(parts) -> Partition:
    parts = tuple(int(p) for p in parts)
    if any(p < 0 for p in parts):
        raise ValueError(f"negative part in {parts}")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError(f"{parts} is not weakly decreasing")
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    return parts


def fits_box(p: Partition, k: int, n: int) -> bool:
    return len(p) <= k and all(x <= n - k for x in p)


def partitions_in_box(k: int, n: int, size: int | None = None) -> list[Partition]:
    """All partitions in the k x (n-k) box, optionally of a fixed size, sorted."""
    return list(_box_partitions(k, n, size))


@lru_cache(maxsize=None)
def _box_partitions(k: int, n: int, size: int | None) -> tuple[Partition, ...]:
    out = []

    def rec(prefix, max_part, remaining_rows):
        p = normalize_partition(prefix)
        if size is None or sum(p) == size:
            out.append(p)
        if remaining_rows == 0:
            return
        for part in range(1, max_part + 1):
            if size is not None and sum(prefix) + part > size:
                break
            rec(prefix + (part,), part, remaining_rows - 1)

    rec((), n - k, k)
    return tuple(sorted(set(out)))


def complement(p: Partition, k: int, n: int) -> Partition:
    padded = list(p) + [0] * (k - len(p))
    return normalize_partition((n - k) - x for x in reversed(padded))


def partition_label(p: Partition) -> str:
    if not p:
        return "s()"
    return "s(" + ",".join(map(str, p)) + ")"


@dataclass(frozen=True)
class SchubertClass:
    """Rational combination of Schubert classes on G(k, n).

    ``trunc`` caps the codimension kept by products; it defaults to the
    dimension k(n-k) of the Grassmannian and is lowered when the class lives
    on a subvariety cut out by hyperplanes.
    """

    terms: tuple[tuple[Partition, Fraction], ...]
    ambient: tuple[int, int]
    trunc: int

    @classmethod
    def make(cls, terms: Mapping, ambient: tuple[int, int], trunc: int | None = None) -> "SchubertClass":
        k, n = ambient
        if not 1 <= k < n:
            raise ChernlabError(f"invalid Grassmannian G({k},{n})")
        full = k * (n - k)
        trunc = full if trunc is None else trunc
        if not 0 <= trunc <= full:
            raise TruncationError(f"truncation {trunc} outside [0, {full}]")
        acc: dict[Partition, Fraction] = {}
        for p, c in dict(terms).items():
            p = normalize_partition(p)
            c = to_q(c)
            if not c or not fits_box(p, k, n) or sum(p) > trunc:
                continue
            acc[p] = acc.get(p, Fraction(0)) + c
        return cls(tuple(sorted((p, c) for p, c in acc.items() if c)), (k, n), trunc)

    @classmethod
    def sigma(cls, parts, ambient: tuple[int, int], trunc: int | None = None) -> "SchubertClass":
        return cls.make({normalize_partition(parts): 1}, ambient, trunc)

    @property
    def as_dict(self) -> dict[Partition, Fraction]:
        return dict(self.terms)

    def coefficient(self, parts) -> Fraction:
        return self.as_dict.get(normalize_partition(parts), Fraction(0))

    def constant(self) -> Fraction:
        return self.coefficient(())

    def like(self, c) -> "SchubertClass":
        return SchubertClass.make({(): c}, self.ambient, self.trunc)

    def part(self, degree: int) -> "SchubertClass":
        return SchubertClass.make({p: c for p, c in self.terms if sum(p) == degree}, self.ambient, self.trunc)

    def truncate(self, trunc: int) -> "SchubertClass":
        return SchubertClass.make(self.as_dict, self.ambient, trunc)

    def is_zero(self) -> bool:
        return not self.terms

    def basis_items(self) -> Iterator[tuple[int, str, Fraction]]:
        for p, c in self.terms:
            yield sum(p), partition_label(p), c

    def _check(self, other: "SchubertClass") -> None:
        if other.ambient != self.ambient:
            raise ChernlabError(f"ambient mismatch: G{self.ambient} vs G{other.ambient}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = self.like(other)
        if not isinstance(other, SchubertClass):
            return NotImplemented
        self._check(other)
        acc = self.as_dict
        for p, c in other.terms:
            acc[p] = acc.get(p, Fraction(0)) + c
        return SchubertClass.make(acc, self.ambient, min(self.trunc, other.trunc))

    __radd__ = __add__

    def __neg__(self):
        return SchubertClass.make({p: -c for p, c in self.terms}, self.ambient, self.trunc)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = self.like(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = to_q(other)
            return SchubertClass.make({p: x * c for p, x in self.terms}, self.ambient, self.trunc)
        if isinstance(other, SchubertClass):
            return lr_multiply(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self.like(1)
        for _ in range(e):
            out = out * self
        return out

    def __str__(self) -> str:
        return _format_terms([("1" if not p else partition_label(p), c) for p, c in self.terms])


def _horizontal_strips(lam: Partition, m: int, k: int, n: int) -> list[Partition]:
    """Partitions nu in the box with nu/lam a horizontal strip of size m."""
    lam_p = list(lam) + [0] * (k - len(lam))
    out = []

    def rec(i, remaining, acc):
        if i == k:
            if remaining == 0:
                out.append(normalize_partition(acc))
            return
        upper = (n - k) if i == 0 else lam_p[i - 1]
        for add in range(0, min(remaining, upper - lam_p[i]) + 1):
            rec(i + 1, remaining - add, acc + [lam_p[i] + add])

    rec(0, m, [])
    return out


def pieri_multiply(a: SchubertClass, m: int) -> SchubertClass:
    """Product with the special class sigma_m (Pieri rule)."""
    k, n = a.ambient
    if not 0 <= m <= n - k:
        raise ChernlabError(f"Pieri index {m} outside [0, {n - k}]")
    acc: dict[Partition, Fraction] = {}
    for lam, c in a.terms:
        for nu in _horizontal_strips(lam, m, k, n):
            acc[nu] = acc.get(nu, Fraction(0)) + c
    return SchubertClass.make(acc, a.ambient, a.trunc)


@lru_cache(maxsize=None)
def lr_coefficient(lam: Partition, mu: Partition, nu: Partition) -> int:
    """Number of Littlewood-Richardson tableaux of shape nu/lam and content mu."""
    if sum(nu) != sum(lam) + sum(mu):
        return 0
    lam_p = list(lam) + [0] * (len(nu) - len(lam))
    if len(lam) > len(nu) or any(l > v for l, v in zip(lam_p, nu)):
        return 0
    # cells in reading order: rows top to bottom, each row right to left
    cells = [(i, j) for i in range(len(nu)) for j in range(nu[i] - 1, lam_p[i] - 1, -1)]
    content = list(mu)
    filling: dict[tuple[int, int], int] = {}
    counts = [0] * len(content)

    def rec(idx):
        if idx == len(cells):
            return 1
        i, j = cells[idx]
        total = 0
        for v in range(len(content)):
            if counts[v] >= content[v]:
                continue
            if v > 0 and counts[v] + 1 > counts[v - 1]:
                continue  # lattice word condition
            right = filling.get((i, j + 1))
            if right is not None and v > right:
                continue  # rows weakly increase left to right
            above = filling.get((i - 1, j))
            if above is not None and v <= above:
                continue  # columns strictly increase downward
            filling[(i, j)] = v
            counts[v] += 1
            total += rec(idx + 1)
            counts[v] -= 1
            del filling[(i, j)]
        return total

    return rec(0)


def lr_multiply(a: SchubertClass, b: SchubertClass) -> SchubertClass:
    """Bilinear product via Littlewood-Richardson coefficients, clipped to the box."""
    a._check(b)
    k, n = a.ambient
    trunc = min(a.trunc, b.trunc)
    acc: dict[Partition, Fraction] = {}
    for lam, x in a.terms:
        for mu, y in b.terms:
            size = sum(lam) + sum(mu)
            if size > trunc:
                continue
            for nu in _box_partitions(k, n, size):
                c = lr_coefficient(lam, mu, nu)
                if c:
                    acc[nu] = acc.get(nu, Fraction(0)) + c * x * y
    return SchubertClass.make(acc, a.ambient, trunc)


def schubert_integrate(a: SchubertClass) -> Fraction:
    """Coefficient of the point class (the full box)."""
    k, n = a.ambient
    return a.coefficient((n - k,) * k)


def grassmannian_tangent_chern(k: int, n: int, trunc: int | None = None) -> SchubertClass:
    """Total Chern class of T G(k, n) = S^dual (x) Q by the splitting principle."""
    if not (isinstance(k, int) and isinstance(n, int) and 1 <= k < n):
        raise ChernlabError(f"invalid Grassmannian G({k},{n})")
    amb = (k, n)
    one = SchubertClass.sigma((), amb, trunc)
    zero = one * 0
    dim = one.trunc
    c_sdual = [SchubertClass.sigma((1,) * i, amb, trunc) for i in range(k + 1)]
    c_quot = [SchubertClass.sigma((i,), amb, trunc) for i in range(n - k + 1)]
    e = tensor_elementary(c_sdual, k, c_quot, n - k, dim, one, zero)
    total = zero
    for x in e:
        total = total + x
    return total

