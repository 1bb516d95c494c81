"""Exact rational arithmetic: truncated graded classes, mod-2 reduction and
linear solving over Q.

Every number in the package is an ``int`` or a :class:`fractions.Fraction`;
floats are rejected at the boundary by :func:`to_q`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence


class ChernlabError(Exception):
    """Base class for errors raised by this package."""


class TruncationError(ChernlabError, ValueError):
    pass


class NonUnitError(ChernlabError, ValueError):
    pass


class NonIntegralError(ChernlabError, ValueError):
    pass


class InconsistentModelError(ChernlabError, ValueError):
    pass


def to_q(x) -> Fraction:
    """Coerce ``x`` to a Fraction. Accepts ints, Fractions and "p/q" strings."""
    if type(x) is Fraction:
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(ch in s for ch in ".eE"):
            raise ValueError(f"not an exact rational: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def q_str(x) -> str:
    """Render a rational as "p/q", or as an integer when the denominator is 1."""
    x = to_q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def is_integral(x) -> bool:
    return to_q(x).denominator == 1


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class GradedClass:
    """A class in Q[h]/(h^(trunc+1)); ``coefficients[k]`` multiplies h^k."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise TruncationError("a graded class needs truncation >= 0")
        coeffs = self.coefficients
        if type(coeffs) is not tuple or any(type(c) is not Fraction for c in coeffs):
            object.__setattr__(self, "coefficients", tuple(to_q(c) for c in coeffs))

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, trunc: int | None = None) -> "GradedClass":
        coeffs = [to_q(c) for c in coeffs]
        if trunc is None:
            trunc = len(coeffs) - 1
        if trunc < 0:
            raise TruncationError("truncation must be non-negative")
        coeffs = (coeffs + [Fraction(0)] * (trunc + 1))[: trunc + 1]
        return cls(tuple(coeffs))

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, object], trunc: int) -> "GradedClass":
        out = [Fraction(0)] * (trunc + 1)
        for deg, c in coeffs.items():
            deg = int(deg)
            if deg < 0:
                raise TruncationError(f"negative degree {deg}")
            if deg > trunc:
                if to_q(c) != 0:
                    raise TruncationError(f"degree {deg} exceeds truncation {trunc}")
                continue
            out[deg] += to_q(c)
        return cls(tuple(out))

    @classmethod
    def one(cls, trunc: int) -> "GradedClass":
        return cls.from_coefficients([1], trunc)

    @classmethod
    def zero(cls, trunc: int) -> "GradedClass":
        return cls.from_coefficients([0], trunc)

    @classmethod
    def generator(cls, trunc: int) -> "GradedClass":
        return cls.from_coefficients([0, 1], trunc)

    @property
    def trunc(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, degree: int) -> Fraction:
        if 0 <= degree <= self.trunc:
            return self.coefficients[degree]
        return Fraction(0)

    def as_dict(self) -> dict[int, Fraction]:
        return {k: c for k, c in enumerate(self.coefficients) if c}

    def constant(self) -> Fraction:
        return self.coefficients[0]

    def like(self, c) -> "GradedClass":
        return GradedClass.from_coefficients([c], self.trunc)

    def part(self, degree: int) -> "GradedClass":
        return GradedClass.from_dict({degree: self.coefficient(degree)}, self.trunc)

    def truncate(self, trunc: int) -> "GradedClass":
        return GradedClass.from_coefficients(self.coefficients[: trunc + 1], trunc)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def basis_items(self) -> Iterator[tuple[int, str, Fraction]]:
        for k, c in enumerate(self.coefficients):
            if c:
                yield k, _h_label(k), c

    def _check(self, other: "GradedClass") -> None:
        if other.trunc != self.trunc:
            raise TruncationError(f"truncation mismatch: {self.trunc} vs {other.trunc}")

    def __add__(self, other):
        if _is_scalar(other):
            other = self.like(other)
        if not isinstance(other, GradedClass):
            return NotImplemented
        self._check(other)
        return GradedClass(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    __radd__ = __add__

    def __neg__(self):
        return GradedClass(tuple(-a for a in self.coefficients))

    def __sub__(self, other):
        if _is_scalar(other):
            other = self.like(other)
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = to_q(other)
            return GradedClass(tuple(a * c for a in self.coefficients))
        if isinstance(other, GradedClass):
            return multiply(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (Fraction(1) / to_q(other))
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only non-negative integer powers")
        out, base = self.like(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __str__(self) -> str:
        terms = [(_h_label(k), c) for k, c in enumerate(self.coefficients) if c]
        return _format_terms(terms)


def _h_label(k: int) -> str:
    return "1" if k == 0 else ("h" if k == 1 else f"h^{k}")


def _format_terms(terms: Iterable[tuple[str, Fraction]]) -> str:
    out = []
    for label, c in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if label == "1":
            body = q_str(mag)
        elif mag == 1:
            body = label
        else:
            body = f"{q_str(mag)}{label}" if mag.denominator == 1 else f"({q_str(mag)}){label}"
        out.append((sign, body))
    if not out:
        return "0"
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def multiply(a: GradedClass, b: GradedClass) -> GradedClass:
    """Truncated convolution product."""
    if a.trunc != b.trunc:
        raise TruncationError(f"truncation mismatch: {a.trunc} vs {b.trunc}")
    n = a.trunc
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a.coefficients):
        if not x:
            continue
        for j in range(n + 1 - i):
            y = b.coefficients[j]
            if y:
                out[i + j] += x * y
    return GradedClass(tuple(out))


def invert_unit(a):
    """Inverse of a class with constant term 1, as a truncated geometric series.

    Works for any class type exposing ``constant``, ``like`` and ``trunc``.
    """
    if a.constant() != 1:
        raise NonUnitError("non-unit total class")
    x = a - a.like(1)
    out = a.like(1)
    term = a.like(1)
    for _ in range(a.trunc):
        term = term * (-x)
        if term.is_zero():
            break
        out = out + term
    return out


def integrate(a: GradedClass, model) -> Fraction:
    """Top coefficient times the top normalization ``d`` of ``model``.

    ``model`` may be a univariate ring or anything carrying one as ``.ring``.
    """
    ring = getattr(model, "ring", model)
    n, top = ring.dim, ring.top
    if a.trunc < n:
        raise TruncationError(f"class truncated at {a.trunc} cannot be integrated on dimension {n}")
    return a.coefficient(n) * top


@dataclass(frozen=True)
class Mod2Class:
    """A class with Z/2 coefficients; ``terms`` lists the basis elements with coefficient 1."""

    trunc: int
    terms: frozenset[tuple[int, str]] = field(default_factory=frozenset)

    @property
    def coefficients(self) -> tuple[int, ...]:
        degrees = {d for d, _ in self.terms}
        return tuple(1 if k in degrees else 0 for k in range(self.trunc + 1))

    def part_is_zero(self, degree: int) -> bool:
        return not any(d == degree for d, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(label for _, label in sorted(self.terms))


def reduce_mod2(a) -> Mod2Class:
    """Coefficient-wise reduction mod 2 in the class's own basis."""
    terms = set()
    for degree, label, c in a.basis_items():
        if c.denominator != 1:
            raise NonIntegralError(f"coefficient {q_str(c)} of {label} is not an integer")
        if c.numerator % 2:
            terms.add((degree, label))
    return Mod2Class(a.trunc, frozenset(terms))


# --------------------------------------------------------------------------
# Linear systems over Q


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``sum(coeffs[i] * variables[i]) = constant``."""

    variables: tuple[str, ...]
    rows: tuple[tuple[tuple[Fraction, ...], Fraction], ...]

    def __post_init__(self):
        width = len(self.variables)
        if len(set(self.variables)) != width:
            raise ValueError("duplicate variable names")
        rows = []
        for coeffs, const in self.rows:
            if len(coeffs) != width:
                raise ValueError(f"row has {len(coeffs)} coefficients, expected {width}")
            rows.append((tuple(to_q(c) for c in coeffs), to_q(const)))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(rows))

    @classmethod
    def from_equations(cls, variables: Sequence[str], equations: Iterable[tuple[Mapping[str, object], object]]):
        variables = tuple(variables)
        rows = []
        for coeffs, const in equations:
            unknown = set(coeffs) - set(variables)
            if unknown:
                raise ValueError(f"unknown variables {sorted(unknown)}")
            rows.append((tuple(to_q(coeffs.get(v, 0)) for v in variables), to_q(const)))
        return cls(variables, tuple(rows))

    def permuted(self, order: Sequence[int]) -> "LinearSystem":
        return LinearSystem(self.variables, tuple(self.rows[i] for i in order))


@dataclass(frozen=True)
class AffineExpr:
    """``constant + sum(coeffs[v] * v)`` over free variables."""

    constant: Fraction
    coeffs: tuple[tuple[str, Fraction], ...] = ()

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        return self.constant + sum((c * to_q(values[v]) for v, c in self.coeffs), Fraction(0))

    def __str__(self) -> str:
        terms = [(v, c) for v, c in self.coeffs] + [("1", self.constant)]
        return _format_terms([(l, c) for l, c in terms if c])


@dataclass(frozen=True)
class Relation:
    """``sum(coeffs[v] * v) = constant``, leading coefficient normalized to 1."""

    coeffs: tuple[tuple[str, Fraction], ...]
    constant: Fraction

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def __str__(self) -> str:
        return f"{_format_terms(list(self.coeffs))} = {q_str(self.constant)}"


@dataclass(frozen=True)
class LinearSolution:
    status: str  # "unique", "parametric" or "inconsistent"
    pivots: dict[str, AffineExpr] = field(default_factory=dict)
    free: tuple[str, ...] = ()
    relations: tuple[Relation, ...] = ()

    @property
    def values(self) -> dict[str, Fraction]:
        if self.status != "unique":
            raise ValueError(f"solution is {self.status}, not unique")
        return {v: e.constant for v, e in self.pivots.items()}

    def satisfied_by(self, assignment: Mapping[str, object]) -> bool:
        if self.status == "inconsistent":
            return False
        return all(e.evaluate(assignment) == to_q(assignment[v]) for v, e in self.pivots.items())


def solve_linear(system: LinearSystem, targets: Sequence[str] | None = None) -> LinearSolution:
    """Gauss-Jordan elimination over Q.

    Pivots are taken in declaration order, except that variables listed in
    ``targets`` are moved after all others. Rows of the reduced system whose
    pivot is a target then involve targets only; they are returned as
    ``relations``.
    """
    variables = list(system.variables)
    targets = list(targets or [])
    missing = set(targets) - set(variables)
    if missing:
        raise ValueError(f"unknown target variables {sorted(missing)}")
    order = [v for v in variables if v not in targets] + [v for v in variables if v in targets]
    col = {v: i for i, v in enumerate(variables)}
    m = [[row[col[v]] for v in order] + [const] for row, const in system.rows]
    ncols = len(order)

    pivot_cols: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(m):
            break

    for row in m[r:]:
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return LinearSolution("inconsistent")

    free = tuple(order[c] for c in range(ncols) if c not in pivot_cols)
    pivots: dict[str, AffineExpr] = {}
    relations = []
    target_set = set(targets)
    for i, c in enumerate(pivot_cols):
        row = m[i]
        coeffs = tuple((order[j], -row[j]) for j in range(ncols) if j != c and row[j] != 0)
        pivots[order[c]] = AffineExpr(row[-1], coeffs)
        if order[c] in target_set:
            rel = tuple((order[j], row[j]) for j in range(ncols) if row[j] != 0)
            relations.append(Relation(rel, row[-1]))
    # report pivots in declaration order
    pivots = {v: pivots[v] for v in variables if v in pivots}
    status = "unique" if not free else "parametric"
    return LinearSolution(status, pivots, free, tuple(relations))
