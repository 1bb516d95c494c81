"""Multivariate polynomials over Q, Newton identities and multiplicative sequences.

The Newton-identity routines are generic: they work on anything with ``+``,
``-``, ``*`` and rational scaling, so the same code symmetrizes formal
polynomials in c_1..c_n and concrete cohomology classes.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Mapping, Sequence

from .exact import q_str, to_q

Monomial = tuple[tuple[str, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    out = dict(a)
    for v, e in b:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


class Poly:
    """Sparse polynomial in named variables with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = to_q(c)
            if c:
                mono = tuple(sorted((v, e) for v, e in mono if e))
                clean[mono] = clean.get(mono, Fraction(0)) + c
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        return cls({((name, power),): 1})

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): c})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, **exps: int) -> Fraction:
        mono = tuple(sorted((v, e) for v, e in exps.items() if e))
        return self.terms.get(mono, Fraction(0))

    def variables(self) -> set[str]:
        return {v for mono in self.terms for v, _ in mono}

    def weight(self, mono: Monomial, weights: Mapping[str, int]) -> int:
        return sum(weights[v] * e for v, e in mono)

    def truncate(self, max_weight: int, weights: Mapping[str, int]) -> "Poly":
        return Poly({m: c for m, c in self.terms.items() if self.weight(m, weights) <= max_weight})

    def homogeneous_part(self, w: int, weights: Mapping[str, int]) -> "Poly":
        return Poly({m: c for m, c in self.terms.items() if self.weight(m, weights) == w})

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = to_q(other)
            return Poly({m: x * c for m, x in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / to_q(other))

    def __pow__(self, e: int):
        out = Poly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def evaluate(self, values: Mapping[str, object], one=None):
        """Substitute ``values`` for the variables.

        Values may be rationals or ring elements; ``one`` is the unit used
        for the constant term when evaluating into a ring.
        """
        total = None
        for mono, c in sorted(self.terms.items()):
            term = one if one is not None else Fraction(1)
            for v, e in mono:
                x = values[v]
                if not isinstance(x, (int, Fraction)):
                    term = term * (x ** e)
                else:
                    term = term * to_q(x) ** e
            term = term * c
            total = term if total is None else total + term
        if total is None:
            return (one * 0) if one is not None else Fraction(0)
        return total

    def linear_coefficients(self) -> dict[str, Fraction]:
        """Coefficients of a polynomial of degree <= 1 (constant under key "")."""
        out = {}
        for mono, c in self.terms.items():
            if not mono:
                out[""] = c
            elif len(mono) == 1 and mono[0][1] == 1:
                out[mono[0][0]] = c
            else:
                raise ValueError(f"not linear: {self}")
        return out

    def univariate_coefficients(self, var: str) -> list[Fraction]:
        """Coefficient list (ascending) of a polynomial in the single variable ``var``."""
        deg = 0
        for mono in self.terms:
            for v, e in mono:
                if v != var:
                    raise ValueError(f"{self} involves {v}, not only {var}")
                deg = max(deg, e)
        out = [Fraction(0)] * (deg + 1)
        for mono, c in self.terms.items():
            out[dict(mono).get(var, 0)] += c
        return out

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda t: (-sum(e for _, e in t[0]), t[0])):
            label = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not label:
                parts.append(q_str(c))
            elif c == 1:
                parts.append(label)
            elif c == -1:
                parts.append("-" + label)
            else:
                parts.append(f"{q_str(c)}*{label}")
        return " + ".join(parts).replace("+ -", "- ")


def chern_variables(n: int, prefix: str = "c") -> tuple[list[Poly], dict[str, int]]:
    """Formal classes ``[1, c1, ..., cn]`` and their weights."""
    elems = [Poly.const(1)] + [Poly.var(f"{prefix}{i}") for i in range(1, n + 1)]
    return elems, {f"{prefix}{i}": i for i in range(1, n + 1)}


def power_sums_from_elementary(e: Sequence, n: int, zero) -> list:
    """Newton: power sums P_1..P_n from ``e = [e_0 = 1, e_1, ..., e_m]``.

    Entries past the end of ``e`` are treated as zero. Returns ``[P_0 slot
    unused (zero), P_1, ..., P_n]``.
    """
    def el(k):
        return e[k] if k < len(e) else zero

    P = [zero]
    for k in range(1, n + 1):
        s = el(k) * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            s = s + el(k - i) * P[i] * ((-1) ** (k - 1 + i))
        P.append(s)
    return P


def elementary_from_power_sums(P: Sequence, n: int, one) -> list:
    """Newton: ``[1, e_1, ..., e_n]`` from ``P = [unused, P_1, ..., P_n]``."""
    e = [one]
    for k in range(1, n + 1):
        s = None
        for i in range(1, k + 1):
            term = e[k - i] * P[i] * ((-1) ** (i - 1))
            s = term if s is None else s + term
        e.append(s * Fraction(1, k))
    return e


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m with B_1 = -1/2."""
    if m == 0:
        return Fraction(1)
    return -sum((comb(m + 1, j) * bernoulli(j) for j in range(m)), Fraction(0)) / (m + 1)


def series_log(q: Sequence[Fraction], n: int) -> list[Fraction]:
    """Coefficients a_1..a_n (index 0 unused) of log of a power series with q_0 = 1."""
    q = [to_q(x) for x in q] + [Fraction(0)] * (n + 1)
    if q[0] != 1:
        raise ValueError("series must start with 1")
    a = [Fraction(0)] * (n + 1)
    for k in range(1, n + 1):
        s = k * q[k] - sum((j * a[j] * q[k - j] for j in range(1, k)), Fraction(0))
        a[k] = s / k
    return a


def todd_series(n: int) -> list[Fraction]:
    """Coefficients of x/(1 - e^(-x)) up to x^n."""
    return [(-1) ** k * bernoulli(k) / factorial(k) for k in range(n + 1)]


def l_series(n: int) -> list[Fraction]:
    """Coefficients of sqrt(z)/tanh(sqrt(z)) up to z^n."""
    return [Fraction(2 ** (2 * k)) * bernoulli(2 * k) / factorial(2 * k) for k in range(n + 1)]


def multiplicative_sequence(series: Sequence[Fraction], n: int, prefix: str = "c") -> list[Poly]:
    """Genus polynomials ``[1, K_1, ..., K_n]`` of the characteristic series ``series``.

    K_k is the weight-k part of exp(sum_j a_j P_j) where a = log(series) and
    P_j are the power sums of the formal roots written in ``prefix`` classes.
    """
    elems, weights = chern_variables(n, prefix)
    P = power_sums_from_elementary(elems, n, Poly())
    a = series_log(series, n)
    exponent = Poly()
    for j in range(1, n + 1):
        exponent = exponent + P[j] * a[j]
    total = Poly.const(1)
    term = Poly.const(1)
    for j in range(1, n + 1):
        term = (term * exponent).truncate(n, weights) * Fraction(1, j)
        total = total + term
    return [total.homogeneous_part(k, weights) for k in range(n + 1)]


def interpolate(points: Sequence[tuple[int, Fraction]]) -> list[Fraction]:
    """Exact Lagrange interpolation; returns ascending coefficients."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k, b in enumerate(basis):
            coeffs[k] += to_q(yi) * b / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def eval_univariate(coeffs: Sequence[Fraction], x) -> Fraction:
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def cauchy_bound(coeffs: Sequence[Fraction]) -> int:
    """Integer bound B with every real root of the polynomial in [-B, B]."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return 0
    lead = abs(coeffs[-1])
    m = max(abs(c) / lead for c in coeffs[:-1])
    return int(m) + 2


def integer_roots(coeffs: Sequence[Fraction], predicate: Callable[[int], bool] = lambda x: True) -> tuple[list[int], int]:
    """All integer roots (exhaustive search inside the Cauchy bound) and the bound used."""
    if all(c == 0 for c in coeffs):
        raise ValueError("zero polynomial has every integer as a root")
    b = cauchy_bound(coeffs)
    return [x for x in range(-b, b + 1) if predicate(x) and eval_univariate(coeffs, x) == 0], b


def rational_roots_quadratic(a, b, c) -> list[Fraction]:
    """Rational roots of a x^2 + b x + c (a != 0), ascending, without duplicates."""
    from math import isqrt

    a, b, c = to_q(a), to_q(b), to_q(c)
    if a == 0:
        raise ValueError("not a quadratic")
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    num, den = disc.numerator, disc.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return []
    root = Fraction(rn, rd)
    return sorted({(-b - root) / (2 * a), (-b + root) / (2 * a)})


def tensor_elementary(ea: Sequence, ra: int, eb: Sequence, rb: int, n: int, one, zero) -> list:
    """Chern classes ``[1, c_1, ..., c_n]`` of a tensor product of bundles.

    Uses ch(A (x) B) = ch(A) ch(B) on power sums, P_k(A (x) B) =
    sum_m C(k, m) P_m(A) P_(k-m)(B) with P_0 = rank, and converts back with
    the Newton identities.
    """
    Pa = power_sums_from_elementary(ea, n, zero)
    Pb = power_sums_from_elementary(eb, n, zero)
    Pa[0] = one * ra
    Pb[0] = one * rb
    P = [zero]
    for k in range(1, n + 1):
        s = zero
        for m in range(k + 1):
            s = s + Pa[m] * Pb[k - m] * comb(k, m)
        P.append(s)
    e = elementary_from_power_sums(P, n, one)
    top = ra * rb
    return [x if i <= top else zero for i, x in enumerate(e)]
