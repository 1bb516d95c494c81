"""Todd and L genera, the Chern character, Riemann-Roch and the signature theorem."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .chern import BundleSpec, ManifoldModel, line_bundle, pontrjagin_classes
from .exact import ChernlabError, InconsistentModelError, q_str
from .poly import (Poly, l_series, multiplicative_sequence, power_sums_from_elementary,
                   todd_series)

MAX_GENUS_DIM = 6


@dataclass(frozen=True)
class GenusPolynomials:
    """``polys[k]`` is the weight-k genus polynomial in ``prefix``1..``prefix``k."""

    prefix: str
    polys: tuple[Poly, ...]

    def __getitem__(self, k: int) -> Poly:
        return self.polys[k]

    def __len__(self) -> int:
        return len(self.polys)

    def evaluate(self, classes: list, one):
        """Sum of all genus polynomials with ``classes[i]`` substituted for the i-th variable."""
        values = {f"{self.prefix}{i}": classes[i] for i in range(1, len(classes))}
        for i in range(len(classes), len(self.polys)):
            values[f"{self.prefix}{i}"] = one * 0
        total = one * 0
        for poly in self.polys:
            total = total + poly.evaluate(values, one=one)
        return total


@lru_cache(maxsize=None)
def todd_polynomials(n: int) -> GenusPolynomials:
    """Todd polynomials td_0..td_n of the series x/(1 - e^(-x))."""
    if not 0 <= n <= MAX_GENUS_DIM:
        raise ChernlabError(f"Todd polynomials are provided up to degree {MAX_GENUS_DIM}")
    return GenusPolynomials("c", tuple(multiplicative_sequence(todd_series(n), n, "c")))


@lru_cache(maxsize=None)
def l_polynomials(n: int) -> GenusPolynomials:
    """Hirzebruch L-polynomials L_0..L_n in the Pontrjagin classes p1..pn."""
    if not 0 <= n <= MAX_GENUS_DIM // 2:
        raise ChernlabError(f"L-polynomials are provided up to degree {MAX_GENUS_DIM // 2}")
    return GenusPolynomials("p", tuple(multiplicative_sequence(l_series(n), n, "p")))


def chern_character(e: BundleSpec, trunc: int | None = None):
    """ch(E) = rank + sum_k P_k / k! with P_k the Newton power sums of the Chern roots."""
    n = e.total_class.trunc if trunc is None else trunc
    if e.rank > 4:
        raise ChernlabError("Chern character is supported up to rank 4")
    one = e.total_class.like(1)
    P = power_sums_from_elementary(e.chern_list(n), n, one * 0)
    total = one * e.rank
    for k in range(1, n + 1):
        total = total + P[k] * Fraction(1, factorial(k))
    return total


@lru_cache(maxsize=256)
def todd_class(m: ManifoldModel):
    return todd_polynomials(m.dim).evaluate(m.chern_list(), m.ring.one())


def hrr_chi(m: ManifoldModel, line_multiple: int) -> Fraction:
    """chi(X, O(k h)) = integral of ch(O(k h)) td(T_X)."""
    if m.dim > MAX_GENUS_DIM:
        raise ChernlabError(f"Riemann-Roch is provided up to dimension {MAX_GENUS_DIM}")
    ch = chern_character(line_bundle(m.line_generator * line_multiple))
    value = m.integrate(ch * todd_class(m))
    if value.denominator != 1:
        raise InconsistentModelError(
            f"inconsistent model: chi(O({line_multiple}h)) = {q_str(value)} on {m.name} is not an integer")
    return value


def l_genus_signature(m: ManifoldModel) -> Fraction:
    """Signature theorem: integral of the L-genus.

    The L-genus takes the classes (-1)^i p_i, i.e. p1 = c1^2 - 2c2; the
    squared and even terms used in dimension 4 do not see the sign.
    """
    if m.dim not in (2, 4):
        raise ChernlabError("L-genus signature is provided for dimensions 2 and 4")
    k = m.dim // 2
    p = pontrjagin_classes(m)
    std = [m.ring.one()] + [p[i - 1] * ((-1) ** i) for i in range(1, k + 1)]
    L = l_polynomials(k)
    value = m.integrate(L[k].evaluate({f"p{i}": std[i] for i in range(1, k + 1)}, one=m.ring.one()))
    if value.denominator != 1:
        raise InconsistentModelError(f"inconsistent model: L-genus of {m.name} is {q_str(value)}")
    return value
