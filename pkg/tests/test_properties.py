"""Randomized and exhaustive law checks across the ring, Schubert and genus layers."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernlab.catalog import DEFAULT_BUILTINS
from chernlab.chern import chern_numbers, line_bundle
from chernlab.exact import GradedClass, invert_unit
from chernlab.genus import chern_character, hrr_chi, todd_class
from chernlab.schubert import (SchubertClass, complement, lr_multiply, partitions_in_box, pieri_multiply,
                               schubert_integrate)

pytestmark = pytest.mark.criterion("property suites")

CATALOG = list(DEFAULT_BUILTINS) + ["pn(2)", "pn(3)", "quadric(3)", "quadric(5)", "quadric(6)"]

rationals = st.integers(-120, 120).map(lambda k: Fraction(k, 12))


@st.composite
def graded(draw, trunc):
    return GradedClass.from_coefficients(draw(st.lists(rationals, min_size=trunc + 1, max_size=trunc + 1)))


@st.composite
def triples(draw):
    n = draw(st.integers(0, 6))
    return n, draw(graded(n)), draw(graded(n)), draw(graded(n))


@settings(max_examples=200, deadline=None)
@given(triples())
def test_ring_laws(t):
    _, a, b, c = t
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (b - a) == b
    assert a * a.like(1) == a


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 6).flatmap(lambda n: graded(n)))
def test_inverse_round_trip(a):
    unit = a - a.like(a.constant()) + a.like(1)
    inv = invert_unit(unit)
    assert unit * inv == unit.like(1)
    assert invert_unit(inv) == unit


@settings(max_examples=200, deadline=None)
@given(triples(), st.integers(0, 6))
def test_truncation_commutes_with_product(t, m):
    n, a, b, _ = t
    m = min(m, n)
    assert (a * b).truncate(m) == a.truncate(m) * b.truncate(m)


G25 = (2, 5)
LOW_CODIM = [p for d in range(4) for p in partitions_in_box(2, 5, d)]


def via_pieri(lam, mu):
    """sigma_lam * sigma_mu with sigma_(a,b) = sigma_a sigma_b - sigma_(a+1) sigma_(b-1) (two-row Giambelli)."""
    x = SchubertClass.sigma(lam, G25)
    a = mu[0] if mu else 0
    b = mu[1] if len(mu) > 1 else 0
    out = pieri_multiply(pieri_multiply(x, a), b)
    if b and a + 1 <= 3:
        out = out - pieri_multiply(pieri_multiply(x, a + 1), b - 1)
    return out


@pytest.mark.parametrize("lam", LOW_CODIM)
@pytest.mark.parametrize("mu", LOW_CODIM)
def test_pieri_agrees_with_lr(lam, mu):
    assert lr_multiply(SchubertClass.sigma(lam, G25), SchubertClass.sigma(mu, G25)) == via_pieri(lam, mu)


@pytest.mark.parametrize("k,n", [(2, 4), (2, 5), (3, 6), (2, 6)])
def test_duality_pairing(k, n):
    top = k * (n - k)
    for lam in (p for d in range(top + 1) for p in partitions_in_box(k, n, d)):
        for mu in partitions_in_box(k, n, top - sum(lam)):
            val = schubert_integrate(SchubertClass.sigma(lam, (k, n)) * SchubertClass.sigma(mu, (k, n)))
            assert val == (1 if mu == complement(lam, k, n) else 0)


def chi_of_class(m, line_class):
    return m.integrate(chern_character(line_bundle(line_class)) * todd_class(m))


@pytest.mark.parametrize("name", CATALOG)
def test_serre_duality(name, builtins):
    m = builtins(name).model
    canonical = -m.chern(1)
    h = m.line_generator
    sign = (-1) ** m.dim
    for k in range(-10, 11):
        chi = hrr_chi(m, k)
        assert chi == chi_of_class(m, h * k)
        assert chi == sign * chi_of_class(m, canonical - h * k)


@pytest.mark.parametrize("name", CATALOG)
def test_integrality(name, builtins):
    m = builtins(name).model
    for k in range(-10, 11):
        assert hrr_chi(m, k).denominator == 1
    assert all(isinstance(v, Fraction) and v.denominator == 1 for v in chern_numbers(m).as_dict().values())
