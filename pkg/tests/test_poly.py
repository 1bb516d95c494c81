import itertools
from fractions import Fraction
from math import comb

import pytest
import sympy as sp

from chernlab.poly import (Poly, bernoulli, elementary_from_power_sums, integer_roots, interpolate,
                           l_series, multiplicative_sequence, power_sums_from_elementary,
                           rational_roots_quadratic, tensor_elementary, todd_series)


def _sym(poly: Poly, subs):
    """Evaluate a Poly on sympy expressions."""
    total = sp.Integer(0)
    for mono, c in poly.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for v, e in mono:
            term *= subs[v] ** e
        total += term
    return total


def _series_oracle(expr, x, n):
    s = sp.series(expr, x, 0, n + 1).removeO()
    return [Fraction(str(s.coeff(x, k))) for k in range(n + 1)]


def test_bernoulli_against_sympy():
    assert bernoulli(1) == Fraction(-1, 2)
    for m in [0] + list(range(2, 14)):
        assert bernoulli(m) == Fraction(str(sp.bernoulli(m)))


def test_series_against_sympy():
    x = sp.symbols("x")
    assert todd_series(6) == _series_oracle(x / (1 - sp.exp(-x)), x, 6)
    z = sp.symbols("z", positive=True)
    t = sp.symbols("t", positive=True)
    oracle = _series_oracle((t / sp.tanh(t)).subs(t, sp.sqrt(z)), z, 4)
    assert l_series(4) == oracle


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_todd_polynomials_against_root_oracle(n):
    xs = sp.symbols(f"x1:{n + 1}")
    t = sp.symbols("t")
    q = sum(sp.Rational(c.numerator, c.denominator) * t ** k for k, c in enumerate(todd_series(n)))
    product = sp.expand(sp.prod([q.subs(t, xi) for xi in xs]))
    polys = multiplicative_sequence(todd_series(n), n, "c")
    elem = {f"c{k}": sum(sp.prod(c) for c in itertools.combinations(xs, k)) for k in range(1, n + 1)}
    for k in range(n + 1):
        expected = sum(term for term in sp.Add.make_args(product) if sp.Poly(term, *xs).total_degree() == k)
        assert sp.expand(_sym(polys[k], elem) - expected) == 0


def test_closed_forms():
    td = multiplicative_sequence(todd_series(4), 4, "c")
    c1, c2, c3, c4 = (Poly.var(f"c{i}") for i in range(1, 5))
    assert td[1] == c1 / 2
    assert td[2] == (c1 * c1 + c2) / 12
    assert td[3] == c1 * c2 / 24
    assert td[4] == (-c1 ** 4 + 4 * c1 ** 2 * c2 + 3 * c2 ** 2 + c1 * c3 - c4) / 720
    L = multiplicative_sequence(l_series(2), 2, "p")
    p1, p2 = Poly.var("p1"), Poly.var("p2")
    assert L[1] == p1 / 3
    assert L[2] == (7 * p2 - p1 * p1) / 45


def test_newton_round_trip():
    e = [Fraction(1), Fraction(3), Fraction(-2), Fraction(5), Fraction(7)]
    P = power_sums_from_elementary(e, 4, Fraction(0))
    back = elementary_from_power_sums(P, 4, Fraction(1))
    assert back == e


def test_power_sums_small():
    # roots 1, 2, 3: e = (6, 11, 6)
    P = power_sums_from_elementary([1, 6, 11, 6], 3, Fraction(0))
    assert P[1:] == [6, 14, 36]


def _elementary(roots, n):
    out = [Fraction(1)] + [Fraction(0)] * n
    for r in roots:
        for k in range(n, 0, -1):
            out[k] += out[k - 1] * r
    return out


@pytest.mark.parametrize("ra,rb", [((2,), (5,)), ((1, -3), (4,)), ((1, 2), (3, -1, 7)), ((2, 2, 1, -5), (1, 3))])
def test_tensor_elementary_against_roots(ra, rb):
    n = len(ra) * len(rb)
    expected = _elementary([a + b for a in ra for b in rb], n)
    got = tensor_elementary(_elementary(ra, len(ra)), len(ra), _elementary(rb, len(rb)), len(rb), n,
                            Fraction(1), Fraction(0))
    assert list(got[: n + 1]) == expected


def test_interpolate_and_roots():
    # (t+1)(t+2)/2 sampled at 0..2
    coeffs = interpolate([(t, Fraction((t + 1) * (t + 2), 2)) for t in range(3)])
    assert coeffs == [1, Fraction(3, 2), Fraction(1, 2)]
    roots, bound = integer_roots([c - (1 if k == 0 else 0) for k, c in enumerate(coeffs)])
    assert roots == [-3, 0]
    assert bound >= 3
    assert integer_roots([2, 0, 3])[0] == []
    with pytest.raises(ValueError):
        integer_roots([0, 0])


def test_interpolate_binomial():
    pts = [(t, Fraction(comb(t + 5, 5) - comb(t + 2, 5))) for t in range(6)]
    coeffs = interpolate(pts)
    from chernlab.poly import eval_univariate

    assert all(eval_univariate(coeffs, t) == comb(t + 5, 5) - comb(t + 2, 5) for t in range(6, 20))


def test_rational_roots_quadratic():
    assert rational_roots_quadratic(8, -84, 76) == [1, Fraction(19, 2)]
    assert rational_roots_quadratic(1, 0, 2) == []
    assert rational_roots_quadratic(1, 0, -2) == []
    assert rational_roots_quadratic(1, -2, 1) == [1]
