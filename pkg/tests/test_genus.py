from fractions import Fraction
from math import comb

import pytest

from chernlab.chern import BundleSpec, complete_intersection, line_bundle, projective_space
from chernlab.exact import ChernlabError, GradedClass
from chernlab.genus import (chern_character, hrr_chi, l_genus_signature, l_polynomials,
                            todd_polynomials)
from chernlab.poly import Poly


def g(*coeffs, trunc=4):
    return GradedClass.from_coefficients(coeffs, trunc)


def test_todd_examples():
    td = todd_polynomials(4)
    c1, c2 = Poly.var("c1"), Poly.var("c2")
    assert td[1] == c1 / 2
    assert td[2] == (c1 * c1 + c2) / 12
    cubic = {"c1": 243, "c1^2c2": 162, "c2^2": 108, "c1c3": 18, "c4": 27}
    value = (cubic["c1"] - 4 * cubic["c1^2c2"] - 3 * cubic["c2^2"] - cubic["c1c3"] + cubic["c4"]) / Fraction(-720)
    assert value == 1
    with pytest.raises(ChernlabError):
        todd_polynomials(7)
    with pytest.raises(ChernlabError):
        l_polynomials(4)


def test_chern_character_examples():
    assert chern_character(BundleSpec(1, g(1))) == g(1)
    e = BundleSpec(2, g(1, 3, 5))
    assert chern_character(e).coefficient(2) == Fraction(3 * 3 - 2 * 5, 2)
    ch = chern_character(line_bundle(g(0, 2)))
    assert [ch.coefficient(k) for k in range(5)] == [1, 2, 2, Fraction(4, 3), Fraction(2, 3)]
    with pytest.raises(ChernlabError):
        chern_character(BundleSpec(5, g(1)))


def test_hrr_examples(builtins):
    assert hrr_chi(builtins("hilb2_k3").model, 0) == 3
    p2 = projective_space(2)
    for m in range(-6, 7):
        assert hrr_chi(p2, m) == Fraction((m + 1) * (m + 2), 2)
    assert hrr_chi(complete_intersection(5, [3]), 1) == 6


def _binom(a, b):
    """Polynomial binomial coefficient, valid for negative a."""
    out = Fraction(1)
    for i in range(b):
        out *= Fraction(a - i, i + 1)
    return out


@pytest.mark.parametrize("n", range(1, 7))
def test_hrr_projective_space(n):
    pn = projective_space(n)
    for m in range(-n - 3, 5):
        assert hrr_chi(pn, m) == _binom(m + n, n)


@pytest.mark.parametrize("n", range(3, 7))
def test_hrr_quadric(n):
    q = complete_intersection(n + 1, [2])
    for m in range(-n - 2, 4):
        assert hrr_chi(q, m) == _binom(m + n + 1, n + 1) - _binom(m + n - 1, n + 1)


def test_hrr_cubic_hilbert_polynomial():
    x = complete_intersection(5, [3])
    for m in range(-6, 6):
        assert hrr_chi(x, m) == _binom(m + 5, 5) - _binom(m + 2, 5)


def test_hrr_hilbert_square_line_bundles(builtins):
    # chi(L) = C(q(L)/2 + 3, 2) with q(kh) = 2k^2
    m = builtins("hilb2_k3").model
    for k in range(-4, 5):
        assert hrr_chi(m, k) == comb(k * k + 3, 2)


def test_hrr_dimension_cap():
    with pytest.raises(ChernlabError):
        hrr_chi(projective_space(7), 0)


def test_l_genus_examples(builtins):
    assert l_genus_signature(builtins("k3").model) == -16
    assert l_genus_signature(builtins("hilb2_k3").model) == 156
    assert l_genus_signature(complete_intersection(5, [3])) == 19
    assert l_genus_signature(projective_space(2)) == 1
    assert l_genus_signature(projective_space(4)) == 1
    with pytest.raises(ChernlabError):
        l_genus_signature(projective_space(3))
