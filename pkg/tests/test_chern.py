from fractions import Fraction

import pytest
import sympy as sp

from chernlab.chern import (BundleSpec, ManifoldModel, chern_numbers, complete_intersection, direct_sum,
                            dual_bundle_class, grassmannian_complete_intersection, line_bundle,
                            pontrjagin_classes, pontrjagin_classes_of_bundle, pontrjagin_numbers,
                            projective_space, stiefel_whitney_classes, sw_numbers, tensor_product_class)
from chernlab.exact import ChernlabError, GradedClass, InconsistentModelError
from chernlab.rings import UnivariateRing


def g(*coeffs, trunc=4):
    return GradedClass.from_coefficients(coeffs, trunc)


def _adjunction_oracle(n, degrees, dim):
    """Coefficients of (1+h)^(n+1) / prod(1 + d h) from a sympy series."""
    h = sp.symbols("h")
    expr = (1 + h) ** (n + 1) / sp.prod([1 + d * h for d in degrees])
    s = sp.series(expr, h, 0, dim + 1).removeO()
    return [Fraction(str(s.coeff(h, k))) for k in range(dim + 1)]


def test_dual_examples():
    assert dual_bundle_class(BundleSpec(1, g(1, 3))).total_class == g(1, -3)
    e = BundleSpec(2, g(1, 2, 5))
    assert dual_bundle_class(e).total_class == g(1, -2, 5)
    assert dual_bundle_class(dual_bundle_class(e)) == e


def test_tensor_examples():
    a, b = line_bundle(g(0, 2)), line_bundle(g(0, -5))
    assert tensor_product_class(a, b).total_class == g(1, -3)
    # rank 2 with roots 1, 3 (c1 = 4, c2 = 3) twisted by l = 2: (1 + 3h)(1 + 5h)
    e = BundleSpec(2, g(1, 4, 3))
    assert tensor_product_class(e, line_bundle(g(0, 2))).total_class == g(1, 4 + 4, 3 + 8 + 4)
    assert tensor_product_class(e, line_bundle(g(0))).total_class == e.total_class
    with pytest.raises(ChernlabError):
        tensor_product_class(BundleSpec(5, g(1)), e)


def test_tensor_against_sympy_roots():
    h = sp.symbols("h")
    ra, rb = (1, -2, 3), (2, 5)
    prod = sp.expand(sp.prod([1 + (x + y) * h for x in ra for y in rb]))
    expected = [Fraction(str(prod.coeff(h, k))) for k in range(5)]
    ca = sp.expand(sp.prod([1 + x * h for x in ra]))
    cb = sp.expand(sp.prod([1 + y * h for y in rb]))
    a = BundleSpec(3, g(*[int(ca.coeff(h, k)) for k in range(5)]))
    b = BundleSpec(2, g(*[int(cb.coeff(h, k)) for k in range(5)]))
    assert tensor_product_class(a, b).total_class == g(*expected)


def test_whitney_and_pontrjagin_dual():
    a, b = BundleSpec(2, g(1, 1, -3)), BundleSpec(3, g(1, 2, 0, 7))
    s = direct_sum(a, b)
    assert s.total_class == a.total_class * b.total_class
    assert pontrjagin_classes_of_bundle(s) == pontrjagin_classes_of_bundle(dual_bundle_class(s))


def test_cubic_adjunction():
    x = complete_intersection(5, [3])
    assert x.tangent_total == g(1, 3, 6, 2, 9)
    assert x.integrate(x.line_generator ** 4) == 3
    assert x.index == 3 and "fano" in x.tags
    assert list(x.tangent_total.coefficients) == _adjunction_oracle(5, [3], 4)


def test_quadric_and_quintic():
    q = complete_intersection(5, [2])
    assert q.euler_number() == 6
    assert list(q.tangent_total.coefficients) == _adjunction_oracle(5, [2], 4)
    quintic = complete_intersection(4, [5])
    assert quintic.chern(1).is_zero()
    assert quintic.euler_number() == -200
    assert "K_trivial" in quintic.tags


@pytest.mark.parametrize("n,degrees", [(6, [2, 2]), (7, [2, 3]), (3, [4]), (6, [4])])
def test_adjunction_against_series(n, degrees):
    x = complete_intersection(n, degrees)
    assert list(x.tangent_total.coefficients) == _adjunction_oracle(n, degrees, x.dim)


def test_complete_intersection_errors():
    with pytest.raises(ChernlabError):
        complete_intersection(2, [2, 2])
    with pytest.raises(ChernlabError):
        complete_intersection(4, [])


def test_grassmannian_sections():
    dp5 = grassmannian_complete_intersection(2, 5, 2)
    assert dp5.integrate(dp5.line_generator ** 4) == 5
    assert dp5.euler_number() == 6
    assert dp5.index == 3
    g25 = grassmannian_complete_intersection(2, 5, 0)
    assert g25.euler_number() == 10
    with pytest.raises(ChernlabError):
        grassmannian_complete_intersection(2, 5, 6)


def test_pontrjagin_examples():
    x = complete_intersection(5, [3])
    p = pontrjagin_classes(x)
    assert p[0] == g(0, 0, 3)
    assert x.integrate(p[1]) == 126
    k3_like = complete_intersection(3, [4])
    assert pontrjagin_classes(k3_like)[0] == k3_like.chern(2) * 2


def test_pontrjagin_dimension_cap():
    with pytest.raises(ChernlabError):
        pontrjagin_classes(projective_space(7))


def test_stiefel_whitney_examples():
    x = complete_intersection(5, [3])
    assert str(stiefel_whitney_classes(x)[1]) == "h"
    assert stiefel_whitney_classes(complete_intersection(4, [5]))[1].is_zero()
    assert stiefel_whitney_classes(complete_intersection(5, [2]))[1].is_zero()


def test_chern_numbers_cubic(builtins):
    cn = chern_numbers(complete_intersection(5, [3]))
    assert [cn[k] for k in ("c1^4", "c1^2c2", "c2^2", "c1c3", "c4")] == [243, 162, 108, 18, 27]
    hk = chern_numbers(builtins("hilb2_k3").model)
    assert hk["c2^2"] == 828 and hk["c4"] == 324
    assert hk["c1^4"] == hk["c1^2c2"] == hk["c1c3"] == 0


def test_chern_numbers_inconsistent():
    ring = UnivariateRing(2, Fraction(1, 3))
    h = ring.generator()
    m = ManifoldModel("fake", 2, ring, ring.one() + h + h * h * 3)
    with pytest.raises(InconsistentModelError, match="inconsistent model"):
        chern_numbers(m)


def test_pontrjagin_numbers(builtins):
    x = complete_intersection(5, [3])
    p = pontrjagin_numbers(x)
    assert p[(1, 1)] == 27 and p[(2,)] == 126
    assert pontrjagin_numbers(builtins("hilb2_k3").model)[(2,)] == 1476
    with pytest.raises(ChernlabError):
        pontrjagin_numbers(complete_intersection(4, [5]))


def test_sw_numbers(builtins):
    sw = sw_numbers(complete_intersection(5, [3]))
    assert sw[(1, 1, 1, 1)] == 1 and sw[(4,)] == 1
    hk = sw_numbers(builtins("hilb2_k3").model)
    assert all(v == 0 for lam, v in hk.items() if 1 in lam)


def test_model_validation():
    ring = UnivariateRing(2, 1)
    h = ring.generator()
    with pytest.raises(InconsistentModelError):
        ManifoldModel("p2", 2, ring, ring.one() + h * 3 + h * h * 3, index=2)
    with pytest.raises(ChernlabError):
        ManifoldModel("p2", 2, ring, ring.one() + h * 3 + h * h * 3, tags={"bogus"})
