import itertools
from fractions import Fraction

import pytest

from chernlab.exact import (GradedClass, LinearSystem, NonIntegralError, NonUnitError, TruncationError,
                            integrate, invert_unit, multiply, q_str, reduce_mod2, solve_linear, to_q)
from chernlab.rings import UnivariateRing


def g(*coeffs, trunc=4):
    return GradedClass.from_coefficients(coeffs, trunc)


def test_to_q_rejects_floats():
    with pytest.raises(TypeError):
        to_q(0.5)
    assert to_q("3/6") == Fraction(1, 2)
    assert q_str(Fraction(-6, 4)) == "-3/2"
    assert q_str(Fraction(4, 2)) == "2"


def test_multiply_examples():
    assert multiply(g(1, 1), g(1, -1)) == g(1, 0, -1)
    assert multiply(g(1, 1) ** 6, g(1, -3, 9, -27, 81)) == g(1, 3, 6, 2, 9)
    assert multiply(g(0), g(1, 5, 7)).is_zero()


def test_multiply_truncation_mismatch():
    with pytest.raises(TruncationError):
        multiply(g(1, 1, trunc=3), g(1, 1, trunc=4))


def test_invert_examples():
    assert invert_unit(g(1, 3)) == g(1, -3, 9, -27, 81)
    assert invert_unit(g(1)) == g(1)
    a = g(1, 2, -1, 5, 3)
    assert a * invert_unit(a) == g(1)


def test_invert_non_unit():
    with pytest.raises(NonUnitError, match="non-unit total class"):
        invert_unit(g(2, 1))


def test_integrate_examples():
    cubic = UnivariateRing(4, 3)
    assert integrate(g(0, 0, 0, 0, 9), cubic) == 27
    assert integrate(g(0, 0, 0, 0, 1), cubic) == 3
    assert integrate(g(1, 2, 3), cubic) == 0
    with pytest.raises(TruncationError):
        integrate(g(1, 1, trunc=2), cubic)


def test_reduce_mod2_examples():
    assert str(reduce_mod2(g(0, 3))) == "h"
    assert reduce_mod2(g(0, 4, 6)).is_zero()
    assert str(reduce_mod2(g(1, 3, 6, 2, 9))) == "1 + h + h^4"
    with pytest.raises(NonIntegralError):
        reduce_mod2(g(0, Fraction(1, 2)))


def test_graded_class_display():
    assert str(g(1, 3, 6, 2, 9)) == "1 + 3h + 6h^2 + 2h^3 + 9h^4"
    assert str(g(0)) == "0"


def test_solve_unique():
    sol = solve_linear(LinearSystem.from_equations(["x", "y"], [({"x": 1, "y": 1}, 2), ({"x": 1, "y": -1}, 0)]))
    assert sol.status == "unique"
    assert sol.values == {"x": 1, "y": 1}


def test_solve_inconsistent():
    sol = solve_linear(LinearSystem.from_equations(["x"], [({"x": 1}, 1), ({"x": 1}, 2)]))
    assert sol.status == "inconsistent"
    assert not sol.satisfied_by({"x": 1})


def test_solve_parametric_with_targets():
    sys = LinearSystem.from_equations(["x", "y", "z"], [({"x": 1, "z": 2}, 3), ({"y": 1, "z": -1}, 0)])
    sol = solve_linear(sys, targets=["z"])
    assert sol.status == "parametric"
    assert sol.free == ("z",)
    assert sol.pivots["x"].evaluate({"z": 1}) == 1
    assert sol.relations == ()


def test_solve_relation_among_targets(builtins):
    from chernlab.deduce import hk_linear_system

    sol = solve_linear(hk_linear_system(builtins("hilb2_k3")), targets=["c1^4", "c1^2c2"])
    assert [r.as_dict() for r in sol.relations] == [{"c1^4": 1, "c1^2c2": -4}]
    assert sol.relations[0].constant == 0


def test_linear_system_width_check():
    with pytest.raises(ValueError):
        LinearSystem(("x", "y"), (((1,), 0),))


def _brute_force(system, box):
    """All integer points in box^k satisfying every row."""
    out = []
    for point in itertools.product(box, repeat=len(system.variables)):
        if all(sum(c * x for c, x in zip(row, point)) == const for row, const in system.rows):
            out.append(dict(zip(system.variables, point)))
    return out


@pytest.mark.parametrize("seed", range(25))
def test_solve_against_brute_force(seed):
    import random

    rng = random.Random(seed)
    k = rng.randint(1, 4)
    names = [f"v{i}" for i in range(k)]
    truth = [rng.randint(-2, 2) for _ in names]
    rows = []
    for _ in range(rng.randint(1, 4)):
        coeffs = [rng.randint(-2, 2) for _ in names]
        rows.append((tuple(coeffs), sum(c * x for c, x in zip(coeffs, truth))))
    system = LinearSystem(tuple(names), tuple(rows))
    sol = solve_linear(system)
    points = _brute_force(system, range(-2, 3))
    assert sol.status != "inconsistent"
    assert all(sol.satisfied_by(p) for p in points)
    if sol.status == "unique":
        assert points == [sol.values]
