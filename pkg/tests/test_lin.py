import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtlogic import lin
from qtlogic.errors import ResourceError
from qtlogic.lin import LinConstraint, LinSystem, constraints, feasible, negate, normalize

from oracles import grid_feasible, random_system, vertex_feasible


def system(rows, n=None):
    return LinSystem([LinConstraint(dict(enumerate(c)), s, b) for c, s, b in rows], n)


def test_simple_feasible():
    sys_ = LinSystem(constraints({0: 1}, ">=", F(1, 2)) + constraints({0: 1}, "<=", 1))
    x = feasible(sys_)
    assert F(1, 2) <= x[0] <= 1


def test_strict_gap():
    # x > 0 and x < 1/100
    sys_ = LinSystem(constraints({0: 1}, ">", 0) + constraints({0: 100}, "<", 1))
    x = feasible(sys_)
    assert 0 < x[0] < F(1, 100)


def test_empty_open_interval():
    sys_ = LinSystem(constraints({0: 1}, ">", 1) + constraints({0: 1}, "<=", 1))
    assert feasible(sys_) is None


def test_equalities_are_substituted():
    stats = lin.SolveStats()
    rows = constraints({0: 1, 1: 1}, "=", 1) + constraints({0: 1, 1: -1}, "=", F(1, 3))
    x = feasible(LinSystem(rows), stats)
    assert x == {0: F(2, 3), 1: F(1, 3)}
    assert stats.substitutions >= 1


def test_witness_covers_all_variables():
    x = feasible(LinSystem(constraints({2: 1}, ">=", 5), num_vars=4))
    assert set(x) == {0, 1, 2, 3}
    assert x[2] == 5


def test_simplest_values_are_chosen():
    # the point picked inside (1/3, 1/2) has the least denominator
    sys_ = LinSystem(constraints({0: 3}, ">", 1) + constraints({0: 2}, "<", 1))
    assert feasible(sys_)[0] == F(2, 5)


def test_empty_system_and_constants():
    assert feasible(LinSystem([], 2)) == {0: 0, 1: 0}
    assert feasible(LinSystem([LinConstraint({}, False, 1)])) is None
    assert feasible(LinSystem([LinConstraint({}, True, -1)])) == {}


def test_constraint_helpers():
    c = LinConstraint({0: F(1, 2), 1: F(1, 3)}, False, 1)
    n = normalize(c)
    assert n.coeffs == ((0, 3), (1, 2)) and n.bound == 6
    point = {0: F(1), 1: F(3, 2)}
    assert c.holds(point) != negate(c).holds(point)
    assert str(LinConstraint({0: 2, 1: -1}, True, 3)) == "2*x0 + -1*x1 > 3"
    with pytest.raises(ValueError):
        constraints({0: 1}, "~", 0)
    with pytest.raises(ValueError):
        LinSystem(constraints({3: 1}, ">=", 0), num_vars=2)


def test_row_cap():
    rng = random.Random(0)
    rows = []
    for _ in range(40):
        coeffs = {v: rng.choice([-1, 1]) for v in range(8)}
        rows.append(LinConstraint(coeffs, False, -3))
    with pytest.raises(ResourceError):
        feasible(LinSystem(rows), max_rows=50)


@given(st.integers(0, 10**6))
def test_agrees_with_oracle(seed):
    n, rows = random_system(random.Random(seed))
    x = feasible(system(rows, n))
    ref = grid_feasible(n, rows) or vertex_feasible(n, rows)
    assert (x is None) == (ref is None)
    if x is not None:
        assert system(rows, n).holds(x)


def test_vertex_oracle_on_thin_region():
    # 3x > 1 and 2x < 1: no grid point with denominator 6 lies strictly inside
    rows = [((3,), True, 1), ((-2,), True, -1)]
    assert grid_feasible(1, rows) is None
    assert vertex_feasible(1, rows) is not None
