from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from csplab.simplex import InfeasibleError, UnboundedError, solve_lp


def test_small_lp():
    # max x + y  s.t.  x + 2y + s1 = 4, 3x + y + s2 = 6
    res = solve_lp([1, 1, 0, 0], [[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6])
    assert res.value == Fraction(14, 5)
    assert res.x[:2] == (Fraction(8, 5), Fraction(6, 5))


def test_infeasible():
    with pytest.raises(InfeasibleError):
        solve_lp([1, 0], [[1, 1]], [-1])


def test_unbounded():
    with pytest.raises(UnboundedError):
        solve_lp([1, 0], [[1, -1]], [0])


def test_redundant_rows_dropped():
    res = solve_lp([1, 2], [[1, 1], [2, 2]], [1, 2])
    assert res.value == 2


def test_degenerate_does_not_cycle():
    # Beale's cycling example in equality form
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6, 0, 0, 0]
    A = [[Fraction(1, 4), -60, Fraction(-1, 25), 9, 1, 0, 0],
         [Fraction(1, 2), -90, Fraction(-1, 50), 3, 0, 1, 0],
         [0, 0, 1, 0, 0, 0, 1]]
    res = solve_lp(c, A, [0, 0, 1])
    assert res.value == Fraction(1, 20)


@given(st.lists(st.lists(st.integers(0, 5), min_size=4, max_size=4), min_size=1, max_size=3),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_matches_float_solver(rows, c):
    # boxed problem: add a row bounding the sum so it is never unbounded
    A = [r + [0] for r in rows] + [[1, 1, 1, 1, 1]]
    b = [sum(r) for r in rows] + [10]       # x = 1 is feasible when slack allows
    A2 = [list(r) for r in A]
    cc = c + [0]
    ref = linprog(-np.array(cc, float), A_eq=np.array(A2, float), b_eq=np.array(b, float),
                  bounds=(0, None), method="highs")
    if ref.status == 2:
        with pytest.raises(InfeasibleError):
            solve_lp(cc, A2, b)
        return
    res = solve_lp(cc, A2, b)
    assert abs(float(res.value) + ref.fun) < 1e-7
    x = np.array([float(v) for v in res.x])
    assert np.allclose(np.array(A2, float) @ x, b)
    assert (x >= 0).all()
