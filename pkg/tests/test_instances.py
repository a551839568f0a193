import itertools
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from csplab import predicates as P
from csplab import instances as I


def brute_value(J):
    best = Fraction(-1)
    for a in itertools.product([-1, 1], repeat=J.n):
        sat = sum(J.predicate([s * a[v] for v, s in zip(J.vars[c], J.signs[c])])
                  for c in range(J.m))
        best = max(best, Fraction(sat, J.m))
    return best


def test_constraint_validation():
    with pytest.raises(ValueError):
        I.Constraint((0, 0, 1), (1, 1, 1))
    with pytest.raises(ValueError):
        I.Constraint((0, 1), (1, 2))
    with pytest.raises(ValueError):
        I.Instance(2, P.sat(3), [[0, 1, 2]], [[1, 1, 1]])


def test_trivial_values():
    S = P.sat(3)
    J = I.Instance(3, S, [[0, 1, 2]], [[1, 1, 1]])
    assert I.eval_value(J, [1, 1, 1]) == 1
    pats = list(itertools.product([-1, 1], repeat=3))
    J8 = I.Instance(3, S, [[0, 1, 2]] * 8, pats)
    for a in pats:
        assert I.eval_value(J8, a) == Fraction(7, 8)
    X = I.Instance(2, P.parity(2), [[0, 1], [0, 1]], [[1, 1], [1, -1]])
    for a in itertools.product([-1, 1], repeat=2):
        assert I.eval_value(X, a) == Fraction(1, 2)
    assert I.exact_value(X)[0] == Fraction(1, 2)


def test_random_instance_uniform_over_48_constraints():
    rng = np.random.default_rng(7)
    J = I.random_instance(P.sat(3), 3, 100000, rng)
    perm_idx = {p: i for i, p in enumerate(itertools.permutations(range(3)))}
    codes = np.array([perm_idx[tuple(v)] for v in J.vars.tolist()]) * 8 \
        + ((J.signs > 0).astype(int) * [1, 2, 4]).sum(axis=1)
    obs = np.bincount(codes, minlength=48)
    stat, p = chisquare(obs)
    # 4 sigma for a chi-square with 47 degrees of freedom
    assert stat <= 47 + 4 * np.sqrt(2 * 47)


def test_random_instance_edge_cases():
    rng = np.random.default_rng(0)
    J = I.random_instance(P.sat(3), 5, 0, rng)
    assert J.m == 0
    assert I.eval_value(J, [1] * 5) == 1
    assert I.exact_value(J)[0] == 1
    with pytest.raises(ValueError):
        I.random_instance(P.sat(3), 2, 4, rng)
    A = I.random_instance(P.maj(3), 9, 20, np.random.default_rng(3))
    B = I.random_instance(P.maj(3), 9, 20, np.random.default_rng(3))
    assert A == B


@given(st.integers(0, 10_000), st.sampled_from(["sat:3", "maj:3", "parity:3", "t:4,2"]))
def test_planted_has_value_one(seed, spec):
    rng = np.random.default_rng(seed)
    Q = P.parse_spec(spec)
    a = rng.choice([-1, 1], size=8)
    J = I.planted_instance(Q, 8, 30, a, rng)
    assert I.eval_value(J, a) == 1
    assert I.exact_value(J)[0] == 1


def test_planted_errors():
    rng = np.random.default_rng(0)
    zero = P.Predicate(3, [0] * 8)
    with pytest.raises(ValueError):
        I.planted_instance(zero, 5, 3, [1] * 5, rng)
    nearly = P.Predicate(3, [0] * 7 + [1])
    J = I.planted_instance(nearly, 5, 0, [1] * 5, rng)
    assert J.m == 0
    with pytest.raises(I.PlantingStalled):
        I.planted_instance(nearly, 5, 50, [1] * 5, rng, budget=10)


def test_huang4_acceptance_rate_matches_lval():
    rng = np.random.default_rng(11)
    H = P.huang(4)
    a = rng.choice([-1, 1], size=12)
    T = 100000
    rate = I.planted_acceptance_rate(H, 12, a, T, rng)
    lv = float(P.lval(H))
    sigma = np.sqrt(max(lv * (1 - lv), 1e-12) / T)
    assert abs(rate - lv) <= 4 * sigma + 1e-12


def test_acceptance_rate_nonconstant():
    rng = np.random.default_rng(12)
    a = rng.choice([-1, 1], size=10)
    T = 100000
    rate = I.planted_acceptance_rate(P.sat(3), 10, a, T, rng)
    assert abs(rate - 7 / 8) <= 4 * np.sqrt(7 / 64 / T)


def test_constant_predicate_warns():
    with pytest.warns(I.DegeneratePredicateWarning):
        I.Instance(8, P.huang(4), [list(range(8))], [[1] * 8])


def test_exact_value_regression_sat3():
    J = I.random_instance(P.sat(3), 10, 200, np.random.default_rng(1))
    val, w = I.exact_value(J)
    assert val == Fraction(191, 200)
    assert I.eval_value(J, w) == val
    assert val <= 1


def test_exact_value_witness_is_lex_smallest():
    rng = np.random.default_rng(5)
    for _ in range(5):
        J = I.random_instance(P.maj(3), 7, 15, rng)
        val, w = I.exact_value(J)
        best = [a for a in itertools.product([-1, 1], repeat=7) if I.eval_value(J, a) == val]
        assert tuple(w.tolist()) == min(best)


def test_exact_value_too_large():
    J = I.random_instance(P.sat(3), 30, 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        I.exact_value(J)


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.sampled_from(["sat:3", "maj:3", "parity:3", "t:4,2", "and:2"]))
def test_exact_value_properties(seed, spec):
    rng = np.random.default_rng(seed)
    Q = P.parse_spec(spec)
    n = int(rng.integers(Q.arity, 9))
    J = I.random_instance(Q, n, int(rng.integers(1, 12)), rng)
    val, _ = I.exact_value(J)
    assert val == brute_value(J)
    assert val >= P.lval(Q)
    assert I.estimate_value(J, 3, rng) <= val


def test_exact_value_with_core_agrees():
    J = I.random_instance(P.sat(3), 10, 200, np.random.default_rng(1))
    assert I.exact_value(J, core=range(10))[0] == I.exact_value(J)[0]
    J2 = I.random_instance(P.maj(3), 12, 20, np.random.default_rng(2))
    assert I.exact_value(J2, core=range(6))[0] == I.exact_value(J2)[0]


def test_estimate_value_restarts_zero_is_all_true():
    J = I.random_instance(P.sat(3), 12, 40, np.random.default_rng(3))
    assert I.estimate_value(J, 0, np.random.default_rng(0)) == I.eval_value(J, [1] * 12)


def test_apply_implication():
    rng = np.random.default_rng(4)
    a = rng.choice([-1, 1], size=10)
    J = I.planted_instance(P.maj(3), 10, 40, a, rng)
    K = I.apply_implication(J, P.sat(3))
    assert I.eval_value(K, a) == 1
    assert (K.vars == J.vars).all() and (K.signs == J.signs).all()
    assert I.apply_implication(J, P.maj(3)) == J
    with pytest.raises(ValueError):
        I.apply_implication(K, P.maj(3))


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_implication_never_lowers_value(seed):
    rng = np.random.default_rng(seed)
    J = I.random_instance(P.and_(3), 10, 12, rng)
    for Q in (P.maj(3), P.sat(3)):
        assert I.exact_value(I.apply_implication(J, Q))[0] >= I.exact_value(J)[0]


def test_corrupt_instance():
    rng = np.random.default_rng(6)
    J = I.random_instance(P.maj(3), 20, 100, rng)
    C = I.corrupt_instance(J, Fraction(1, 20), rng)
    assert (C.vars == J.vars).all()
    assert int((C.signs != J.signs).any(axis=1).sum()) <= 5


@given(st.integers(0, 10_000), st.sampled_from(["sat:3", "maj:5", "t:4,2"]))
def test_serialization_roundtrip(seed, spec):
    rng = np.random.default_rng(seed)
    J = I.random_instance(P.parse_spec(spec), 9, int(rng.integers(0, 15)), rng)
    assert I.loads_instance(I.dumps_instance(J)) == J
    assert I.from_dimacs(I.to_dimacs(J)) == J


def test_dimacs_needs_family():
    Q = P.Predicate(2, [0, 1, 1, 0])
    J = I.Instance(3, Q, [[0, 1]], [[1, -1]])
    with pytest.raises(ValueError):
        I.to_dimacs(J)
    assert I.loads_instance(I.dumps_instance(J)) == J


def test_dimacs_text_shape():
    J = I.Instance(4, P.sat(3), [[0, 2, 3]], [[1, -1, 1]])
    assert I.to_dimacs(J) == "p gcsp sat:3 4 1\n1 -3 4 0\n"
