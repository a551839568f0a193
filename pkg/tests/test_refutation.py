import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csplab import instances as I
from csplab import predicates as P
from csplab import refutation as F


def parity_pair():
    return I.Instance(2, P.parity(2), [[0, 1], [0, 1]], [[1, 1], [1, -1]])


# -- axioms -----------------------------------------------------------------

def test_make_clause():
    assert F.make_clause([3, -1, 3]) == (-1, 3)
    with pytest.raises(ValueError):
        F.make_clause([1, -1])
    with pytest.raises(ValueError):
        F.make_clause([0])


def test_axiom_counts():
    assert F.constraint_axioms(P.sat(3), [0, 1, 2], [1, -1, 1]) == [(1, -2, 3)]
    assert len(F.constraint_axioms(P.parity(3), [0, 1, 2], [1, 1, 1])) == 4


@settings(max_examples=30)
@given(st.integers(1, 5).flatmap(lambda K: st.tuples(
    st.just(K), st.lists(st.booleans(), min_size=1 << K, max_size=1 << K),
    st.lists(st.sampled_from([-1, 1]), min_size=K, max_size=K))))
def test_axioms_sound_and_complete(arg):
    K, bits, signs = arg
    Q = P.Predicate(K, bits)
    vars_ = list(range(K))[::-1]
    ax = F.constraint_axioms(Q, vars_, signs)
    assert len(ax) == (1 << K) - sum(bits)
    assert all(len(c) == K for c in ax)
    for a in itertools.product([-1, 1], repeat=K):
        sat = Q([s * a[v] for v, s in zip(vars_, signs)])
        assert all(F.clause_satisfied(c, a) for c in ax) == bool(sat)


# -- traces -----------------------------------------------------------------

def unit_pair():
    # {x1}, {not x1} as SAT_1 constraints
    return I.Instance(1, P.sat(1), [[0], [0]], [[1], [-1]])


def test_two_step_refutation():
    J = unit_pair()
    tr = F.ResolutionTrace()
    tr.add((1,), "AXIOM", (0,))
    tr.add((-1,), "AXIOM", (1,))
    tr.add((), "RES", (0, 1, 1))
    assert F.check_trace(J, tr).ok
    assert F.ResolutionTrace.loads(tr.dumps()) == tr
    assert tr.dumps() == "1 : 1 | AXIOM 1\n2 : -1 | AXIOM 2\n3 :  | RES 1 2 1\n"


def test_check_trace_rejections():
    J = unit_pair()
    bad_pivot = F.ResolutionTrace()
    bad_pivot.add((1,), "AXIOM", (0,))
    bad_pivot.add((-1,), "AXIOM", (1,))
    bad_pivot.add((), "RES", (0, 1, 2))
    r = F.check_trace(J, bad_pivot)
    assert not r.ok and r.index == 2

    wrong_axiom = F.ResolutionTrace()
    wrong_axiom.add((-1,), "AXIOM", (0,))
    assert F.check_trace(J, wrong_axiom).index == 0

    forward = F.ResolutionTrace()
    forward.add((), "RES", (1, 2, 1))
    assert F.check_trace(J, forward).index == 0

    not_empty = F.ResolutionTrace()
    not_empty.add((1,), "AXIOM", (0,))
    r = F.check_trace(J, not_empty)
    assert not r.ok and "empty" in r.reason

    assert not F.check_trace(J, F.ResolutionTrace()).ok


def test_weakening_is_accepted():
    J = I.Instance(2, P.sat(1), [[0], [0]], [[1], [-1]])
    tr = F.ResolutionTrace()
    tr.add((1, 2), "AXIOM", (0,))
    tr.add((-1,), "AXIOM", (1,))
    tr.add((2,), "RES", (0, 1, 1))
    assert not F.check_trace(J, tr).ok          # last clause is not empty
    assert F.check_trace(J, tr).index == 2


def test_trace_parse_errors():
    with pytest.raises(ValueError):
        F.ResolutionTrace.loads("2 : 1 | AXIOM 1\n")
    with pytest.raises(ValueError):
        F.ResolutionTrace.loads("1 : 1 | FOO 1\n")


# -- DPLL -------------------------------------------------------------------

def test_parity_pair_refutation():
    res = F.dpll_refute(parity_pair())
    assert res.verdict == "UNSAT"
    assert len(res.trace) <= 7
    assert F.check_trace(parity_pair(), res.trace).ok


@pytest.mark.parametrize("rule", F.BRANCHING_RULES)
def test_random_unsat_traces_check(rule):
    for seed in range(8):
        J = I.random_instance(P.sat(3), 15, 150, np.random.default_rng(seed))
        res = F.dpll_refute(J, rule, rng=np.random.default_rng(seed))
        assert res.verdict == "UNSAT"
        assert F.check_trace(J, res.trace).ok
        assert res.trace.steps[-1].clause == ()


@settings(max_examples=25)
@given(st.integers(0, 99999), st.sampled_from(["sat:3", "maj:3", "parity:3", "t:4,2"]),
       st.sampled_from(F.BRANCHING_RULES))
def test_dpll_agrees_with_exhaustion(seed, spec, rule):
    rng = np.random.default_rng(seed)
    Q = P.parse_spec(spec)
    n = int(rng.integers(Q.arity, 10))
    J = I.random_instance(Q, n, int(rng.integers(1, 8 * n)), rng)
    res = F.dpll_refute(J, rule, rng=rng)
    val, _ = I.exact_value(J)
    if val == 1:
        assert res.verdict == "SAT"
        assert I.eval_value(J, res.witness) == 1
    else:
        assert res.verdict == "UNSAT"
        assert F.check_trace(J, res.trace).ok


def test_planted_never_unsat():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        a = rng.choice([-1, 1], size=40)
        J = I.planted_instance(P.sat(3), 40, 400, a, rng)
        res = F.dpll_refute(J, "maxocc")
        assert res.verdict == "SAT"
        assert I.eval_value(J, res.witness) == 1


def test_budget():
    J = I.random_instance(P.sat(3), 40, 240, np.random.default_rng(0))
    res = F.dpll_refute(J, node_budget=3)
    assert res.verdict == "BUDGET" and res.tree_size >= 3
    with pytest.raises(ValueError):
        F.dpll_refute(J, rule="nope")


def test_tree_size_regression():
    # frozen per-seed measurements: SAT_3, n = 50, m = 30n
    J = I.random_instance(P.sat(3), 50, 1500, np.random.default_rng([50, 0]))
    got = {rule: F.dpll_refute(J, rule, rng=np.random.default_rng(0)).tree_size
           for rule in F.BRANCHING_RULES}
    assert got == {"first": 7, "maxocc": 7, "random": 13}


def test_median_tree_size_grows():
    medians = []
    for n in (20, 30, 40):
        sizes = [F.dpll_refute(I.random_instance(P.sat(3), n, 6 * n,
                                                 np.random.default_rng([n, s]))).tree_size
                 for s in range(20)]
        medians.append(float(np.median(sizes)))
    assert medians == [23.5, 52.5, 88.5]
    assert medians[0] < medians[1] < medians[2]


# -- expansion ---------------------------------------------------------------

def test_expansion_trivial_cases():
    J = I.Instance(6, P.sat(3), [[0, 1, 2], [3, 4, 5]], [[1, 1, 1]] * 2)
    rep = F.expansion_check(J, 2)
    assert rep.status == "verified_exhaustive" and rep.width_bound == Fraction(1, 3)
    assert list(F.private_counts(J, [0, 1])) == [3, 3]
    same = I.Instance(6, P.sat(3), [[0, 1, 2]] * 4, [[1, 1, 1]] * 4)
    rep = F.expansion_check(same, 2)
    assert rep.status == "violated" and rep.witness == (0, 1)
    with pytest.raises(ValueError):
        F.expansion_check(same, 5)


def test_default_threshold():
    assert F.default_private_threshold(P.sat(3)) == 1
    assert F.default_private_threshold(P.maj(5)) == 3
    assert F.default_private_threshold(P.parity(4)) == 1


def test_expansion_sampled_agrees_with_exhaustive():
    rng = np.random.default_rng(1)
    J = I.random_instance(P.sat(5), 1000, 30, rng)
    ex = F.expansion_check(J, 3, threshold=3)
    assert ex.status == "verified_exhaustive"
    old = F.EXHAUSTIVE_SUBSET_LIMIT
    try:
        F.EXHAUSTIVE_SUBSET_LIMIT = 0
        sm = F.expansion_check(J, 3, subset_trials=2000, rng=rng, threshold=3)
    finally:
        F.EXHAUSTIVE_SUBSET_LIMIT = old
    assert sm.status == "verified_sampled"
    assert 0 < sm.confidence < 0.01


def test_expansion_random_sat5_diagnostic():
    n = 60
    J = I.random_instance(P.sat(5), n, n * n, np.random.default_rng(2))
    rep = F.expansion_check(J, int(n ** 0.75), subset_trials=200, rng=np.random.default_rng(3))
    assert rep.status in ("verified_sampled", "violated")


def test_bw_bound():
    assert F.bw_length_bound(0, 10)["exponent"] == 0
    assert F.bw_length_bound(10, 10)["exponent"] == 10
    assert F.bw_length_bound(3, 6)["constant_free"]


def test_sweep_row_fields():
    J = parity_pair()
    row = F.sweep_row(J, "first", 0, F.dpll_refute(J))
    assert list(row) == F.SWEEP_FIELDS
