import itertools
from fractions import Fraction
from math import comb, ceil

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from csplab import predicates as P


# -- brute-force oracles, written independently of the library ------------

def brute_table(arity, fn):
    return [int(fn(x)) for x in (tuple(1 if (i >> j) & 1 else -1 for j in range(arity))
                                 for i in range(1 << arity))]


def brute_var0(pred):
    K = pred.arity
    pts = list(itertools.product([-1, 1], repeat=K))
    for r in range(1, K + 1):
        for coords in itertools.combinations(range(K), r):
            for vals in itertools.product([-1, 1], repeat=r):
                if all(pred(x) == 0 for x in pts if all(x[c] == v for c, v in zip(coords, vals))):
                    return r
    return None


def float_uval(pred):
    A, b = P.uval_constraints(pred.arity)
    res = linprog(-pred.table.astype(float), A_eq=np.array(A, float),
                  b_eq=np.array([float(v) for v in b]), bounds=(0, None), method="highs")
    return -res.fun


pm_points = st.integers(1, 8).flatmap(
    lambda k: st.lists(st.sampled_from([-1, 1]), min_size=k, max_size=k))


@given(pm_points)
def test_point_index_roundtrip(x):
    assert P.index_point(P.point_index(x), len(x)) == tuple(x)


def test_all_points_order():
    pts = P.all_points(3)
    for i, x in enumerate(pts):
        assert P.point_index(x) == i


@pytest.mark.parametrize("K", [1, 2, 3, 4, 5])
def test_families_match_definitions(K):
    assert P.sat(K).table.tolist() == brute_table(K, lambda x: any(v == 1 for v in x))
    assert P.and_(K).table.tolist() == brute_table(K, lambda x: all(v == 1 for v in x))
    assert P.maj(K).table.tolist() == brute_table(K, lambda x: sum(x) > 0)
    assert P.parity(K).table.tolist() == brute_table(K, lambda x: x.count(1) % 2 == 1)
    for l in range(1, K + 1):
        assert P.threshold(K, l).table.tolist() == brute_table(K, lambda x: x.count(1) >= l)


def test_threshold_special_cases():
    assert P.threshold(5, 1) == P.sat(5)
    assert P.threshold(5, 3) == P.maj(5)
    assert P.threshold(5, 5) == P.and_(5)


def test_eval_length_mismatch():
    with pytest.raises(ValueError):
        P.maj(3)([1, 1])


def test_parse_and_json_roundtrip():
    for spec in ["maj:5", "t:5,3", "sat:3", "parity:4", "huang:3"]:
        Q = P.parse_spec(spec)
        assert P.predicate_from_json(P.predicate_to_json(Q)) == Q
    Q = P.Predicate(3, [0, 1, 1, 0, 1, 0, 0, 1])
    assert P.from_table_hex(3, P.table_hex(Q)) == Q
    assert P.predicate_from_json(P.predicate_to_json(Q)) == Q
    with pytest.raises(ValueError):
        P.parse_spec("nope:3")


@given(st.integers(1, 5).flatmap(lambda K: st.tuples(
    st.just(K), st.lists(st.booleans(), min_size=1 << K, max_size=1 << K))))
def test_table_hex_roundtrip(arg):
    K, bits = arg
    Q = P.Predicate(K, bits)
    assert P.from_table_hex(K, P.table_hex(Q)) == Q


# -- exact parameters -------------------------------------------------------

@pytest.mark.parametrize("K", [3, 5, 7])
def test_maj_parameters(K):
    assert P.uval(P.maj(K)).value == 1 - Fraction(1, K + 1)
    assert int(P.var0(P.maj(K))) == (K + 1) // 2


@pytest.mark.parametrize("K", [3, 4, 5])
def test_parity_parameters(K):
    assert P.uval(P.parity(K)).value == 1
    assert int(P.var0(P.parity(K))) == K


def test_sat_lval():
    assert P.lval(P.sat(3)) == Fraction(7, 8)
    assert int(P.var0(P.sat(3))) == 3


@given(st.integers(1, 4).flatmap(lambda K: st.tuples(
    st.just(K), st.lists(st.booleans(), min_size=1 << K, max_size=1 << K))))
def test_var0_matches_brute_force(arg):
    K, bits = arg
    Q = P.Predicate(K, bits)
    if all(bits):
        with pytest.raises(ValueError):
            P.var0(Q)
        return
    res = P.var0(Q)
    assert res.size == brute_var0(Q)
    # the reported restriction really forces 0
    assert not P.restrict(Q, res.coords, res.assignment).any()


@given(st.integers(2, 4).flatmap(lambda K: st.tuples(
    st.just(K), st.lists(st.booleans(), min_size=1 << K, max_size=1 << K))))
def test_uval_matches_float_lp(arg):
    K, bits = arg
    Q = P.Predicate(K, bits)
    res = P.uval(Q)
    assert abs(float(res.value) - float_uval(Q)) < 1e-9
    assert P.is_pairwise_uniform(res.witness)
    assert res.witness.expectation(Q) == res.value


@given(st.integers(2, 4).flatmap(lambda K: st.tuples(
    st.just(K), st.lists(st.booleans(), min_size=1 << K, max_size=1 << K))))
def test_uval_at_least_lval(arg):
    K, bits = arg
    Q = P.Predicate(K, bits)
    assert P.uval(Q).value >= P.lval(Q)


def test_uval_rejects_large_arity():
    with pytest.raises(ValueError, match="uval_monte_carlo"):
        P.uval(P.sat(13))


def test_implies():
    assert P.implies(P.and_(3), P.maj(3))
    assert P.implies(P.maj(3), P.sat(3))
    assert not P.implies(P.sat(3), P.maj(3))
    with pytest.raises(ValueError):
        P.implies(P.sat(3), P.sat(4))


def test_lazy_predicate_has_no_table():
    H = P.huang(7)
    assert not H.materialized
    with pytest.raises(TypeError):
        H.table
    with pytest.raises(TypeError):
        P.lval(H)


# -- Huang's predicate ------------------------------------------------------

def brute_huang(k):
    K = k + comb(k, 3)
    triples = list(itertools.combinations(range(k), 3))
    words = []
    for z in itertools.product([-1, 1], repeat=k):
        words.append(list(z) + [z[a] * z[b] * z[c] for a, b, c in triples])

    def fn(x):
        return any(sum(u != v for u, v in zip(x, w)) <= k for w in words)
    return K, fn


@pytest.mark.parametrize("k", [3, 4])
def test_huang_matches_brute_force(k):
    K, fn = brute_huang(k)
    assert P.huang(k).table.tolist() == brute_table(K, fn)


def test_huang4_frozen_constants():
    H = P.huang(4)
    assert H.arity == 8
    assert H.n_ones == 256           # every point is within distance 4 of a codeword
    assert P.shift_vectors_exhaustive(H) == []


def test_huang_lazy_eval():
    H = P.huang(7)
    cw = P.huang_codewords(7)
    assert H(cw[5].tolist()) == 1
    rng = np.random.default_rng(0)
    X = rng.choice(np.array([-1, 1], dtype=np.int8), size=(500, H.arity))
    assert H.eval_points(X).sum() == 0


@pytest.mark.slow
def test_huang6_count():
    assert P.huang(6).n_ones == 19470400


# -- shift vectors ----------------------------------------------------------

def test_shift_ok_definition():
    A = P.and_(3)
    good = (-1, -1, -1)
    assert P.shift_ok(A, good)
    assert not P.shift_ok(A, (1, 1, 1))
    for y in P.shift_vectors_exhaustive(A):
        for x in itertools.product([-1, 1], repeat=3):
            if A(x):
                assert A([a * b for a, b in zip(x, y)]) == 0


def test_find_shift_vector_k4_none(rng):
    assert P.find_shift_vector(4, rng, budget=200) is None


# -- pairwise-uniform constructions ----------------------------------------

@pytest.mark.parametrize("K", [3, 5, 7])
def test_maj_distribution(K):
    D = P.maj_distribution(K)
    assert P.is_pairwise_uniform(D)
    assert D.expectation(P.maj(K)) == 1 - Fraction(1, K + 1)


def test_maj_distribution_on_all_true_is_not_uniform():
    # moving the extra mass to the all-true point breaks pairwise uniformity
    K = 3
    w = list(P.maj_distribution(K).weights)
    w[(1 << K) - 1], w[0] = w[0], Fraction(0)
    D = P.RationalDistribution(K, w)
    assert not P.is_pairwise_uniform(D)


@pytest.mark.parametrize("k", [3, 5, 7])
def test_block_distribution(k):
    D = P.block_distribution(k)
    assert P.is_pairwise_uniform(D)
    T = P.threshold(k, ceil(k / 2) - 1)
    assert D.expectation(T) == 1


def test_z_distribution():
    Z = P.make_Z_distribution()
    for i in range(4):
        assert Z.marginal(i, 1) == Fraction(3, 8)
        for j in range(i + 1, 4):
            assert Z.pair_marginal(i, j)[1, 1] == Fraction(9, 64)
    assert Z.weights[0] == 0
    assert sum(Z.weights) == 1


def test_heavy_fraction_and_admissibility():
    # fraction of k-vectors with more than ceil(k/2) minus signs, by counting
    for k in range(3, 16):
        cnt = sum(1 for x in itertools.product([0, 1], repeat=k) if x.count(0) > ceil(k / 2))
        assert P.heavy_minus_fraction(k) == Fraction(cnt, 2 ** k)
    assert P.heavy_minus_fraction(7) == Fraction(29, 128)
    assert P.smallest_dr_k() == 41
    assert not P.dr_admissible(10)      # even k is excluded
    assert not P.dr_admissible(39)


def test_dr_sampler():
    with pytest.raises(ValueError):
        P.DRSampler(7)
    S = P.DRSampler(41)
    assert S.B_size == 3 * 2 ** 41 // 8
    rng = np.random.default_rng(1)
    X = S.sample(rng, 50)
    assert X.shape == (50, 4, 41)
    heavy = (X == -1).sum(axis=2) > 21
    assert heavy.any(axis=1).all()       # Z is never all zero


def test_dr_joint_pairwise_uniform_small():
    # the non-strict sampler at k = 3 still has uniform blocks pairwise
    S = P.DRSampler(3, strict=False)
    D = S.joint_distribution()
    assert P.is_pairwise_uniform(D)


def test_ranked_cube_is_a_bijection():
    cube = P._RankedCube(5)
    seen = {tuple(cube.unrank(r)) for r in range(32)}
    assert len(seen) == 32
    minus = [int((cube.unrank(r) == -1).sum()) for r in range(32)]
    assert minus == sorted(minus, reverse=True)


def test_pk8_count():
    # per block Pr(T_{3,1}) = 7/8, so 7^4 (8^4 - 7^4) points satisfy P_3
    Q = P.pk8(3)
    assert Q.n_ones == 7 ** 4 * (8 ** 4 - 7 ** 4)


def test_pk8_lazy_matches_definition():
    Q = P.pk8(5)
    rng = np.random.default_rng(2)
    X = rng.choice(np.array([-1, 1], dtype=np.int8), size=(300, 40))
    got = Q.eval_points(X)
    t = ((X.reshape(300, 8, 5) == 1).sum(axis=2) >= 2)
    want = t[:, :4].all(axis=1) & ~t[:, 4:].all(axis=1)
    assert (got.astype(bool) == want).all()
