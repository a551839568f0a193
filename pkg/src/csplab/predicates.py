"""Boolean predicates on {-1,+1}^K and their exact parameters.

Points are sequences of +-1.  A point's table index has bit ``j`` set iff
coordinate ``j`` is +1; +1 plays the role of *true* / bit 1 throughout.
"""

from __future__ import annotations

import itertools
import json
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from math import comb, ceil
from typing import Sequence

import numpy as np

from .simplex import solve_lp

MAX_TABLE_ARITY = 26
MAX_UVAL_ARITY = 12


def point_index(x: Sequence[int]) -> int:
    idx = 0
    for j, v in enumerate(x):
        if v == 1:
            idx |= 1 << j
        elif v != -1:
            raise ValueError(f"coordinate {j} is {v!r}, expected +-1")
    return idx


def index_point(idx: int, arity: int) -> tuple:
    return tuple(1 if (idx >> j) & 1 else -1 for j in range(arity))


def all_points(arity: int) -> np.ndarray:
    """Every point of {-1,1}^arity as rows, in table-index order."""
    idx = np.arange(1 << arity, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(arity)) & 1
    return (2 * bits - 1).astype(np.int8)


def pm_to_bits(x):
    """The +-1 to 0/1 involution used by the parity reduction (+1 -> 1)."""
    return (np.asarray(x) + 1) // 2


def bits_to_pm(b):
    return 2 * np.asarray(b) - 1


class Predicate:
    """A predicate ``{-1,1}^K -> {0,1}`` stored as a full truth table."""

    materialized = True

    def __init__(self, arity: int, table, family: str | None = None, params: tuple = ()):
        if arity < 1:
            raise ValueError("arity must be positive")
        if arity > MAX_TABLE_ARITY:
            raise ValueError(f"arity {arity} exceeds the table limit {MAX_TABLE_ARITY}")
        table = np.asarray(table, dtype=bool)
        if table.shape != (1 << arity,):
            raise ValueError(f"table must have length 2**{arity}")
        table = table.copy()
        table.flags.writeable = False
        self.arity = arity
        self.table = table
        self.family = family
        self.params = tuple(params)

    def __call__(self, x: Sequence[int]) -> int:
        if len(x) != self.arity:
            raise ValueError(f"point has length {len(x)}, predicate arity is {self.arity}")
        return int(self.table[point_index(x)])

    eval = __call__

    def eval_index(self, idx):
        return self.table[idx]

    def eval_points(self, X: np.ndarray) -> np.ndarray:
        """Vectorised evaluation on rows of a +-1 array of shape (..., K)."""
        X = np.asarray(X)
        idx = ((X > 0).astype(np.int64) << np.arange(self.arity)).sum(axis=-1)
        return self.table[idx].astype(np.uint8)

    @property
    def n_ones(self) -> int:
        return int(self.table.sum())

    def satisfying_points(self) -> np.ndarray:
        return all_points(self.arity)[self.table]

    def falsifying_points(self) -> np.ndarray:
        return all_points(self.arity)[~self.table]

    def is_constant(self) -> bool:
        return self.n_ones in (0, 1 << self.arity)

    @property
    def name(self) -> str:
        if self.family is None:
            return f"table{self.arity}"
        return f"{self.family}:{','.join(str(p) for p in self.params)}"

    def __eq__(self, other):
        if not isinstance(other, Predicate):
            return NotImplemented
        return self.arity == other.arity and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.arity, self.table.tobytes()))

    def __repr__(self):
        return f"Predicate({self.name}, ones={self.n_ones}/{1 << self.arity})"


class LazyPredicate:
    """Pointwise-only predicate for arities too large to tabulate."""

    materialized = False

    def __init__(self, arity: int, fn, family: str, params: tuple):
        self.arity = arity
        self._fn = fn
        self.family = family
        self.params = tuple(params)

    def __call__(self, x):
        if len(x) != self.arity:
            raise ValueError(f"point has length {len(x)}, predicate arity is {self.arity}")
        return int(self._fn(np.asarray(x)[None, :])[0])

    eval = __call__

    def eval_points(self, X):
        X = np.asarray(X)
        shape = X.shape[:-1]
        return self._fn(X.reshape(-1, self.arity)).reshape(shape).astype(np.uint8)

    @property
    def table(self):
        raise TypeError(f"{self.name} is lazy; it has no materialised table")

    @property
    def name(self):
        return f"{self.family}:{','.join(str(p) for p in self.params)}"

    def __eq__(self, other):
        if not isinstance(other, LazyPredicate):
            return NotImplemented
        return (self.family, self.params) == (other.family, other.params)

    def __hash__(self):
        return hash((self.family, self.params))

    def __repr__(self):
        return f"LazyPredicate({self.name})"


def _require_table(P):
    if not getattr(P, "materialized", False):
        raise TypeError(f"{P!r} has no truth table; parameter computations need one")


# -- named families ---------------------------------------------------------

def _count_ones(K):
    idx = np.arange(1 << K, dtype=np.int64)
    return np.bitwise_count(idx)


def sat(K: int) -> Predicate:
    return Predicate(K, _count_ones(K) >= 1, "sat", (K,))


def and_(K: int) -> Predicate:
    return Predicate(K, _count_ones(K) == K, "and", (K,))


def maj(K: int) -> Predicate:
    """maj_K(x) = 1 iff sum(x) > 0."""
    return Predicate(K, 2 * _count_ones(K) > K, "maj", (K,))


def parity(K: int) -> Predicate:
    """1 iff an odd number of coordinates are +1."""
    return Predicate(K, _count_ones(K) % 2 == 1, "parity", (K,))


def threshold(k: int, l: int) -> Predicate:
    """T_{k,l}: at least ``l`` of the ``k`` coordinates are +1."""
    if not 1 <= l <= k:
        raise ValueError("threshold needs 1 <= l <= k")
    return Predicate(k, _count_ones(k) >= l, "t", (k, l))


def huang_arity(k: int) -> int:
    return k + comb(k, 3)


def huang_codewords(k: int) -> np.ndarray:
    """Rows codeword(z) for z in {-1,1}^k in index order, as +-1 arrays.

    The first k coordinates are z; coordinate A (triples of [k] in
    lexicographic order) is the product of z over A.
    """
    z = all_points(k).astype(np.int64)
    triples = list(itertools.combinations(range(k), 3))
    if triples:
        prods = np.stack([z[:, a] * z[:, b] * z[:, c] for a, b, c in triples], axis=1)
        return np.concatenate([z, prods], axis=1).astype(np.int8)
    return z.astype(np.int8)


def _codeword_masks(k):
    cw = huang_codewords(k)
    return ((cw > 0).astype(np.int64) << np.arange(cw.shape[1])).sum(axis=1)


def _huang_eval(k):
    cw = huang_codewords(k)

    def fn(X):
        out = np.zeros(len(X), dtype=bool)
        for c in cw:
            out |= (X != c).sum(axis=1) <= k
        return out

    return fn


@lru_cache(maxsize=None)
def huang(k: int):
    """Huang's predicate H_k on K = k + C(k,3) coordinates.

    H_k(x) = 1 iff x is within Hamming distance k of some codeword(z).
    """
    if k < 1:
        raise ValueError("huang needs k >= 1")
    K = huang_arity(k)
    if K > MAX_TABLE_ARITY:
        return LazyPredicate(K, _huang_eval(k), "huang", (k,))
    masks = _codeword_masks(k)
    table = np.zeros(1 << K, dtype=bool)
    chunk = 1 << 22
    for start in range(0, 1 << K, chunk):
        idx = np.arange(start, min(start + chunk, 1 << K), dtype=np.int64)
        part = table[start:start + len(idx)]
        for m in masks:
            part |= np.bitwise_count(idx ^ m) <= k
    return Predicate(K, table, "huang", (k,))


def _pk8_block_threshold(k):
    return ceil(k / 2) - 1


def _pk8_eval(k):
    l = _pk8_block_threshold(k)

    def fn(X):
        ones = (X.reshape(len(X), 8, k) > 0).sum(axis=2)
        t = ones >= l
        return t[:, :4].all(axis=1) & ~t[:, 4:].all(axis=1)

    return fn


@lru_cache(maxsize=None)
def pk8(k: int):
    """P_k on eight blocks of k coordinates.

    True iff blocks 1-4 all satisfy T_{k,ceil(k/2)-1} and blocks 5-8 do not
    all satisfy it.
    """
    if k < 3:
        raise ValueError("pk8 needs k >= 3 so that ceil(k/2)-1 >= 1")
    K = 8 * k
    if K > MAX_TABLE_ARITY:
        return LazyPredicate(K, _pk8_eval(k), "pk8", (k,))
    fn = _pk8_eval(k)
    table = np.empty(1 << K, dtype=bool)
    chunk = 1 << 20
    for start in range(0, 1 << K, chunk):
        idx = np.arange(start, min(start + chunk, 1 << K), dtype=np.int64)
        X = ((idx[:, None] >> np.arange(K)) & 1).astype(np.int8)
        table[start:start + len(idx)] = fn(2 * X - 1)
    return Predicate(K, table, "pk8", (k,))


FAMILIES = {
    "sat": sat,
    "and": and_,
    "maj": maj,
    "parity": parity,
    "t": threshold,
    "huang": huang,
    "pk8": pk8,
}


def make_named(family: str, *params):
    family = family.lower()
    if family not in FAMILIES:
        raise ValueError(f"unknown predicate family {family!r}")
    try:
        return FAMILIES[family](*[int(p) for p in params])
    except TypeError as e:
        raise ValueError(f"bad parameters for {family}: {params}") from e


def parse_spec(spec: str):
    """Parse ``"maj:5"`` or ``"t:5,3"`` into a predicate."""
    family, _, rest = spec.partition(":")
    params = [p for p in rest.split(",") if p]
    return make_named(family, *params)


def table_hex(P: Predicate) -> str:
    bits = np.packbits(P.table.astype(np.uint8), bitorder="little")
    return format(int.from_bytes(bits.tobytes(), "little"), "x")


def from_table_hex(arity: int, hexstr: str) -> Predicate:
    value = int(hexstr, 16)
    if value >> (1 << arity):
        raise ValueError("table_hex has bits beyond 2**arity")
    nbytes = max(1, (1 << arity) // 8)
    raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
    table = np.unpackbits(raw, bitorder="little")[: 1 << arity]
    return Predicate(arity, table.astype(bool))


def predicate_to_json(P) -> dict:
    if P.family is not None:
        return {"family": P.family, "params": list(P.params)}
    return {"arity": P.arity, "table_hex": table_hex(P)}


def predicate_from_json(obj) -> Predicate:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "family" in obj:
        return make_named(obj["family"], *obj.get("params", []))
    return from_table_hex(int(obj["arity"]), obj["table_hex"])


# -- parameters -------------------------------------------------------------

def lval(P: Predicate) -> Fraction:
    _require_table(P)
    return Fraction(P.n_ones, 1 << P.arity)


def implies(P: Predicate, Q: Predicate) -> bool:
    _require_table(P)
    _require_table(Q)
    if P.arity != Q.arity:
        raise ValueError("implication needs predicates of equal arity")
    return bool(np.all(~P.table | Q.table))


@dataclass(frozen=True)
class Var0Result:
    size: int
    coords: tuple
    assignment: tuple  # +-1 values for coords, in the same order

    def __int__(self):
        return self.size


def var0(P: Predicate) -> Var0Result:
    """Smallest set of coordinates that some assignment forces P to 0 on.

    Subsets are scanned by increasing size, lexicographically; assignments to
    a subset in index order.  The first hit is returned.
    """
    _require_table(P)
    K = P.arity
    if P.n_ones == 1 << K:
        raise ValueError("no falsifying restriction: predicate is identically 1")
    cube = P.table.reshape((2,) * K)  # axis a <-> coordinate K-1-a
    for r in range(1, K + 1):
        for coords in itertools.combinations(range(K), r):
            others = tuple(K - 1 - c for c in range(K) if c not in coords)
            some_one = np.any(cube, axis=others) if others else cube
            flat = np.ravel(some_one)
            zeros = np.flatnonzero(~flat)
            if len(zeros):
                a = int(zeros[0])
                assignment = tuple(1 if (a >> t) & 1 else -1 for t in range(r))
                return Var0Result(r, coords, assignment)
    raise AssertionError("unreachable: the full restriction always falsifies")


def restrict(P: Predicate, coords: Sequence[int], values: Sequence[int]) -> np.ndarray:
    """Truth table of P with ``coords`` fixed, over the remaining coordinates."""
    pts = all_points(P.arity)
    mask = np.ones(len(pts), dtype=bool)
    for c, v in zip(coords, values):
        mask &= pts[:, c] == v
    return P.table[mask]


class RationalDistribution:
    """Exact probability vector over {-1,1}^K, indexed like truth tables."""

    def __init__(self, arity: int, weights):
        weights = tuple(Fraction(w) for w in weights)
        if len(weights) != 1 << arity:
            raise ValueError(f"need {1 << arity} weights, got {len(weights)}")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if sum(weights) != 1:
            raise ValueError(f"weights sum to {sum(weights)}, not 1")
        self.arity = arity
        self.weights = weights

    @classmethod
    def uniform(cls, arity):
        w = Fraction(1, 1 << arity)
        return cls(arity, [w] * (1 << arity))

    @classmethod
    def from_dict(cls, arity, mass: dict):
        w = [Fraction(0)] * (1 << arity)
        for x, p in mass.items():
            w[point_index(x) if not isinstance(x, int) else x] += Fraction(p)
        return cls(arity, w)

    def support(self):
        return [i for i, w in enumerate(self.weights) if w]

    def prob(self, event) -> Fraction:
        """Probability of ``event(point) -> bool`` (point as +-1 tuple)."""
        return sum((w for i, w in enumerate(self.weights)
                    if w and event(index_point(i, self.arity))), Fraction(0))

    def marginal(self, i: int, a: int) -> Fraction:
        bit = 1 if a == 1 else 0
        return sum((w for idx, w in enumerate(self.weights) if ((idx >> i) & 1) == bit), Fraction(0))

    def pair_marginal(self, i: int, j: int) -> dict:
        out = {(a, b): Fraction(0) for a in (-1, 1) for b in (-1, 1)}
        for idx, w in enumerate(self.weights):
            if w:
                a = 1 if (idx >> i) & 1 else -1
                b = 1 if (idx >> j) & 1 else -1
                out[a, b] += w
        return out

    def expectation(self, P: Predicate) -> Fraction:
        _require_table(P)
        return sum((w for w, t in zip(self.weights, P.table) if t), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, RationalDistribution) and \
            (self.arity, self.weights) == (other.arity, other.weights)

    def __repr__(self):
        return f"RationalDistribution(arity={self.arity}, support={len(self.support())})"


@dataclass(frozen=True)
class UniformityCheck:
    ok: bool
    violation: tuple | None = None  # (i, j, a, b), 1-based coordinates

    def __bool__(self):
        return self.ok


def is_pairwise_uniform(D: RationalDistribution) -> UniformityCheck:
    quarter = Fraction(1, 4)
    for i in range(D.arity):
        for j in range(i + 1, D.arity):
            pm = D.pair_marginal(i, j)
            for a in (-1, 1):
                for b in (-1, 1):
                    if pm[a, b] != quarter:
                        return UniformityCheck(False, (i + 1, j + 1, a, b))
    return UniformityCheck(True)


@dataclass(frozen=True)
class UvalResult:
    value: Fraction
    witness: RationalDistribution


def uval_constraints(K: int):
    """Equality system whose nonnegative solutions are the pairwise-uniform
    distributions on {-1,1}^K (scaled by 4 to keep it integral)."""
    pts = all_points(K)
    A, b = [], []
    for i in range(K):
        for j in range(i + 1, K):
            for a in (-1, 1):
                for c in (-1, 1):
                    A.append(((pts[:, i] == a) & (pts[:, j] == c)).astype(int).tolist())
                    b.append(Fraction(1, 4))
    if K < 2:
        A.append([1] * (1 << K))
        b.append(Fraction(1))
    return A, b


def uval(P: Predicate) -> UvalResult:
    """max E_D[P] over pairwise-uniform D, by exact simplex."""
    _require_table(P)
    if P.arity > MAX_UVAL_ARITY:
        raise ValueError(
            f"arity {P.arity} is above the exact limit {MAX_UVAL_ARITY}; "
            "use uval_monte_carlo for a heuristic estimate")
    A, b = uval_constraints(P.arity)
    c = P.table.astype(int).tolist()
    res = solve_lp(c, A, b)
    return UvalResult(res.value, RationalDistribution(P.arity, res.x))


def uval_monte_carlo(P, rng, samples=2000):
    """Heuristic lower estimate of Uval for large arity.

    Takes the best of random mixtures of the uniform distribution with
    distributions that are uniform on a random subset of P^-1(1) closed
    under pairwise uniformity by float LP.  No guarantee; diagnostic only.
    """
    from scipy.optimize import linprog

    K = P.arity
    pts = rng.choice([-1, 1], size=(samples, K))
    vals = P.eval_points(pts).astype(float)
    # columns: sampled points; constraints: pair marginals = 1/4
    rows, rhs = [], []
    for i in range(K):
        for j in range(i + 1, K):
            for a in (-1, 1):
                for c in (-1, 1):
                    rows.append(((pts[:, i] == a) & (pts[:, j] == c)).astype(float))
                    rhs.append(0.25)
    res = linprog(-vals, A_eq=np.array(rows), b_eq=np.array(rhs), bounds=(0, None),
                  method="highs")
    if res.status != 0:
        return float(vals.mean())
    return float(-res.fun)


# -- shift vector for the DNF reduction -------------------------------------

def shift_ok(P: Predicate, y: Sequence[int]) -> bool:
    """True iff P(x) = 1 implies P(y * x) = 0 for every x."""
    _require_table(P)
    ymask = point_index(y)
    sat_idx = np.flatnonzero(P.table)
    # coordinatewise product by y flips the bits where y = -1
    flip = ~ymask & ((1 << P.arity) - 1)
    return not bool(np.any(P.table[sat_idx ^ flip]))


def find_shift_vector(k: int, rng, budget: int | None = None):
    """Random search for y with H_k(x)=1 => H_k(y*x)=0; None if budget runs out."""
    P = huang(k)
    _require_table(P)
    K = P.arity
    if budget is None:
        budget = 10 * 2 ** min(K, 20)
    for _ in range(budget):
        y = tuple(int(v) for v in rng.choice([-1, 1], size=K))
        if shift_ok(P, y):
            return y
    return None


def shift_vectors_exhaustive(P: Predicate) -> list:
    """All valid shift vectors, by brute force over the 2^K candidates."""
    _require_table(P)
    K = P.arity
    sat_idx = np.flatnonzero(P.table)
    full = (1 << K) - 1
    out = []
    for ymask in range(1 << K):
        if not np.any(P.table[sat_idx ^ (~ymask & full)]):
            out.append(index_point(ymask, K))
    return out


# -- explicit pairwise-uniform constructions --------------------------------

def maj_distribution(K: int) -> RationalDistribution:
    """Pairwise-uniform witness for Uval(maj_K) = 1 - 1/(K+1), K odd.

    Mass 1/(K+1) on the all-false point (all -1), the rest uniform over the
    points with exactly (K+1)/2 true coordinates.
    """
    if K % 2 != 1:
        raise ValueError("maj distribution needs odd K")
    t1 = (K + 1) // 2
    w = [Fraction(0)] * (1 << K)
    w[0] = Fraction(1, K + 1)
    share = Fraction(K, K + 1) / comb(K, t1)
    for idx in range(1 << K):
        if idx.bit_count() == t1:
            w[idx] = share
    return RationalDistribution(K, w)


def block_distribution(k: int) -> RationalDistribution:
    """D_k: mass 1/(k+1) on all-true, rest uniform on weight ceil(k/2)-1, k odd.

    Supported inside T_{k, ceil(k/2)-1}.
    """
    if k % 2 != 1:
        raise ValueError("block distribution needs odd k")
    w1 = _pk8_block_threshold(k)
    w = [Fraction(0)] * (1 << k)
    w[(1 << k) - 1] = Fraction(1, k + 1)
    share = Fraction(k, k + 1) / comb(k, w1)
    for idx in range(1 << k):
        if idx.bit_count() == w1:
            w[idx] += share
    return RationalDistribution(k, w)


def make_Z_distribution() -> RationalDistribution:
    """Z on {0,1}^4 (bit i set <-> Z_i = 1), never all-zero, pairwise
    independent with Pr(Z_i = 1) = 3/8."""
    w = [Fraction(0)] * 16
    parts = {1: Fraction(140, 192), 2: Fraction(30, 192), 4: Fraction(22, 192)}
    for weight, p in parts.items():
        idxs = [i for i in range(16) if i.bit_count() == weight]
        for i in idxs:
            w[i] += p / len(idxs)
    return RationalDistribution(4, w)


def heavy_minus_fraction(k: int) -> Fraction:
    """Fraction of {-1,1}^k with more than ceil(k/2) coordinates equal to -1."""
    h = ceil(k / 2)
    return Fraction(sum(comb(k, s) for s in range(h + 1, k + 1)), 1 << k)


def dr_admissible(k: int) -> bool:
    return k % 2 == 1 and k >= 3 and heavy_minus_fraction(k) >= Fraction(3, 8)


def smallest_dr_k(limit: int = 200) -> int:
    for k in range(3, limit + 1):
        if dr_admissible(k):
            return k
    raise ValueError(f"no admissible k up to {limit}")


class _RankedCube:
    """{-1,1}^k ordered by number of -1's (descending), then by the
    lexicographic rank of the set of -1 positions."""

    def __init__(self, k):
        self.k = k
        self.levels = list(range(k, -1, -1))  # number of minus-ones
        self.offsets = []
        acc = 0
        for s in self.levels:
            self.offsets.append(acc)
            acc += comb(k, s)

    def unrank(self, r: int) -> np.ndarray:
        k = self.k
        for s, off in zip(reversed(self.levels), reversed(self.offsets)):
            if r >= off:
                r -= off
                break
        x = np.ones(k, dtype=np.int8)
        # r-th s-subset of range(k) in lexicographic order
        start = 0
        for remaining in range(s, 0, -1):
            for c in range(start, k):
                cnt = comb(k - c - 1, remaining - 1)
                if r < cnt:
                    x[c] = -1
                    start = c + 1
                    break
                r -= cnt
        return x


class DRSampler:
    """Sampler for D_R over ({-1,1}^k)^4.

    Draw Z; block i is uniform on B when Z_i = 1, uniform on the complement
    otherwise.  B is the first (3/8)2^k points of the heavy-minus ordering.
    """

    def __init__(self, k: int, strict: bool = True):
        if k < 3:
            raise ValueError("need k >= 3 so that (3/8)2^k is an integer")
        frac = heavy_minus_fraction(k)
        if strict and not dr_admissible(k):
            raise ValueError(
                f"k={k} not admissible: need odd k with heavy-minus fraction >= 3/8, got {frac}")
        self.k = k
        self.heavy_fraction = frac
        self.B_size = 3 * (1 << k) // 8
        self.Z = make_Z_distribution()
        self._cube = _RankedCube(k)

    def B_members(self):
        """All of B, as +-1 rows (small k only)."""
        return np.array([self._cube.unrank(r) for r in range(self.B_size)])

    def sample(self, rng, size: int = 1) -> np.ndarray:
        zw = np.array([float(w) for w in self.Z.weights])
        zs = rng.choice(16, size=size, p=zw / zw.sum())
        total = 1 << self.k
        out = np.empty((size, 4, self.k), dtype=np.int8)
        for s in range(size):
            for i in range(4):
                if (zs[s] >> i) & 1:
                    r = int(rng.integers(0, self.B_size))
                else:
                    r = self.B_size + int(rng.integers(0, total - self.B_size))
                out[s, i] = self._cube.unrank(r)
        return out

    def joint_distribution(self) -> RationalDistribution:
        """Exact joint law over {-1,1}^(4k), by enumeration (4k <= 12)."""
        k = self.k
        if 4 * k > MAX_UVAL_ARITY:
            raise ValueError("joint enumeration only for 4k <= 12")
        in_B = np.zeros(1 << k, dtype=bool)
        for x in self.B_members():
            in_B[point_index(x)] = True
        nB, nC = int(in_B.sum()), (1 << k) - int(in_B.sum())
        w = [Fraction(0)] * (1 << (4 * k))
        for z in range(16):
            pz = self.Z.weights[z]
            if not pz:
                continue
            choices = []
            for i in range(4):
                if (z >> i) & 1:
                    choices.append([(x, Fraction(1, nB)) for x in np.flatnonzero(in_B)])
                else:
                    choices.append([(x, Fraction(1, nC)) for x in np.flatnonzero(~in_B)])
            for combo in itertools.product(*choices):
                idx = 0
                p = pz
                for i, (x, px) in enumerate(combo):
                    idx |= int(x) << (i * k)
                    p *= px
                w[idx] += p
        return RationalDistribution(4 * k, w)


def make_DR_distribution(k: int, strict: bool = True) -> DRSampler:
    return DRSampler(k, strict=strict)
