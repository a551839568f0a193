"""CSP(P) instances: constraints, random and planted generation, values."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import predicates as pred

MAX_EXACT_VARS = 24


class DegeneratePredicateWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Constraint:
    vars: tuple
    signs: tuple

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"constraint variables must be distinct: {self.vars}")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +-1")
        if len(self.signs) != len(self.vars):
            raise ValueError("vars and signs differ in length")


class Instance:
    """An ordered list of P-constraints over variables 0..n-1.

    Stored as two (m, K) arrays: ``vars`` and ``signs``.  Constraint c reads
    ``P(signs[c,0] * x[vars[c,0]], ..., signs[c,K-1] * x[vars[c,K-1]])``.
    """

    def __init__(self, n: int, predicate, vars, signs):
        K = predicate.arity
        vars = np.asarray(vars, dtype=np.int64).reshape(-1, K)
        signs = np.asarray(signs, dtype=np.int8).reshape(-1, K)
        if vars.shape != signs.shape:
            raise ValueError("vars and signs must have the same shape")
        if len(vars):
            if vars.min() < 0 or vars.max() >= n:
                raise ValueError(f"variable index out of range [0, {n})")
            srt = np.sort(vars, axis=1)
            if np.any(srt[:, 1:] == srt[:, :-1]):
                raise ValueError("a constraint repeats a variable")
            if not np.all(np.abs(signs) == 1):
                raise ValueError("signs must be +-1")
        if predicate.materialized and predicate.is_constant():
            warnings.warn(f"{predicate.name} is constant; CSP over it is degenerate",
                          DegeneratePredicateWarning, stacklevel=2)
        vars.flags.writeable = False
        signs.flags.writeable = False
        self.n = n
        self.predicate = predicate
        self.vars = vars
        self.signs = signs

    @classmethod
    def from_constraints(cls, n, predicate, constraints: Sequence[Constraint]):
        K = predicate.arity
        vars = [c.vars for c in constraints]
        signs = [c.signs for c in constraints]
        return cls(n, predicate, np.array(vars, dtype=np.int64).reshape(-1, K),
                   np.array(signs, dtype=np.int8).reshape(-1, K))

    @property
    def m(self) -> int:
        return len(self.vars)

    @property
    def K(self) -> int:
        return self.predicate.arity

    def __len__(self):
        return self.m

    def constraint(self, c: int) -> Constraint:
        return Constraint(tuple(int(v) for v in self.vars[c]),
                          tuple(int(s) for s in self.signs[c]))

    @property
    def constraints(self):
        return [self.constraint(c) for c in range(self.m)]

    def with_predicate(self, predicate) -> "Instance":
        return Instance(self.n, predicate, self.vars, self.signs)

    def subset(self, rows) -> "Instance":
        return Instance(self.n, self.predicate, self.vars[rows], self.signs[rows])

    def satisfied(self, a) -> np.ndarray:
        """Per-constraint satisfaction bits under assignment ``a`` (+-1, length n)."""
        a = np.asarray(a)
        if a.shape != (self.n,):
            raise ValueError(f"assignment must have length {self.n}")
        if self.m == 0:
            return np.zeros(0, dtype=np.uint8)
        return self.predicate.eval_points(self.signs * a[self.vars])

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.n == other.n and self.predicate == other.predicate
                and np.array_equal(self.vars, other.vars)
                and np.array_equal(self.signs, other.signs))

    def __repr__(self):
        return f"Instance({self.predicate.name}, n={self.n}, m={self.m})"


def eval_constraint(P, C: Constraint, a) -> int:
    a = np.asarray(a)
    return int(P([s * int(a[v]) for v, s in zip(C.vars, C.signs)]))


def eval_value(J: Instance, a) -> Fraction:
    """Fraction of constraints satisfied by ``a``; the empty instance has value 1."""
    if J.m == 0:
        if len(a) != J.n:
            raise ValueError(f"assignment must have length {J.n}")
        return Fraction(1)
    return Fraction(int(J.satisfied(a).sum()), J.m)


def _draw(P, n, count, rng):
    K = P.arity
    keys = rng.random((count, n))
    vars = np.argsort(keys, axis=1)[:, :K]
    signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=(count, K))
    return vars, signs


def random_instance(P, n: int, m: int, rng) -> Instance:
    """m i.i.d. constraints: uniform ordered K-subset of [n], uniform signs."""
    if n < P.arity:
        raise ValueError(f"need n >= K ({n} < {P.arity})")
    vars, signs = _draw(P, n, m, rng)
    return Instance(n, P, vars, signs)


class PlantingStalled(RuntimeError):
    pass


def planted_instance(P, n: int, m: int, a, rng, budget: int | None = None) -> Instance:
    """m i.i.d. constraints conditioned on being satisfied by ``a`` (rejection)."""
    if n < P.arity:
        raise ValueError(f"need n >= K ({n} < {P.arity})")
    if P.materialized and P.n_ones == 0:
        raise ValueError("predicate is identically 0; nothing can be planted")
    a = np.asarray(a)
    if budget is None:
        budget = max(1000, 1000 * m)
    got_v, got_s = [], []
    have = drawn = 0
    while have < m:
        if drawn >= budget:
            raise PlantingStalled(f"accepted {have}/{m} constraints after {drawn} draws")
        batch = min(max(2 * (m - have), 64), budget - drawn)
        vars, signs = _draw(P, n, batch, rng)
        drawn += batch
        ok = P.eval_points(signs * a[vars]).astype(bool)
        got_v.append(vars[ok])
        got_s.append(signs[ok])
        have += int(ok.sum())
    vars = np.concatenate(got_v)[:m] if got_v else np.zeros((0, P.arity), dtype=np.int64)
    signs = np.concatenate(got_s)[:m] if got_s else np.zeros((0, P.arity), dtype=np.int8)
    return Instance(n, P, vars, signs)


def corrupt_instance(J: Instance, beta, rng) -> Instance:
    """Redraw the signs of ceil(beta m) constraints chosen without replacement."""
    k = int(np.ceil(float(beta) * J.m - 1e-12))
    rows = rng.choice(J.m, size=k, replace=False)
    signs = J.signs.copy()
    signs[rows] = rng.choice(np.array([-1, 1], dtype=np.int8), size=(k, J.K))
    return Instance(J.n, J.predicate, J.vars, signs)


def planted_acceptance_rate(P, n, a, trials, rng) -> float:
    """Fraction of uniformly drawn constraints that ``a`` satisfies."""
    vars, signs = _draw(P, n, trials, rng)
    return float(P.eval_points(signs * np.asarray(a)[vars]).mean())


# -- exact and estimated values ---------------------------------------------

def _satisfied_counts(J: Instance, assign_idx: np.ndarray, var_order=None) -> np.ndarray:
    """Satisfied-constraint counts for a batch of assignments.

    ``assign_idx`` enumerates assignments with variable ``var_order[0]`` as
    the most significant bit; bit 1 means +1.
    """
    if var_order is None:
        var_order = range(J.n)
    n = len(var_order)
    shift = {v: n - 1 - pos for pos, v in enumerate(var_order)}
    table = J.predicate.table
    K = J.K
    counts = np.zeros(len(assign_idx), dtype=np.int32)
    bitcache = {}
    for c in range(J.m):
        idx = np.zeros(len(assign_idx), dtype=np.int64)
        for l in range(K):
            v = int(J.vars[c, l])
            b = bitcache.get(v)
            if b is None:
                b = bitcache[v] = (assign_idx >> shift[v]) & 1
            lit = b if J.signs[c, l] > 0 else 1 - b
            idx |= lit << l
        counts += table[idx]
    return counts


def _index_to_assignment(idx: int, n: int) -> np.ndarray:
    return np.array([1 if (idx >> (n - 1 - v)) & 1 else -1 for v in range(n)], dtype=np.int8)


def exact_value(J: Instance, core=None):
    """VAL(J) with a lexicographically smallest optimal assignment (-1 < +1).

    Plain exhaustion handles n <= 24.  Passing ``core`` (a set of variables)
    enumerates only the core; every other variable is optimised inside its
    connected block of constraints, which is exact whenever those blocks
    each touch few variables.
    """
    pred._require_table(J.predicate)
    if core is not None:
        return _exact_value_blocked(J, sorted(core))
    n = J.n
    if n > MAX_EXACT_VARS:
        raise ValueError(f"n={n} exceeds the exhaustive limit {MAX_EXACT_VARS}; "
                         "use estimate_value or pass core=")
    if J.m == 0:
        return Fraction(1), -np.ones(n, dtype=np.int8)
    best, best_idx = -1, 0
    chunk = 1 << 16
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        counts = _satisfied_counts(J, idx)
        j = int(np.argmax(counts))
        if counts[j] > best:
            best, best_idx = int(counts[j]), int(idx[j])
            if best == J.m:
                break
    return Fraction(best, J.m), _index_to_assignment(best_idx, n)


def _blocks(J: Instance, core: list):
    core_set = set(core)
    parent = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for v in range(J.n):
        if v not in core_set:
            parent[v] = v
    for c in range(J.m):
        free = [int(v) for v in J.vars[c] if int(v) not in core_set]
        for v in free[1:]:
            ra, rb = find(free[0]), find(v)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for v in parent:
        groups.setdefault(find(v), []).append(v)
    core_only = []
    block_cons = {r: [] for r in groups}
    for c in range(J.m):
        free = [int(v) for v in J.vars[c] if int(v) not in core_set]
        if free:
            block_cons[find(free[0])].append(c)
        else:
            core_only.append(c)
    return [(sorted(groups[r]), block_cons[r]) for r in sorted(groups)], core_only


def _exact_value_blocked(J: Instance, core: list):
    if len(core) > MAX_EXACT_VARS:
        raise ValueError("core too large for exhaustion")
    if J.m == 0:
        return Fraction(1), -np.ones(J.n, dtype=np.int8)
    blocks, core_only = _blocks(J, core)
    ncore = len(core)
    core_pos = {v: i for i, v in enumerate(core)}
    total_idx = np.arange(1 << ncore, dtype=np.int64)
    total = np.zeros(1 << ncore, dtype=np.int64)
    if core_only:
        sub = J.subset(core_only)
        total += _satisfied_counts(sub, total_idx, var_order=core)
    choices = []
    for bvars, cons in blocks:
        if len(bvars) > 20:
            raise ValueError(f"a block has {len(bvars)} free variables; too many")
        sub = J.subset(cons)
        boundary = sorted({int(v) for v in sub.vars.ravel()} & set(core))
        order = boundary + bvars
        nb, nf = len(boundary), len(bvars)
        idx = np.arange(1 << (nb + nf), dtype=np.int64)
        counts = _satisfied_counts(sub, idx, var_order=order).reshape(1 << nb, 1 << nf)
        best_local = counts.max(axis=1)
        arg_local = counts.argmax(axis=1)
        # map each core assignment to its boundary index
        bidx = np.zeros(1 << ncore, dtype=np.int64)
        for t, v in enumerate(boundary):
            bit = (total_idx >> (ncore - 1 - core_pos[v])) & 1
            bidx |= bit << (nb - 1 - t)
        total += best_local[bidx]
        choices.append((bvars, arg_local, bidx))
    j = int(np.argmax(total))
    a = np.empty(J.n, dtype=np.int8)
    for i, v in enumerate(core):
        a[v] = 1 if (j >> (ncore - 1 - i)) & 1 else -1
    for bvars, arg_local, bidx in choices:
        loc = int(arg_local[bidx[j]])
        nf = len(bvars)
        for t, v in enumerate(bvars):
            a[v] = 1 if (loc >> (nf - 1 - t)) & 1 else -1
    return Fraction(int(total[j]), J.m), a


def estimate_value(J: Instance, restarts: int, rng) -> Fraction:
    """Best-of-restarts greedy local search; a lower bound on VAL(J).

    With ``restarts=0`` this is the value of the all-true assignment.
    """
    a = np.ones(J.n, dtype=np.int8)
    best = eval_value(J, a)
    for _ in range(restarts):
        a = rng.choice(np.array([-1, 1], dtype=np.int8), size=J.n)
        cur = int(J.satisfied(a).sum()) if J.m else 0
        while True:
            gains = np.empty(J.n, dtype=np.int64)
            for v in range(J.n):
                a[v] = -a[v]
                gains[v] = int(J.satisfied(a).sum()) - cur
                a[v] = -a[v]
            v = int(np.argmax(gains))
            if gains[v] <= 0:
                break
            a[v] = -a[v]
            cur += int(gains[v])
        val = Fraction(cur, J.m) if J.m else Fraction(1)
        best = max(best, val)
        if best == 1:
            break
    return best


def apply_implication(J: Instance, Q) -> Instance:
    """Swap the predicate for an implied one, keeping every literal."""
    if not pred.implies(J.predicate, Q):
        raise ValueError(f"{J.predicate.name} does not imply {Q.name}")
    return J.with_predicate(Q)


# -- file formats -----------------------------------------------------------

def instance_to_json(J: Instance) -> dict:
    return {
        "predicate": pred.predicate_to_json(J.predicate),
        "n": J.n,
        "constraints": [{"vars": [int(v) for v in J.vars[c]],
                         "signs": [int(s) for s in J.signs[c]]} for c in range(J.m)],
    }


def instance_from_json(obj) -> Instance:
    if isinstance(obj, str):
        obj = json.loads(obj)
    P = pred.predicate_from_json(obj["predicate"])
    cons = obj["constraints"]
    vars = np.array([c["vars"] for c in cons], dtype=np.int64).reshape(-1, P.arity)
    signs = np.array([c["signs"] for c in cons], dtype=np.int8).reshape(-1, P.arity)
    return Instance(int(obj["n"]), P, vars, signs)


def dumps_instance(J: Instance) -> str:
    return json.dumps(instance_to_json(J), separators=(",", ":"))


def loads_instance(text: str) -> Instance:
    return instance_from_json(json.loads(text))


def to_dimacs(J: Instance) -> str:
    """Compact text form: ``p gcsp <family> <n> <m>`` then one signed,
    1-based literal list per constraint, terminated by 0."""
    if J.predicate.family is None:
        raise ValueError("the compact text form needs a named predicate family")
    fam = J.predicate.name
    lines = [f"p gcsp {fam} {J.n} {J.m}"]
    for c in range(J.m):
        lits = [int(s) * (int(v) + 1) for v, s in zip(J.vars[c], J.signs[c])]
        lines.append(" ".join(str(x) for x in lits) + " 0")
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Instance:
    P = None
    rows = []
    n = m = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            _, kind, fam, n, m = line.split()
            if kind != "gcsp":
                raise ValueError(f"unsupported header kind {kind!r}")
            P = pred.parse_spec(fam)
            n, m = int(n), int(m)
            continue
        lits = [int(t) for t in line.split()]
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        rows.append(lits)
    if P is None:
        raise ValueError("missing 'p gcsp' header")
    if len(rows) != m:
        raise ValueError(f"header says {m} constraints, found {len(rows)}")
    vars = np.array([[abs(x) - 1 for x in r] for r in rows], dtype=np.int64).reshape(-1, P.arity)
    signs = np.array([[1 if x > 0 else -1 for x in r] for r in rows], dtype=np.int8).reshape(-1, P.arity)
    return Instance(n, P, vars, signs)
