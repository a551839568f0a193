"""CSP-to-sample reductions and the hypotheses that realize their outputs.

Every reduction here turns an instance into a labeled sample; each comes
with a witness builder producing a hypothesis that realizes (or almost
realizes) the sample whenever the source instance is satisfied by a known
assignment.
"""

from __future__ import annotations

import io
import itertools
import json
import struct
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import predicates as pred
from .instances import Instance

DOMAINS = ("PM", "TRI", "BIN")
_DOMAIN_VALUES = {"PM": (-1, 1), "TRI": (-1, 0, 1), "BIN": (0, 1)}
MAX_AUTOMATON_CLAUSES = 20


# -- samples ----------------------------------------------------------------

class LabeledSample:
    """An ordered sample ``(x_t, y_t)``; rows of ``X`` lie in the domain."""

    def __init__(self, domain: str, d: int, X, y, check: bool = True):
        if domain not in DOMAINS:
            raise ValueError(f"unknown domain {domain!r}")
        X = np.asarray(X, dtype=np.int8).reshape(-1, d)
        y = np.asarray(y, dtype=np.uint8).reshape(-1)
        if len(X) != len(y):
            raise ValueError("X and y differ in length")
        if check:
            if len(y) and y.max() > 1:
                raise ValueError("labels must be bits")
            allowed = np.array(_DOMAIN_VALUES[domain], dtype=np.int8)
            if X.size and not np.isin(X, allowed).all():
                raise ValueError(f"sample has values outside {domain}({d})")
        self.domain, self.d, self.X, self.y = domain, d, X, y

    @property
    def m(self) -> int:
        return len(self.y)

    def __len__(self):
        return self.m

    def __eq__(self, other):
        if not isinstance(other, LabeledSample):
            return NotImplemented
        return (self.domain == other.domain and self.d == other.d
                and np.array_equal(self.X, other.X) and np.array_equal(self.y, other.y))

    def __repr__(self):
        return f"LabeledSample({self.domain}({self.d}), m={self.m})"

    def header(self) -> dict:
        return {"domain": self.domain, "d": self.d, "m": self.m}


def write_sample_text(S: LabeledSample, fh) -> None:
    fh.write(json.dumps(S.header()) + "\n")
    for x, y in zip(S.X, S.y):
        fh.write(f"{int(y)} " + " ".join(str(int(v)) for v in x) + "\n")


def read_sample_text(fh) -> LabeledSample:
    head = json.loads(fh.readline())
    d, m = int(head["d"]), int(head["m"])
    rows = [line.split() for line in fh if line.strip()]
    if len(rows) != m:
        raise ValueError(f"header says {m} examples, found {len(rows)}")
    arr = np.array(rows, dtype=np.int64).reshape(m, d + 1)
    return LabeledSample(head["domain"], d, arr[:, 1:], arr[:, 0])


_MAGIC = b"CSLS"


def write_sample_binary(S: LabeledSample, fh) -> None:
    """Header JSON, then labels bit-packed and values 2-bit packed (v+1)."""
    head = json.dumps(S.header()).encode()
    fh.write(_MAGIC + struct.pack("<I", len(head)) + head)
    fh.write(np.packbits(S.y, bitorder="little").tobytes())
    codes = (S.X.astype(np.int16) + 1).astype(np.uint8).reshape(-1)
    pad = (-len(codes)) % 4
    codes = np.concatenate([codes, np.zeros(pad, dtype=np.uint8)]).reshape(-1, 4)
    packed = codes[:, 0] | (codes[:, 1] << 2) | (codes[:, 2] << 4) | (codes[:, 3] << 6)
    fh.write(packed.astype(np.uint8).tobytes())


def read_sample_binary(fh) -> LabeledSample:
    if fh.read(4) != _MAGIC:
        raise ValueError("not a binary sample file")
    (hl,) = struct.unpack("<I", fh.read(4))
    head = json.loads(fh.read(hl))
    d, m = int(head["d"]), int(head["m"])
    y = np.unpackbits(np.frombuffer(fh.read((m + 7) // 8), dtype=np.uint8),
                      bitorder="little")[:m]
    nvals = m * d
    raw = np.frombuffer(fh.read((nvals + 3) // 4), dtype=np.uint8)
    codes = np.stack([(raw >> s) & 3 for s in (0, 2, 4, 6)], axis=1).reshape(-1)[:nvals]
    X = codes.astype(np.int8) - 1
    return LabeledSample(head["domain"], d, X, y)


def dumps_sample(S: LabeledSample) -> str:
    buf = io.StringIO()
    write_sample_text(S, buf)
    return buf.getvalue()


def loads_sample(text: str) -> LabeledSample:
    return read_sample_text(io.StringIO(text))


# -- hypotheses -------------------------------------------------------------
# predict(X) returns int8 labels in {0, 1}; a value of -1 marks an
# undefined output (a halfspace evaluated exactly on its boundary), which
# disagrees with every label.

@dataclass
class DnfFormula:
    """Disjunction of conjunctions; a clause is a list of (var, sign) pairs
    and is satisfied when every listed coordinate equals its sign."""

    d: int
    clauses: list

    def __post_init__(self):
        for cl in self.clauses:
            vs = [v for v, _ in cl]
            if len(set(vs)) != len(vs):
                raise ValueError("a clause repeats a variable")
            if any(not 0 <= v < self.d for v in vs):
                raise ValueError("clause variable out of range")
            if any(s not in (-1, 1) for _, s in cl):
                raise ValueError("literal signs must be +-1")

    @property
    def size(self) -> int:
        return sum(len(cl) for cl in self.clauses)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X).reshape(-1, self.d)
        out = np.zeros(len(X), dtype=bool)
        for cl in self.clauses:
            if not cl:
                return np.ones(len(X), dtype=np.int8)
            v = np.fromiter((a for a, _ in cl), dtype=np.int64, count=len(cl))
            s = np.fromiter((b for _, b in cl), dtype=np.int8, count=len(cl))
            out |= (X[:, v] == s).all(axis=1)
        return out.astype(np.int8)

    def to_json(self) -> dict:
        return {"type": "dnf", "d": self.d,
                "clauses": [[[int(v), int(s)] for v, s in cl] for cl in self.clauses]}

    @classmethod
    def from_json(cls, obj) -> "DnfFormula":
        return cls(int(obj["d"]), [[(int(v), int(s)) for v, s in cl] for cl in obj["clauses"]])


@dataclass
class Halfspace:
    """``x -> 1`` if ``<w,x> > threshold``, ``0`` if below, undefined on it."""

    w: np.ndarray
    threshold: int = 0

    def __post_init__(self):
        w = np.asarray(self.w)
        self.w = w.astype(np.int64) if np.issubdtype(w.dtype, np.integer) else w.astype(np.float64)
        if not self.w.any():
            raise ValueError("a halfspace needs a nonzero weight")

    def predict(self, X) -> np.ndarray:
        z = np.asarray(X, dtype=self.w.dtype) @ self.w - self.threshold
        return np.where(z > 0, 1, np.where(z < 0, 0, -1)).astype(np.int8)


@dataclass
class IntersectionHypothesis:
    """Labels 1 iff ``<w_q, x> >= b_q`` for every q."""

    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.W = np.atleast_2d(np.asarray(self.W, dtype=np.int64))
        self.b = np.asarray(self.b, dtype=np.int64).reshape(-1)
        if len(self.b) != len(self.W):
            raise ValueError("one threshold per halfspace")
        if not self.W.any(axis=1).all():
            raise ValueError("every halfspace needs a nonzero weight")

    def predict(self, X) -> np.ndarray:
        Z = np.asarray(X, dtype=np.int64) @ self.W.T
        return (Z >= self.b).all(axis=1).astype(np.int8)


@dataclass
class ParityHypothesis:
    """chi_S over {0,1}^n; ``S`` is a boolean mask."""

    S: np.ndarray

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=bool)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        return (X[:, self.S].sum(axis=1) & 1).astype(np.int8)


@dataclass
class Automaton:
    """Acyclic DFA over {-1,+1}, read left to right on inputs of length n.

    ``delta[s, c]`` is the successor of state s on symbol c (c = 0 for -1,
    1 for +1); states with no successor hold -1.
    """

    n: int
    start: int
    delta: np.ndarray
    accepting: np.ndarray = field(default=None)

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=np.int64)
        self.accepting = np.asarray(self.accepting, dtype=bool)

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X).reshape(-1, self.n)
        s = np.full(len(X), self.start, dtype=np.int64)
        for i in range(self.n):
            s = self.delta[s, (X[:, i] > 0).astype(np.int64)]
            if (s < 0).any():
                raise ValueError("automaton is not total on inputs of this length")
        return self.accepting[s].astype(np.int8)

    def is_layered(self) -> bool:
        """Acyclic by layer: every reachable transition moves one layer on."""
        layer = {self.start: 0}
        frontier = [self.start]
        for depth in range(self.n):
            nxt = []
            for s in frontier:
                for c in (0, 1):
                    t = int(self.delta[s, c])
                    if t < 0:
                        return False
                    if t in layer and layer[t] != depth + 1:
                        return False
                    if t not in layer:
                        layer[t] = depth + 1
                        nxt.append(t)
            frontier = nxt
        return True

    def to_json(self) -> dict:
        return {"type": "automaton", "n": self.n, "start": self.start,
                "delta": self.delta.tolist(),
                "accepting": np.flatnonzero(self.accepting).tolist()}

    @classmethod
    def from_json(cls, obj) -> "Automaton":
        delta = np.array(obj["delta"], dtype=np.int64).reshape(-1, 2)
        acc = np.zeros(len(delta), dtype=bool)
        acc[np.array(obj["accepting"], dtype=np.int64)] = True
        return cls(int(obj["n"]), int(obj["start"]), delta, acc)


# -- DNF reduction ----------------------------------------------------------

def dnf_shift_alternate(J: Instance, y) -> Instance:
    """Multiply the signs of every second constraint (2nd, 4th, ...) by y."""
    y = np.asarray(y, dtype=np.int8)
    if y.shape != (J.K,):
        raise ValueError(f"shift vector must have length {J.K}")
    signs = J.signs.copy()
    signs[1::2] *= y
    return Instance(J.n, J.predicate, J.vars, signs)


def psi_index(l: int, b: int, i: int, n: int) -> int:
    """Flat coordinate of (l, b, i) in [K] x {-1,+1} x [n], all 0-based."""
    return (2 * l + (1 if b == 1 else 0)) * n + i


def psi_embed_batch(vars, signs, n: int) -> np.ndarray:
    vars = np.asarray(vars, dtype=np.int64)
    signs = np.asarray(signs)
    m, K = vars.shape
    out = np.ones((m, 2 * K * n), dtype=np.int8)
    l = np.arange(K)
    cols = (2 * l + (-signs == 1)) * n + vars
    out[np.arange(m)[:, None], cols] = -1
    return out


def psi_embed(C, K: int, n: int) -> np.ndarray:
    """(Psi(C))_{l,b,i} = -1 exactly when (b, i) = (-j_l, i_l)."""
    if len(C.vars) != K:
        raise ValueError("constraint arity differs from K")
    return psi_embed_batch([C.vars], [C.signs], n)[0]


def psi_decode(x, K: int, n: int):
    """Inverse of psi_embed on its image: recover (vars, signs)."""
    x = np.asarray(x).reshape(K, 2, n)
    vars, signs = [], []
    for l in range(K):
        hits = np.argwhere(x[l] == -1)
        if len(hits) != 1:
            raise ValueError(f"block {l} is not a valid literal code")
        b, i = hits[0]
        vars.append(int(i))
        signs.append(1 if b == 0 else -1)
    return tuple(vars), tuple(signs)


def dnf_sample(J: Instance) -> LabeledSample:
    """Psi-embed every constraint; labels alternate 1, 0, 1, 0, ..."""
    if J.m % 2:
        raise ValueError("the DNF reduction needs an even number of constraints")
    X = psi_embed_batch(J.vars, J.signs, J.n)
    y = np.tile(np.array([1, 0], dtype=np.uint8), J.m // 2)
    return LabeledSample("PM", 2 * J.K * J.n, X, y, check=False)


def phi_u_formula(u, P, n: int) -> DnfFormula:
    """One clause per satisfying point b of P: AND over r, i of
    x_{r, u_i b_r, i} = +1.  Then phi_u(Psi(C)) = C(u) for every C."""
    pred._require_table(P)
    u = np.asarray(u)
    if u.shape != (n,):
        raise ValueError(f"u must have length {n}")
    K = P.arity
    clauses = []
    for b in P.satisfying_points():
        clauses.append([(psi_index(r, int(u[i] * b[r]), i, n), 1)
                        for r in range(K) for i in range(n)])
    return DnfFormula(2 * K * n, clauses)


def phi_u_eval(u, P, X, n: int) -> np.ndarray:
    """Evaluate phi_u on rows of X without materialising its clauses.

    A clause b is satisfied iff, for every r, the block (r, ., .) is +1 on
    all coordinates (u_i b_r, i); reading off the unique -1 per block gives
    a point that must be a satisfying point of P.
    """
    K = P.arity
    X = np.asarray(X).reshape(-1, K, 2, n)
    u = np.asarray(u)
    m = len(X)
    ok = np.ones(m, dtype=bool)
    pts = np.zeros((m, K), dtype=np.int8)
    for r in range(K):
        # b_r = +1 requires x[r, u_i, i] = 1 for all i; b_r = -1 requires x[r, -u_i, i] = 1
        bpos = (u == 1).astype(np.int64)        # slot index of value u_i
        plus_ok = (X[:, r, bpos, np.arange(n)] == 1).all(axis=1)
        minus_ok = (X[:, r, 1 - bpos, np.arange(n)] == 1).all(axis=1)
        # a block may allow both values only if it has no -1 in either slot
        pts[:, r] = np.where(plus_ok, 1, -1)
        ok &= plus_ok | minus_ok
        both = plus_ok & minus_ok
        if both.any():
            raise ValueError("phi_u_eval expects inputs in the image of Psi")
    return (ok & P.eval_points(pts).astype(bool)).astype(np.int8)


def pad_embed(S: LabeledSample, target_dim: int) -> LabeledSample:
    if target_dim < S.d:
        raise ValueError("target dimension below current dimension")
    pad = np.ones((S.m, target_dim - S.d), dtype=np.int8)
    return LabeledSample(S.domain, target_dim, np.hstack([S.X, pad]), S.y, check=False)


# -- halfspaces -------------------------------------------------------------

def _require_family(J, family):
    if getattr(J.predicate, "family", None) != family:
        raise ValueError(f"expected a {family} instance, got {J.predicate.name}")


def constraint_vectors(J: Instance) -> np.ndarray:
    """u(C): the vector with j_l in coordinate i_l, zero elsewhere."""
    U = np.zeros((J.m, J.n), dtype=np.int8)
    U[np.arange(J.m)[:, None], J.vars] = J.signs
    return U


def halfspace_sample(J: Instance) -> LabeledSample:
    """Examples (u(C), 1), (-u(C), 0) for each majority constraint, in order."""
    _require_family(J, "maj")
    if J.K % 2 == 0:
        raise ValueError("majority arity must be odd")
    U = constraint_vectors(J)
    X = np.empty((2 * J.m, J.n), dtype=np.int8)
    X[0::2], X[1::2] = U, -U
    y = np.tile(np.array([1, 0], dtype=np.uint8), J.m)
    return LabeledSample("TRI", J.n, X, y, check=False)


def tri_to_pm(S: LabeledSample) -> LabeledSample:
    """psi(-1)=(-1,-1), psi(1)=(1,1), psi(0)=(-1,1), applied coordinatewise."""
    if S.domain != "TRI":
        raise ValueError("tri_to_pm expects a TRI sample")
    X = np.empty((S.m, 2 * S.d), dtype=np.int8)
    X[:, 0::2] = np.where(S.X == 0, -1, S.X)
    X[:, 1::2] = np.where(S.X == 0, 1, S.X)
    return LabeledSample("PM", 2 * S.d, X, S.y, check=False)


def weights_lift(w) -> np.ndarray:
    return np.repeat(np.asarray(w, dtype=np.int64), 2)


# -- parity -----------------------------------------------------------------

def parity_sample(J: Instance) -> LabeledSample:
    """Indicator of the constraint's variables, labelled 1 xor b.

    In 0/1 form a constraint reads x_{i_1} + ... + x_{i_K} + b, where b is
    the parity of its negated literals, and is satisfied when that sum is
    odd.  With the label 1 xor b, an assignment satisfies C exactly when
    chi_S predicts the label (S = coordinates set to 1).
    """
    _require_family(J, "parity")
    U = np.zeros((J.m, J.n), dtype=np.int8)
    U[np.arange(J.m)[:, None], J.vars] = 1
    b = ((J.signs < 0).sum(axis=1) & 1).astype(np.uint8)
    return LabeledSample("BIN", J.n, U, 1 - b, check=False)


def parity_witness(a) -> ParityHypothesis:
    return ParityHypothesis(np.asarray(a) > 0)


# -- intersection of four halfspaces ---------------------------------------

def inter4_sample(J: Instance) -> LabeledSample:
    """Two examples per P_k constraint over TRI(4n).

    Positive: literal (q, l) of blocks q = 1..4 written at n(q-1) + i_{q,l}.
    Negative: blocks q = 5..8 written at n(q-5) + i_{q,l}.
    """
    _require_family(J, "pk8")
    k = J.K // 8
    n, m = J.n, J.m
    V = J.vars.reshape(m, 8, k)
    Sg = J.signs.reshape(m, 8, k)
    X = np.zeros((2 * m, 4 * n), dtype=np.int8)
    rows = np.arange(m)[:, None, None]
    off = (n * np.arange(4))[None, :, None]
    X[2 * rows, off + V[:, :4]] = Sg[:, :4]
    X[2 * rows + 1, off + V[:, 4:]] = Sg[:, 4:]
    y = np.tile(np.array([1, 0], dtype=np.uint8), m)
    return LabeledSample("TRI", 4 * n, X, y, check=False)


def inter4_witness(u, k: int) -> IntersectionHypothesis:
    """sum_i u_i x_{n(q-1)+i} >= 2*ceil(k/2) - 2 - k for q = 1..4.

    The bound is -1 for odd k; it is the sum of k literals with exactly the
    block threshold ceil(k/2) - 1 of them true.
    """
    u = np.asarray(u, dtype=np.int64)
    n = len(u)
    W = np.zeros((4, 4 * n), dtype=np.int64)
    for q in range(4):
        W[q, q * n:(q + 1) * n] = u
    t = 2 * (-(-k // 2) - 1) - k
    return IntersectionHypothesis(W, np.full(4, t))


# -- automata ---------------------------------------------------------------

def dnf_to_automaton(F: DnfFormula) -> Automaton:
    """Layered automaton tracking the set A of clauses not yet violated.

    State (i, A) after reading x_1..x_i is numbered 1 + (i-1) 2^c + A; the
    start state is 0.  Accepts iff A is nonempty after the last symbol.
    """
    c = len(F.clauses)
    if c > MAX_AUTOMATON_CLAUSES:
        raise ValueError(f"{c} clauses exceed the automaton budget {MAX_AUTOMATON_CLAUSES}")
    n = F.d
    W = 1 << c
    # kill[i, s]: clauses violated by reading symbol s at position i
    kill = np.zeros((n, 2), dtype=np.int64)
    for t, cl in enumerate(F.clauses):
        for v, s in cl:
            kill[v, 0 if s == 1 else 1] |= 1 << t
    A = np.arange(W, dtype=np.int64)
    delta = np.full((n * W + 1, 2), -1, dtype=np.int64)
    full = W - 1
    for s in (0, 1):
        delta[0, s] = 1 + (full & ~kill[0, s])
    for i in range(1, n):
        base = 1 + (i - 1) * W
        for s in (0, 1):
            delta[base + A, s] = 1 + i * W + (A & ~kill[i, s])
    accepting = np.zeros(n * W + 1, dtype=bool)
    accepting[1 + (n - 1) * W + 1: 1 + n * W] = True
    return Automaton(n, 0, delta, accepting)


# -- 3-SAT to T_{k,l} -------------------------------------------------------

def guard_patterns(k: int, l: int) -> np.ndarray:
    """Sign patterns in {+-1}^k with at most k - l minus signs, by minus count."""
    rows = []
    for s in range(k - l + 1):
        for neg in itertools.combinations(range(k), s):
            r = np.ones(k, dtype=np.int8)
            r[list(neg)] = -1
            rows.append(r)
    return np.array(rows, dtype=np.int8)


def tkl_constraints_per_clause(k: int, l: int) -> int:
    return 1 + sum(comb(k, s) for s in range(k - l + 1))


def threesat_to_tkl(J3: Instance, k: int, l: int) -> Instance:
    """Reduce a SAT_3 instance to CSP(T_{k,l}).

    Clause c gets a fresh block of k + l - 1 variables starting at
    n + c(k + l - 1): x^c_1..x^c_k then y^c_4..y^c_{l+2}.  Its constraints
    are the bridge T(j1 x_i1, j2 x_i2, j3 x_i3, y_4..y_{l+2}, -x_{l+3}..-x_k)
    followed by one guard T(j . x^c) per pattern with at most k - l minuses.
    """
    if J3.K != 3 or J3.predicate != pred.sat(3):
        raise ValueError("source must be a SAT_3 instance")
    if not 1 <= l <= k - 2:
        raise ValueError("need 1 <= l <= k - 2")
    T = pred.threshold(k, l)
    n, width = J3.n, k + l - 1
    guards = guard_patterns(k, l)
    vars, signs = [], []
    for c in range(J3.m):
        base = n + c * width
        xs = [base + s for s in range(k)]
        ys = [base + k + t for t in range(l - 1)]
        bv = [int(v) for v in J3.vars[c]] + ys + xs[l + 2:]
        bs = [int(s) for s in J3.signs[c]] + [1] * (l - 1) + [-1] * (k - l - 2)
        vars.append(bv)
        signs.append(bs)
        for g in guards:
            vars.append(xs)
            signs.append(g.tolist())
    return Instance(n + J3.m * width, T, np.array(vars).reshape(-1, k),
                    np.array(signs).reshape(-1, k))


def tkl_core(J3: Instance) -> range:
    """Original variables of a threesat_to_tkl output, for exact_value(core=...)."""
    return range(J3.n)
