"""Clause-level resolution: axioms, DPLL with tree-like trace extraction,
trace checking, and the expansion condition behind the width bound.

Literals are signed 1-based integers: ``+(v+1)`` is satisfied when
``x_v = +1`` and ``-(v+1)`` when ``x_v = -1``.
"""

from __future__ import annotations

import io
import itertools
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import predicates as pred
from .instances import Instance

EXHAUSTIVE_SUBSET_LIMIT = 10 ** 6


def make_clause(lits) -> tuple:
    """Canonical clause: sorted by variable, duplicate literals merged."""
    lits = set(int(l) for l in lits)
    if 0 in lits:
        raise ValueError("0 is not a literal")
    vars_ = [abs(l) for l in lits]
    if len(set(vars_)) != len(vars_):
        raise ValueError(f"clause mentions a variable twice: {sorted(lits)}")
    return tuple(sorted(lits, key=lambda l: (abs(l), l)))


def constraint_axioms(P, vars, signs) -> list:
    """One width-K clause per falsifying point b of P, forbidding it.

    The literal on position l is s_l x_{v_l} != b_l, i.e. x_{v_l} = -s_l b_l.
    """
    pred._require_table(P)
    out = []
    for b in P.falsifying_points():
        out.append(make_clause(int(-s * bb) * (int(v) + 1) for v, s, bb in zip(vars, signs, b)))
    return out


def instance_axioms(J: Instance) -> list:
    return [constraint_axioms(J.predicate, J.vars[c], J.signs[c]) for c in range(J.m)]


def clause_satisfied(clause, a) -> bool:
    return any((a[abs(l) - 1] > 0) == (l > 0) for l in clause)


# -- traces -----------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    clause: tuple
    kind: str                      # "AXIOM" or "RES"
    refs: tuple                    # (j,) or (i1, i2, pivot); 0-based indices, pivot is a var number


@dataclass
class ResolutionTrace:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def add(self, clause, kind, refs) -> int:
        self.steps.append(TraceStep(tuple(clause), kind, tuple(refs)))
        return len(self.steps) - 1

    def width(self) -> int:
        return max((len(s.clause) for s in self.steps), default=0)

    def dumps(self) -> str:
        """``idx : lits | AXIOM j`` or ``idx : lits | RES i1 i2 pivot`` (1-based)."""
        buf = io.StringIO()
        for i, s in enumerate(self.steps):
            lits = " ".join(str(l) for l in s.clause)
            if s.kind == "AXIOM":
                tag = f"AXIOM {s.refs[0] + 1}"
            else:
                tag = f"RES {s.refs[0] + 1} {s.refs[1] + 1} {s.refs[2]}"
            buf.write(f"{i + 1} : {lits} | {tag}\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "ResolutionTrace":
        tr = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                head, rest = line.split(":", 1)
                lits, tag = rest.split("|", 1)
                idx = int(head)
                toks = tag.split()
                if idx != len(tr.steps) + 1:
                    raise ValueError(f"expected index {len(tr.steps) + 1}, got {idx}")
                clause = tuple(int(t) for t in lits.split())
                if toks[0] == "AXIOM" and len(toks) == 2:
                    tr.steps.append(TraceStep(clause, "AXIOM", (int(toks[1]) - 1,)))
                elif toks[0] == "RES" and len(toks) == 4:
                    tr.steps.append(TraceStep(clause, "RES",
                                              (int(toks[1]) - 1, int(toks[2]) - 1, int(toks[3]))))
                else:
                    raise ValueError(f"bad tag {tag.strip()!r}")
            except (ValueError, IndexError) as e:
                raise ValueError(f"trace line {lineno}: {e}") from None
        return tr


@dataclass
class CheckResult:
    ok: bool
    index: int | None = None       # 0-based index of the first bad step
    reason: str = ""

    def __bool__(self):
        return self.ok


def resolve(c1, c2, pivot: int) -> tuple:
    if pivot not in c1 and -pivot not in c1:
        raise ValueError("pivot absent from first clause")
    rest = set(c1) | set(c2)
    rest.discard(pivot)
    rest.discard(-pivot)
    return make_clause(rest)


def check_trace(J: Instance, trace: ResolutionTrace) -> CheckResult:
    """Accept iff every step is a weakening of one of its constraint's axiom
    clauses or a correct resolvent of earlier steps, and the last is empty."""
    axioms = {}
    for i, s in enumerate(trace.steps):
        try:
            clause = make_clause(s.clause)
        except ValueError as e:
            return CheckResult(False, i, str(e))
        if clause != tuple(sorted(s.clause, key=lambda l: (abs(l), l))):
            return CheckResult(False, i, "clause repeats a literal")
        if any(abs(l) > J.n for l in clause):
            return CheckResult(False, i, "literal variable out of range")
        if s.kind == "AXIOM":
            j = s.refs[0]
            if not 0 <= j < J.m:
                return CheckResult(False, i, f"constraint {j + 1} does not exist")
            if j not in axioms:
                axioms[j] = [set(a) for a in constraint_axioms(J.predicate, J.vars[j], J.signs[j])]
            cs = set(clause)
            if not any(a <= cs for a in axioms[j]):
                return CheckResult(False, i, f"not implied by constraint {j + 1}")
        elif s.kind == "RES":
            i1, i2, p = s.refs
            if not (0 <= i1 < i and 0 <= i2 < i):
                return CheckResult(False, i, "resolvent refers to a later or missing step")
            if p <= 0:
                return CheckResult(False, i, "pivot must be a positive variable number")
            c1, c2 = set(trace.steps[i1].clause), set(trace.steps[i2].clause)
            if not ((p in c1 and -p in c2) or (-p in c1 and p in c2)):
                return CheckResult(False, i, f"pivot {p} does not clash between the parents")
            want = (c1 | c2) - {p, -p}
            if any(-l in want for l in want):
                return CheckResult(False, i, "resolvent is tautological")
            if set(clause) != want:
                return CheckResult(False, i, "resolvent does not match its parents")
        else:
            return CheckResult(False, i, f"unknown step kind {s.kind!r}")
    if not trace.steps:
        return CheckResult(False, None, "empty trace")
    if trace.steps[-1].clause:
        return CheckResult(False, len(trace.steps) - 1, "last clause is not empty")
    return CheckResult(True)


# -- DPLL -------------------------------------------------------------------

@dataclass
class DpllResult:
    verdict: str                   # "SAT", "UNSAT" or "BUDGET"
    witness: np.ndarray | None = None
    trace: ResolutionTrace | None = None
    tree_size: int = 0
    propagations: int = 0
    wall_ms: float = 0.0


class _Budget(Exception):
    pass


class _Solver:
    def __init__(self, J: Instance, rule: str, rng, node_budget):
        self.n = J.n
        self.clauses = []
        self.origin = []
        for c, axs in enumerate(instance_axioms(J)):
            for a in axs:
                self.clauses.append(a)
                self.origin.append(c)
        self.occ = {}
        for ci, cl in enumerate(self.clauses):
            for l in cl:
                self.occ.setdefault(l, []).append(ci)
        self.val = [0] * (self.n + 1)     # by 1-based var
        self.rule = rule
        self.rng = rng
        self.budget = node_budget
        self.nodes = 0
        self.props = 0
        self.trace = ResolutionTrace()
        self.axiom_idx = {}

    def axiom(self, ci) -> int:
        t = self.axiom_idx.get(ci)
        if t is None:
            t = self.trace.add(self.clauses[ci], "AXIOM", (self.origin[ci],))
            self.axiom_idx[ci] = t
        return t

    def lit_value(self, l):
        v = self.val[abs(l)]
        return 0 if v == 0 else (1 if (v > 0) == (l > 0) else -1)

    def propagate(self, pending, reasons, order):
        """Assign pending literals and unit-propagate.  On conflict returns a
        reference to the falsified clause: ("axiom", clause) or ("clause", trace index)."""
        queue = list(pending)
        while queue:
            lit, reason = queue.pop(0)
            v = abs(lit)
            cur = self.lit_value(lit)
            if cur == 1:
                continue
            if cur == -1:
                return reason          # the unit's reason clause is now falsified
            self.val[v] = 1 if lit > 0 else -1
            order.append(v)
            if reason is not None:
                reasons[v] = reason
                self.props += 1
            for ci in self.occ.get(-lit, ()):
                unassigned = None
                nun = 0
                sat = False
                for l in self.clauses[ci]:
                    lv = self.lit_value(l)
                    if lv == 1:
                        sat = True
                        break
                    if lv == 0:
                        nun += 1
                        unassigned = l
                if sat:
                    continue
                if nun == 0:
                    return ("axiom", ci)
                if nun == 1:
                    queue.append((unassigned, ("axiom", ci)))
        return None

    def open_clauses(self):
        return [ci for ci, cl in enumerate(self.clauses)
                if not any(self.lit_value(l) == 1 for l in cl)]

    def choose(self, open_cls):
        counts = {}
        for ci in open_cls:
            for l in self.clauses[ci]:
                if self.val[abs(l)] == 0:
                    counts[abs(l)] = counts.get(abs(l), 0) + 1
        if not counts:
            return None
        if self.rule == "first":
            return min(counts)
        if self.rule == "maxocc":
            return max(sorted(counts), key=lambda v: counts[v])
        cands = sorted(counts)
        return cands[int(self.rng.integers(len(cands)))]

    def ref_index(self, ref) -> int:
        kind, x = ref
        return self.axiom(x) if kind == "axiom" else x

    def explain(self, idx, reasons, order):
        """Resolve away the variables propagated at this node, latest first."""
        clause = self.trace.steps[idx].clause
        pos = {v: t for t, v in enumerate(order)}
        while True:
            cand = [abs(l) for l in clause if abs(l) in reasons]
            if not cand:
                return idx
            v = max(cand, key=pos.__getitem__)
            r = self.ref_index(reasons[v])
            new = resolve(clause, self.trace.steps[r].clause, v)
            idx = self.trace.add(new, "RES", (idx, r, v))
            clause = new

    def search(self):
        """Returns (trace index of the final clause or None, witness or None)."""
        self.witness = None
        return self.node([]), self.witness

    def node(self, pending):
        """None if satisfiable below; otherwise the trace index of a clause
        falsified by the assignment in force on entry to this node."""
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _Budget()
        reasons, order = {}, []
        try:
            conflict = self.propagate(pending, reasons, order)
            if conflict is not None:
                return self.explain(self.ref_index(conflict), reasons, order)
            x = self.choose(self.open_clauses())
            if x is None:
                self.witness = np.array([1 if v >= 0 else -1 for v in self.val[1:]],
                                        dtype=np.int8)
                return None
            kids = []
            for lit in (x, -x):
                r = self.node([(lit, None)])
                if r is None:
                    return None
                kids.append(r)
                if -lit not in self.trace.steps[r].clause:
                    # the branch literal was not used: the sibling is skipped
                    return self.explain(r, reasons, order)
            c1, c2 = kids
            res = resolve(self.trace.steps[c1].clause, self.trace.steps[c2].clause, x)
            idx = self.trace.add(res, "RES", (c1, c2, x))
            return self.explain(idx, reasons, order)
        finally:
            for v in order:
                self.val[v] = 0


BRANCHING_RULES = ("first", "maxocc", "random")


def dpll_refute(J: Instance, rule: str = "first", node_budget: int | None = 1_000_000,
                rng=None) -> DpllResult:
    """DPLL with unit propagation; an UNSAT run yields a tree-like refutation.

    ``tree_size`` counts search nodes (one per propagation round).
    Unassigned variables of a SAT witness are set to +1.
    """
    if rule not in BRANCHING_RULES:
        raise ValueError(f"rule must be one of {BRANCHING_RULES}")
    if rule == "random" and rng is None:
        rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    solver = _Solver(J, rule, rng, node_budget)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * J.n + 1000))
    try:
        idx, witness = solver.search()
    except _Budget:
        return DpllResult("BUDGET", tree_size=solver.nodes, propagations=solver.props,
                          wall_ms=1000 * (time.perf_counter() - t0))
    finally:
        sys.setrecursionlimit(old)
    ms = 1000 * (time.perf_counter() - t0)
    if idx is None:
        return DpllResult("SAT", witness=witness, tree_size=solver.nodes,
                          propagations=solver.props, wall_ms=ms)
    return DpllResult("UNSAT", trace=solver.trace, tree_size=solver.nodes,
                      propagations=solver.props, wall_ms=ms)


# -- expansion and width ----------------------------------------------------

def private_counts(J: Instance, subset) -> np.ndarray:
    """Per constraint in ``subset``: variables appearing in no other member."""
    V = J.vars[list(subset)]
    vals, counts = np.unique(V, return_counts=True)
    once = set(vals[counts == 1].tolist())
    return np.array([sum(int(v) in once for v in row) for row in V], dtype=np.int64)


def subset_expands(J: Instance, subset, threshold: int) -> bool:
    """Strictly more than half of the subset has >= threshold private variables."""
    pc = private_counts(J, subset)
    return 2 * int((pc >= threshold).sum()) > len(pc)


@dataclass
class ExpansionReport:
    status: str                    # verified_exhaustive, verified_sampled or violated
    l: int
    threshold: int
    checked: int
    witness: tuple | None = None
    confidence: float | None = None
    width_bound: Fraction | None = None


def default_private_threshold(P) -> int:
    """K - VAR_0 + 1 private variables: with at most VAR_0 - 1 positions
    fixed from outside, a constraint can always be re-satisfied."""
    return P.arity - int(pred.var0(P)) + 1


def expansion_check(J: Instance, l: int, subset_trials: int = 10_000, rng=None,
                    threshold: int | None = None) -> ExpansionReport:
    """Check that every subset of 2..l constraints expands.

    Exhaustive when the number of such subsets is at most 10^6, otherwise
    ``subset_trials`` random subsets (sizes uniform in 2..l).  Singletons
    expand trivially.  On success the width of any refutation is at least l/6.
    """
    if l > J.m:
        raise ValueError(f"l={l} exceeds the number of constraints {J.m}")
    if threshold is None:
        threshold = default_private_threshold(J.predicate)
    total = sum(math.comb(J.m, t) for t in range(2, l + 1))
    if total <= EXHAUSTIVE_SUBSET_LIMIT:
        checked = 0
        for t in range(2, l + 1):
            for I in itertools.combinations(range(J.m), t):
                checked += 1
                if not subset_expands(J, I, threshold):
                    return ExpansionReport("violated", l, threshold, checked, I)
        return ExpansionReport("verified_exhaustive", l, threshold, checked,
                               width_bound=Fraction(l, 6))
    if rng is None:
        rng = np.random.default_rng(0)
    for trial in range(subset_trials):
        t = int(rng.integers(2, l + 1))
        I = tuple(sorted(rng.choice(J.m, size=t, replace=False).tolist()))
        if not subset_expands(J, I, threshold):
            return ExpansionReport("violated", l, threshold, trial + 1, I)
    # one-sided 95% bound on the fraction of violating subsets
    conf = 1 - 0.05 ** (1 / subset_trials)
    return ExpansionReport("verified_sampled", l, threshold, subset_trials,
                           confidence=conf, width_bound=Fraction(l, 6))


def bw_length_bound(width_lb, n: int) -> dict:
    """Exponent scale width^2 / n of the length bound 2^(Omega(width^2/n)).

    Constant-free: the hidden constant is not estimated.
    """
    e = Fraction(width_lb) ** 2 / n
    return {"exponent": e, "constant_free": True}


# -- sweeps -----------------------------------------------------------------

SWEEP_FIELDS = ["n", "m", "rule", "seed", "verdict", "tree_size", "wall_ms"]


def sweep_row(J: Instance, rule: str, seed: int, res: DpllResult) -> dict:
    return {"n": J.n, "m": J.m, "rule": rule, "seed": seed, "verdict": res.verdict,
            "tree_size": res.tree_size, "wall_ms": round(res.wall_ms, 3)}
