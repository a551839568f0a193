"""Scattered ensembles, the learner-wrapping distinguisher and reference learners."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import optimize, stats

from . import instances as inst
from . import predicates as pred
from . import reductions as red


# -- error and intervals ----------------------------------------------------

def empirical_error(h, S) -> Fraction:
    """Fraction of examples on which h disagrees with the label."""
    if S.m == 0:
        return Fraction(0)
    d = getattr(h, "d", None)
    if d is not None and d != S.d:
        raise ValueError(f"hypothesis dimension {d} differs from sample dimension {S.d}")
    pred_y = np.asarray(h.predict(S.X))
    return Fraction(int((pred_y != S.y.astype(np.int8)).sum()), S.m)


def wilson_interval(k: int, n: int, confidence: float = 0.95):
    ci = stats.binomtest(k, n).proportion_ci(confidence, method="wilson")
    return ci.low, ci.high


def clopper_pearson(k: int, n: int, confidence: float = 0.95):
    ci = stats.binomtest(k, n).proportion_ci(confidence, method="exact")
    return ci.low, ci.high


# -- simple fixed hypotheses -----------------------------------------------

@dataclass
class ConstantHypothesis:
    value: int

    def predict(self, X):
        return np.full(len(X), self.value, dtype=np.int8)


@dataclass
class ComplementHypothesis:
    base: object

    def predict(self, X):
        p = np.asarray(self.base.predict(X))
        return np.where(p < 0, -1, 1 - p).astype(np.int8)


class MajorityHypothesis:
    """1 iff the coordinates sum to a positive value (ties give 0)."""

    def predict(self, X):
        return (np.asarray(X, dtype=np.int64).sum(axis=1) > 0).astype(np.int8)


class TableHypothesis:
    """A full truth table over PM(d), indexed like predicate tables."""

    def __init__(self, d: int, table):
        self.d = d
        self.table = np.asarray(table, dtype=np.int8).reshape(1 << d)

    @classmethod
    def random(cls, d: int, rng):
        return cls(d, rng.integers(0, 2, size=1 << d))

    def predict(self, X):
        X = np.asarray(X)
        idx = ((X > 0).astype(np.int64) << np.arange(self.d)).sum(axis=-1)
        return self.table[idx]


class LookupHypothesis:
    """Memorised labels for seen points, ``default`` elsewhere."""

    def __init__(self, memory: dict, default: int = 0):
        self.memory = memory
        self.default = default

    def predict(self, X):
        return np.array([self.memory.get(np.asarray(x, dtype=np.int8).tobytes(), self.default)
                         for x in X], dtype=np.int8)


# -- ensembles --------------------------------------------------------------

def hoeffding_alternating_p(m: int) -> float:
    return 9 * m / 100


def hoeffding_pairs_p(m: int) -> float:
    return m / 8


@dataclass
class EnsembleSpec:
    """A sample distribution with a declared (p(m), eps) scattering target.

    ``kind`` is ``"alternating"`` (i.i.d. points, labels 1,0,1,0,...) or
    ``"uniform_pairs"`` (i.i.d. points and i.i.d. fair labels).
    ``draw_points(rng, shape)`` returns points of shape ``shape + (d,)``;
    ``support`` (optional) returns every point of an equiprobable support.
    """

    kind: str
    domain: str
    d: int
    eps: Fraction
    p_fn: Callable[[int], float]
    draw_points: Callable
    support: Callable | None = None
    name: str = ""

    def bound(self, m: int) -> float:
        return 2.0 ** (-self.p_fn(m))

    def labels(self, rng, trials: int, m: int) -> np.ndarray:
        if self.kind == "alternating":
            return np.broadcast_to(np.tile(np.array([1, 0], dtype=np.int8), m // 2), (trials, m))
        return rng.integers(0, 2, size=(trials, m)).astype(np.int8)

    def sample(self, rng, m: int) -> red.LabeledSample:
        if self.kind == "alternating" and m % 2:
            raise ValueError("alternating ensembles need even m")
        X = self.draw_points(rng, (m,))
        y = self.labels(rng, 1, m)[0]
        return red.LabeledSample(self.domain, self.d, X, y, check=False)


def _uniform_pm(d):
    def draw(rng, shape):
        return (2 * rng.integers(0, 2, size=shape + (d,), dtype=np.int8) - 1).astype(np.int8)
    return draw


def alternating_ensemble(d: int, eps=Fraction(1, 5)) -> EnsembleSpec:
    """Uniform points of PM(d) with alternating labels."""
    return EnsembleSpec("alternating", "PM", d, Fraction(eps), hoeffding_alternating_p,
                        _uniform_pm(d), lambda: pred.all_points(d), f"alternating-pm{d}")


def uniform_pairs_ensemble(d: int, eps=Fraction(1, 4)) -> EnsembleSpec:
    """Uniform points of PM(d) with independent fair labels."""
    return EnsembleSpec("uniform_pairs", "PM", d, Fraction(eps), hoeffding_pairs_p,
                        _uniform_pm(d), lambda: pred.all_points(d), f"pairs-pm{d}")


def sparse_sign_ensemble(n: int, K: int, eps=Fraction(1, 5)) -> EnsembleSpec:
    """Uniform K-sparse sign vectors of TRI(n) with alternating labels; the
    point law of the halfspace reduction on random majority instances."""
    def draw(rng, shape):
        count = int(np.prod(shape)) if shape else 1
        out = np.zeros((count, n), dtype=np.int8)
        keys = rng.random((count, n))
        cols = np.argsort(keys, axis=1)[:, :K]
        out[np.arange(count)[:, None], cols] = rng.choice(np.array([-1, 1], dtype=np.int8),
                                                          size=(count, K))
        return out.reshape(shape + (n,))
    return EnsembleSpec("alternating", "TRI", n, Fraction(eps), hoeffding_alternating_p,
                        draw, None, f"sparse-{n}-{K}")


# -- scattering checks ------------------------------------------------------

@dataclass
class ScatterReport:
    m: int
    trials: int
    hits: int
    estimate: float
    ci_low: float
    ci_high: float
    bound: float
    exact: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.ci_high <= self.bound


def scatter_check_fixed(h, ensemble: EnsembleSpec, m: int, trials: int, rng,
                        chunk: int = 10_000, exact: bool = False) -> ScatterReport:
    """Monte-Carlo estimate of Pr_S(Err_S(h) <= eps) for a fixed h.

    The 95% interval is Clopper-Pearson, which stays valid with zero hits.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if ensemble.kind == "alternating" and m % 2:
        raise ValueError("alternating ensembles need even m")
    limit = ensemble.eps * m
    hits = 0
    done = 0
    while done < trials:
        t = min(chunk, trials - done)
        X = ensemble.draw_points(rng, (t, m))
        Y = ensemble.labels(rng, t, m)
        H = np.asarray(h.predict(X.reshape(t * m, ensemble.d))).reshape(t, m)
        errs = (H != Y).sum(axis=1)
        hits += int((errs <= limit).sum())
        done += t
    lo, hi = clopper_pearson(hits, trials)
    ex = scatter_exact(h, ensemble, m) if exact else None
    return ScatterReport(m, trials, hits, hits / trials, lo, hi, ensemble.bound(m), ex)


def _binom_pmf(k: int, p: Fraction):
    return [math.comb(k, i) * p ** i * (1 - p) ** (k - i) for i in range(k + 1)]


def scatter_exact(h, ensemble: EnsembleSpec, m: int) -> Fraction:
    """Exact Pr_S(Err_S(h) <= eps) for an ensemble with an enumerable support.

    Only the per-example disagreement law matters: with q = Pr(h(X) = 1),
    the number of errors is Bin(m/2, 1-q) + Bin(m/2, q) for the alternating
    ensemble and Bin(m, 1/2) for uniform pairs.
    """
    limit = ensemble.eps * m
    if ensemble.kind == "uniform_pairs":
        pmf = _binom_pmf(m, Fraction(1, 2))
    else:
        if ensemble.support is None:
            raise ValueError("ensemble has no enumerable support")
        pts = ensemble.support()
        vals = np.asarray(h.predict(pts))
        q = Fraction(int((vals == 1).sum()), len(pts))
        q0 = Fraction(int((vals == 0).sum()), len(pts))
        a = _binom_pmf(m // 2, 1 - q)          # errors on label-1 slots
        b = _binom_pmf(m // 2, 1 - q0)         # errors on label-0 slots
        pmf = [Fraction(0)] * (m + 1)
        for i, pa in enumerate(a):
            if pa:
                for j, pb in enumerate(b):
                    pmf[i + j] += pa * pb
    return sum((p for e, p in enumerate(pmf) if e <= limit), Fraction(0))


def scatter_enumerate_patterns(h, ensemble: EnsembleSpec, m: int) -> Fraction:
    """Brute-force oracle: sum over all 2^m agreement patterns (small m only)."""
    if m > 20:
        raise ValueError("pattern enumeration is limited to m <= 20")
    pts = ensemble.support()
    vals = np.asarray(h.predict(pts))
    q = Fraction(int((vals == 1).sum()), len(pts))
    q0 = Fraction(int((vals == 0).sum()), len(pts))
    limit = ensemble.eps * m
    total = Fraction(0)
    for pat in range(1 << m):
        prob = Fraction(1)
        errs = 0
        for t in range(m):
            wrong = (pat >> t) & 1
            if ensemble.kind == "alternating":
                p_wrong = 1 - q if t % 2 == 0 else 1 - q0
            else:
                p_wrong = Fraction(1, 2)
            prob *= p_wrong if wrong else 1 - p_wrong
            errs += wrong
        if errs <= limit:
            total += prob
    return total


# -- oracles and learners ---------------------------------------------------

class OracleExhausted(RuntimeError):
    pass


class SampleOracle:
    """Uniform draws with replacement from a fixed sample, with a cap."""

    def __init__(self, S, rng, cap: int | None = None):
        self.S = S
        self.rng = rng
        self.cap = cap
        self.used = 0

    def draw(self, k: int):
        if self.cap is not None and self.used + k > self.cap:
            raise OracleExhausted(f"example cap {self.cap} exceeded")
        self.used += k
        idx = self.rng.integers(0, self.S.m, size=k)
        return self.S.X[idx], self.S.y[idx]


def occam_sample_size(n: int, eps: float, delta: float) -> int:
    """Examples that suffice for a consistent learner over 2^n hypotheses."""
    return math.ceil((n * math.log(2) + math.log(1 / delta)) / eps)


def gf2_consistent(A: np.ndarray, b: np.ndarray):
    """Greedy maximal consistent subsystem of A s = b over GF(2).

    Rows are taken in order; a row that contradicts the rows already kept
    is skipped.  Returns (solution with free variables set to 0, kept mask).
    """
    A = np.asarray(A, dtype=np.uint8) & 1
    b = np.asarray(b, dtype=np.uint8) & 1
    n = A.shape[1]
    basis = {}                       # pivot column -> (row bits as int, rhs)
    kept = np.zeros(len(A), dtype=bool)
    weights = 1 << np.arange(n, dtype=object)
    for t in range(len(A)):
        row = int(sum(w for w, a in zip(weights, A[t]) if a))
        rhs = int(b[t])
        while row:
            piv = row.bit_length() - 1
            if piv not in basis:
                break
            r2, b2 = basis[piv]
            row ^= r2
            rhs ^= b2
        if row:
            basis[row.bit_length() - 1] = (row, rhs)
            kept[t] = True
        elif rhs == 0:
            kept[t] = True
    s = 0
    for piv in sorted(basis):
        row, rhs = basis[piv]
        # every other bit of row is a lower pivot or a free (zero) variable
        val = rhs ^ (bin((row & ~(1 << piv)) & s).count("1") & 1)
        if val:
            s |= 1 << piv
    sol = np.array([(s >> j) & 1 for j in range(n)], dtype=bool)
    return sol, kept


def parity_gauss(n: int, eps: float, delta: float, oracle, rng=None):
    """Consistent parity learner: eliminate over GF(2) on an Occam-size draw."""
    X, y = oracle.draw(occam_sample_size(n, eps, delta))
    sol, _ = gf2_consistent(X, y)
    return red.ParityHypothesis(sol)


def _perceptron(X, s, epochs, rng):
    w = np.zeros(X.shape[1])
    best, best_err = w.copy(), len(X) + 1
    for _ in range(epochs):
        for t in rng.permutation(len(X)):
            if s[t] * (X[t] @ w) <= 0:
                w = w + s[t] * X[t]
        err = int((s * (X @ w) <= 0).sum())
        if err < best_err:
            best, best_err = w.copy(), err
        if err == 0:
            break
    return best


def halfspace_lp(n: int, eps: float, delta: float, oracle, rng=None, epochs: int = 50):
    """Homogeneous halfspace by hinge-loss LP on an Occam-size draw.

    Minimises the total slack subject to s_t <w, x_t> >= 1 - xi_t; a pocket
    perceptron takes over if the LP solver fails.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    X, y = oracle.draw(occam_sample_size(n, eps, delta))
    X = np.asarray(X, dtype=np.float64)
    s = np.where(y == 1, 1.0, -1.0)
    m, d = X.shape
    c = np.concatenate([np.zeros(d), np.ones(m)])
    A = np.hstack([-(s[:, None] * X), -np.eye(m)])
    bounds = [(None, None)] * d + [(0, None)] * m
    res = optimize.linprog(c, A_ub=A, b_ub=-np.ones(m), bounds=bounds, method="highs")
    w = res.x[:d] if res.status == 0 else _perceptron(X, s, epochs, rng)
    if not np.any(w):
        w = np.zeros(d)
        w[0] = 1.0
    return red.Halfspace(w)


def lookup_memorizer(n: int, eps: float, delta: float, oracle, rng=None, draws: int | None = None):
    """Memorise every drawn example; only sensible on tiny domains."""
    if draws is None:
        draws = occam_sample_size(n, eps, delta)
    X, y = oracle.draw(draws)
    memory = {np.asarray(x, dtype=np.int8).tobytes(): int(v) for x, v in zip(X, y)}
    return LookupHypothesis(memory)


LEARNERS = {"parity_gauss": parity_gauss, "halfspace_lp": halfspace_lp,
            "lookup_memorizer": lookup_memorizer}


# -- distinguishers ---------------------------------------------------------

@dataclass
class Verdict:
    verdict: str
    error: Fraction | None
    threshold: Fraction
    flagged: bool = False
    examples_used: int = 0
    runtime: float = 0.0
    note: str = ""


def _run_learner(L, S, eps, rng, cap, time_cap):
    oracle = SampleOracle(S, rng, cap)
    t0 = time.perf_counter()
    try:
        h = L(S.d, eps, 0.25, oracle, rng)
    except (OracleExhausted, ValueError, MemoryError) as e:
        return None, oracle.used, time.perf_counter() - t0, str(e)
    dt = time.perf_counter() - t0
    if time_cap is not None and dt > time_cap:
        return None, oracle.used, dt, f"time cap {time_cap}s exceeded"
    return h, oracle.used, dt, ""


def distinguisher_realizable(L, S, beta, rng, example_cap=None, time_cap=None) -> Verdict:
    """Run L with (n, beta, 1/4) on the empirical oracle; 'realizable' iff
    the returned hypothesis has Err_S <= beta."""
    beta = Fraction(beta).limit_denominator(10 ** 9)
    h, used, dt, why = _run_learner(L, S, float(beta), rng, example_cap, time_cap)
    if h is None:
        return Verdict("unrealizable", None, beta, True, used, dt, why)
    err = empirical_error(h, S)
    return Verdict("realizable" if err <= beta else "unrealizable", err, beta, False, used, dt)


def distinguisher_agnostic(L, S, alpha, beta, n, rng, example_cap=None, time_cap=None) -> Verdict:
    """Run L with (n, 1/n, 1/4); 'almost_realizable' iff Err_S <= alpha*beta + 1/n."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if not 0 <= beta < 1:
        raise ValueError("beta must lie in [0, 1)")
    thr = (Fraction(alpha).limit_denominator(10 ** 9) * Fraction(beta).limit_denominator(10 ** 9)
           + Fraction(1, n))
    h, used, dt, why = _run_learner(L, S, 1 / n, rng, example_cap, time_cap)
    if h is None:
        return Verdict("unrealizable", None, thr, True, used, dt, why)
    err = empirical_error(h, S)
    return Verdict("almost_realizable" if err <= thr else "unrealizable", err, thr, False, used, dt)


# -- experiment runner ------------------------------------------------------

DEFAULT_CONFIG = {
    "pipeline": "parity",
    "K": 3,
    "n": 30,
    "m": 120,
    "trials": 200,
    "seed": 0,
    "kind": "planted",
    "beta": 0.2,
    "alpha": 1.0,
    "corruption": 0.0,
}


def pipeline_sample(cfg: dict, rng):
    """Build one sample for a pipeline config; returns (sample, plant or None)."""
    pipe, K, n, m = cfg["pipeline"], int(cfg["K"]), int(cfg["n"]), int(cfg["m"])
    kind = cfg["kind"]
    if pipe == "parity":
        P = pred.parity(K)
    elif pipe == "halfspace":
        P = pred.maj(K)
    else:
        raise ValueError(f"unknown pipeline {pipe!r}")
    plant = None
    if kind == "planted":
        plant = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
        J = inst.planted_instance(P, n, m, plant, rng)
        if cfg.get("corruption", 0):
            J = inst.corrupt_instance(J, cfg["corruption"], rng)
    elif kind == "random":
        J = inst.random_instance(P, n, m, rng)
    else:
        raise ValueError(f"unknown instance kind {kind!r}")
    S = red.parity_sample(J) if pipe == "parity" else red.halfspace_sample(J)
    return S, plant


def run_trial(cfg: dict, trial: int) -> dict:
    rng = np.random.default_rng([int(cfg["seed"]), trial])
    t0 = time.perf_counter()
    S, _ = pipeline_sample(cfg, rng)
    if cfg["pipeline"] == "parity":
        v = distinguisher_realizable(parity_gauss, S, cfg["beta"], rng,
                                     cfg.get("example_cap"), cfg.get("time_cap"))
    else:
        v = distinguisher_agnostic(halfspace_lp, S, cfg["alpha"], cfg["beta"], int(cfg["n"]), rng,
                                   cfg.get("example_cap"), cfg.get("time_cap"))
    return {"trial": trial, "kind": cfg["kind"], "verdict": v.verdict,
            "error": "" if v.error is None else f"{v.error.numerator}/{v.error.denominator}",
            "flagged": int(v.flagged), "runtime": round(time.perf_counter() - t0, 6)}


def _run_chunk(args):
    cfg, trials = args
    return [run_trial(cfg, t) for t in trials]


def default_jobs() -> int:
    return max(1, int(os.environ.get("CSPLAB_JOBS", "1")))


def run_experiment(config: dict, jobs: int | None = None) -> list:
    """One row per trial; each trial's RNG is seeded by (seed, trial index)
    so results do not depend on ``jobs``."""
    cfg = {**DEFAULT_CONFIG, **config}
    trials = list(range(int(cfg["trials"])))
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs == 1:
        return [run_trial(cfg, t) for t in trials]
    chunks = [(cfg, trials[i::jobs]) for i in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        rows = [r for part in ex.map(_run_chunk, chunks) for r in part]
    return sorted(rows, key=lambda r: r["trial"])


def summarize(rows: list, positive: str) -> dict:
    k = sum(r["verdict"] == positive for r in rows)
    lo, hi = wilson_interval(k, len(rows))
    return {"count": k, "trials": len(rows), "frequency": k / len(rows),
            "wilson_low": lo, "wilson_high": hi}


RESULT_FIELDS = ["trial", "kind", "verdict", "error", "flagged", "runtime"]


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RESULT_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def load_config(text: str) -> dict:
    cfg = json.loads(text)
    unknown = set(cfg) - set(DEFAULT_CONFIG) - {"example_cap", "time_cap"}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return {**DEFAULT_CONFIG, **cfg}
