"""Command-line entry point: ``csplab <command> ...`` (or ``python -m csplab``).

Exit status is 0 on success, 2 when a checked bound or property is
violated, and 1 on errors (reported on standard error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import distinguisher as dist
from . import instances as inst
from . import predicates as pred
from . import reductions as red
from . import refutation as ref

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class CliError(Exception):
    pass


def _q(x) -> str:
    """Exact rationals as p/q."""
    return str(Fraction(x))


def _read_text(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit(report, fmt: str) -> None:
    rows = report if isinstance(report, list) else [report]
    if fmt == "json":
        sys.stdout.write(json.dumps(report) + "\n")
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())


def _load_instance(path):
    text = _read_text(path)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        return inst.instance_from_json(obj), obj.get("plant")
    return inst.from_dimacs(text), None


# -- predicate --------------------------------------------------------------

def cmd_predicate_info(args):
    P = pred.parse_spec(args.spec)
    rep = {"predicate": P.name, "arity": P.arity}
    if not P.materialized:
        rep.update({"materialized": False, "lval": "", "var0": "", "uval": ""})
        _emit(rep, args.format)
        return EXIT_OK
    rep["ones"] = P.n_ones
    rep["lval"] = _q(pred.lval(P))
    try:
        rep["var0"] = int(pred.var0(P))
    except ValueError:
        rep["var0"] = "none"
    if P.arity <= pred.MAX_UVAL_ARITY and not args.no_uval:
        rep["uval"] = _q(pred.uval(P).value)
    else:
        rep["uval"] = ""
    _emit(rep, args.format)
    return EXIT_OK


# -- gen --------------------------------------------------------------------

def cmd_gen(args):
    P = pred.parse_spec(args.spec)
    rng = np.random.default_rng(args.seed)
    if args.kind == "random":
        J = inst.random_instance(P, args.n, args.m, rng)
        plant = None
    else:
        plant = rng.choice(np.array([-1, 1], dtype=np.int8), size=args.n)
        J = inst.planted_instance(P, args.n, args.m, plant, rng)
    if args.format == "dimacs":
        text = inst.to_dimacs(J)
    else:
        obj = inst.instance_to_json(J)
        if plant is not None:
            obj["plant"] = [int(v) for v in plant]
        text = json.dumps(obj, separators=(",", ":")) + "\n"
    _write_text(args.out, text)
    return EXIT_OK


# -- reduce -----------------------------------------------------------------

def _write_sample(S, args):
    if args.binary:
        if args.out in (None, "-"):
            red.write_sample_binary(S, sys.stdout.buffer)
        else:
            with open(args.out, "wb") as fh:
                red.write_sample_binary(S, fh)
    else:
        _write_text(args.out, red.dumps_sample(S))


def _write_witness(args, obj):
    if args.witness_out and obj is not None:
        with open(args.witness_out, "w") as fh:
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")


def cmd_reduce(args):
    if args.target == "automaton":
        F = red.DnfFormula.from_json(json.loads(_read_text(args.input)))
        A = red.dnf_to_automaton(F)
        _write_text(args.out, json.dumps(A.to_json(), separators=(",", ":")) + "\n")
        return EXIT_OK
    J, plant = _load_instance(args.input)
    u = None if plant is None else np.array(plant, dtype=np.int8)
    witness = None
    if args.target == "dnf":
        if args.shift:
            y = np.array([int(t) for t in args.shift.split(",")], dtype=np.int8)
        else:
            ys = pred.shift_vectors_exhaustive(J.predicate) if J.K <= 20 else []
            if not ys:
                raise CliError(f"{J.predicate.name} has no shift vector; pass --shift")
            y = np.array(ys[0], dtype=np.int8)
        J2 = inst.Instance(J.n, J.predicate, J.vars, J.signs[: J.m - J.m % 2])
        S = red.dnf_sample(red.dnf_shift_alternate(J2, y))
        if u is not None:
            witness = red.phi_u_formula(u, J.predicate, J.n).to_json()
    elif args.target == "halfspace":
        S = red.halfspace_sample(J)
        if u is not None:
            witness = {"type": "halfspace", "w": [int(v) for v in u], "threshold": 0}
    elif args.target == "parity":
        S = red.parity_sample(J)
        if u is not None:
            witness = {"type": "parity", "S": [int(v > 0) for v in u]}
    elif args.target == "inter4":
        S = red.inter4_sample(J)
        if u is not None:
            h = red.inter4_witness(u, J.K // 8)
            witness = {"type": "intersection", "W": h.W.tolist(), "b": h.b.tolist()}
    else:
        raise CliError(f"unknown reduction {args.target!r}")
    _write_sample(S, args)
    _write_witness(args, witness)
    return EXIT_OK


# -- scatter ----------------------------------------------------------------

def _ensemble(name, d):
    if name == "alternating":
        return dist.alternating_ensemble(d)
    if name == "pairs":
        return dist.uniform_pairs_ensemble(d)
    raise CliError(f"unknown ensemble {name!r}")


def _fixed_hypothesis(name, d, rng):
    if name == "const1":
        return dist.ConstantHypothesis(1)
    if name == "const0":
        return dist.ConstantHypothesis(0)
    if name == "majority":
        return dist.MajorityHypothesis()
    if name == "table":
        return dist.TableHypothesis.random(d, rng)
    raise CliError(f"unknown hypothesis {name!r}")


def cmd_scatter_check(args):
    rng = np.random.default_rng(args.seed)
    E = _ensemble(args.ensemble, args.d)
    h = _fixed_hypothesis(args.hypothesis, args.d, rng)
    rep = dist.scatter_check_fixed(h, E, args.m, args.trials, rng, exact=args.exact)
    out = {"ensemble": args.ensemble, "hypothesis": args.hypothesis, "d": args.d, "m": rep.m,
           "trials": rep.trials, "hits": rep.hits, "estimate": rep.estimate,
           "ci_low": rep.ci_low, "ci_high": rep.ci_high, "bound": rep.bound,
           "exact": "" if rep.exact is None else _q(rep.exact), "ok": rep.ok}
    _emit(out, args.format)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


# -- distinguish ------------------------------------------------------------

def cmd_distinguish(args):
    if args.source in ("parity", "halfspace"):
        cfg = dist.load_config(_read_text(args.config)) if args.config else dict(dist.DEFAULT_CONFIG)
        cfg["pipeline"] = args.source
        if args.trials_given:
            cfg["trials"] = args.trials
        if args.seed is not None:
            cfg["seed"] = args.seed
        for key in ("n", "m", "K", "beta", "alpha", "kind", "corruption"):
            v = getattr(args, key)
            if v is not None:
                cfg[key] = v
        rows = dist.run_experiment(cfg, jobs=args.jobs)
        if args.csv_out:
            with open(args.csv_out, "w") as fh:
                fh.write(dist.rows_to_csv(rows))
        positive = "realizable" if cfg["pipeline"] == "parity" else "almost_realizable"
        summ = dist.summarize(rows, positive)
        out = {"pipeline": cfg["pipeline"], "kind": cfg.get("kind", "planted"),
               "positive": positive, "count": summ["count"], "trials": summ["trials"],
               "frequency": summ["frequency"], "wilson_low": float(summ["wilson_low"]),
               "wilson_high": float(summ["wilson_high"])}
        _emit(out, args.format)
        return EXIT_OK
    # a sample file (or stdin): run the chosen learner inside the harness
    text = _read_text(None if args.source in (None, "-") else args.source)
    S = red.loads_sample(text)
    L = dist.LEARNERS[args.learner]
    n = S.d
    rows = []
    for t in range(args.trials):
        rng = np.random.default_rng([args.seed or 0, t])
        if args.alpha is not None:
            v = dist.distinguisher_agnostic(L, S, args.alpha, args.beta if args.beta is not None else 0.0,
                                            n, rng)
        else:
            v = dist.distinguisher_realizable(L, S, args.beta if args.beta is not None else 0.2, rng)
        rows.append({"trial": t, "verdict": v.verdict,
                     "error": "" if v.error is None else _q(v.error),
                     "threshold": _q(v.threshold), "flagged": int(v.flagged)})
    if args.trials == 1:
        _emit(rows[0], args.format)
    else:
        _emit(rows, args.format)
    return EXIT_OK


# -- refute / expansion -----------------------------------------------------

def cmd_refute(args):
    J, _ = _load_instance(args.input)
    rng = np.random.default_rng(args.seed)
    res = ref.dpll_refute(J, args.rule, args.budget, rng)
    if res.verdict == "UNSAT" and args.trace_out:
        _write_text(args.trace_out, res.trace.dumps())
    out = {"verdict": res.verdict, "tree_size": res.tree_size,
           "trace_length": len(res.trace) if res.trace else 0,
           "trace_width": res.trace.width() if res.trace else 0,
           "n": J.n, "m": J.m, "rule": args.rule, "seed": args.seed}
    if res.verdict == "SAT":
        out["witness"] = "".join("+" if v > 0 else "-" for v in res.witness)
    if res.verdict == "UNSAT":
        chk = ref.check_trace(J, res.trace)
        out["trace_ok"] = chk.ok
        if not chk.ok:
            _emit(out, args.format)
            return EXIT_VIOLATION
    _emit(out, args.format)
    return EXIT_OK


def cmd_check_trace(args):
    J, _ = _load_instance(args.input)
    chk = ref.check_trace(J, ref.ResolutionTrace.loads(_read_text(args.trace)))
    out = {"ok": chk.ok, "index": "" if chk.index is None else chk.index + 1, "reason": chk.reason}
    _emit(out, args.format)
    return EXIT_OK if chk.ok else EXIT_VIOLATION


def cmd_expansion(args):
    J, _ = _load_instance(args.input)
    rng = np.random.default_rng(args.seed)
    rep = ref.expansion_check(J, args.l, args.trials, rng, args.threshold)
    out = {"status": rep.status, "l": rep.l, "threshold": rep.threshold, "checked": rep.checked,
           "witness": "" if rep.witness is None else " ".join(str(i + 1) for i in rep.witness),
           "confidence": "" if rep.confidence is None else rep.confidence,
           "width_bound": "" if rep.width_bound is None else _q(rep.width_bound),
           "length_exponent": "" if rep.width_bound is None
           else _q(ref.bw_length_bound(rep.width_bound, J.n)["exponent"])}
    _emit(out, args.format)
    return EXIT_OK if rep.status != "violated" else EXIT_VIOLATION


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="csplab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    pr = sub.add_parser("predicate", help="predicate parameters")
    prs = pr.add_subparsers(dest="action", required=True)
    pi = prs.add_parser("info", help="lval, var0, uval and table stats")
    pi.add_argument("spec", help="e.g. maj:5, t:5,3, huang:4, pk8:3")
    pi.add_argument("--no-uval", action="store_true", help="skip the exact LP")
    fmt(pi)
    pi.set_defaults(func=cmd_predicate_info)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("kind", choices=("random", "planted"))
    g.add_argument("spec")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-m", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--format", choices=("json", "dimacs"), default="json")
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reduce", help="turn an instance into a sample")
    r.add_argument("target", choices=("dnf", "halfspace", "parity", "inter4", "automaton"))
    r.add_argument("input", nargs="?", default="-")
    r.add_argument("-o", "--out")
    r.add_argument("--binary", action="store_true", help="2-bit packed sample output")
    r.add_argument("--witness-out", help="realizing hypothesis for planted inputs (JSON)")
    r.add_argument("--shift", help="comma-separated shift vector for the dnf reduction")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("scatter", help="scattering checks")
    ss = s.add_subparsers(dest="action", required=True)
    sc = ss.add_parser("check", help="exceedance probability of a fixed hypothesis")
    sc.add_argument("ensemble", choices=("alternating", "pairs"))
    sc.add_argument("hypothesis", choices=("const1", "const0", "majority", "table"))
    sc.add_argument("--d", type=int, default=10)
    sc.add_argument("-m", type=int, default=40)
    sc.add_argument("--trials", type=int, default=100_000)
    sc.add_argument("--seed", type=int, required=True)
    sc.add_argument("--exact", action="store_true")
    fmt(sc)
    sc.set_defaults(func=cmd_scatter_check)

    d = sub.add_parser("distinguish", help="learner-wrapping distinguisher")
    d.add_argument("source", nargs="?", default="-",
                   help="pipeline name (parity, halfspace) or a sample file; default stdin")
    d.add_argument("--learner", choices=sorted(dist.LEARNERS), default="parity_gauss")
    d.add_argument("--trials", type=int, default=None)
    d.add_argument("--seed", type=int, default=None)
    d.add_argument("--config", help="experiment config JSON")
    d.add_argument("--kind", choices=("planted", "random"))
    d.add_argument("-n", type=int)
    d.add_argument("-m", type=int)
    d.add_argument("-K", type=int)
    d.add_argument("--beta", type=float)
    d.add_argument("--alpha", type=float)
    d.add_argument("--corruption", type=float)
    d.add_argument("--jobs", type=int, default=None)
    d.add_argument("--csv-out", help="per-trial results CSV")
    fmt(d)
    d.set_defaults(func=cmd_distinguish)

    rf = sub.add_parser("refute", help="refutation search")
    rfs = rf.add_subparsers(dest="action", required=True)
    rd = rfs.add_parser("dpll", help="DPLL with resolution trace extraction")
    rd.add_argument("input", nargs="?", default="-")
    rd.add_argument("--rule", choices=ref.BRANCHING_RULES, default="first")
    rd.add_argument("--budget", type=int, default=1_000_000)
    rd.add_argument("--seed", type=int, default=0)
    rd.add_argument("--trace-out")
    fmt(rd)
    rd.set_defaults(func=cmd_refute)
    rc = rfs.add_parser("check", help="verify a trace file")
    rc.add_argument("input")
    rc.add_argument("trace")
    fmt(rc)
    rc.set_defaults(func=cmd_check_trace)

    e = sub.add_parser("expansion", help="expansion condition of the width bound")
    e.add_argument("input", nargs="?", default="-")
    e.add_argument("-l", type=int, required=True)
    e.add_argument("--trials", type=int, default=10_000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--threshold", type=int, default=None,
                   help="private variables required (default K - VAR0 + 1)")
    fmt(e)
    e.set_defaults(func=cmd_expansion)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "distinguish":
        args.trials_given = args.trials is not None
        if args.trials is None:
            args.trials = 1
            if args.source in ("parity", "halfspace"):
                args.trials = dist.DEFAULT_CONFIG["trials"]
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
