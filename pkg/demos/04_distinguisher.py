"""
Scattered samples and the learner-based distinguisher
=====================================================

A sample distribution is scattered when every fixed hypothesis fits a
random sample only with tiny probability.  An efficient learner that does
well on realisable samples would then tell planted instances from random
ones.  For parities, Gaussian elimination is that learner.
"""

import numpy as np

from csplab import distinguisher as D

rng = np.random.default_rng(4)

# Exceedance probability of fixed hypotheses under the alternating
# ensemble, against the Hoeffding bound 2^(-9m/100).
E = D.alternating_ensemble(10)
for h in (D.ConstantHypothesis(1), D.MajorityHypothesis(), D.TableHypothesis.random(10, rng)):
    rep = D.scatter_check_fixed(h, E, 40, 20_000, rng, exact=True)
    print(f"{type(h).__name__:>20}: exact={float(rep.exact):.2e} "
          f"ci_high={rep.ci_high:.2e} bound={rep.bound:.2e}")

# The parity pipeline end to end: planted gives realizable, random does not.
for kind in ("planted", "random"):
    rows = D.run_experiment({"pipeline": "parity", "n": 30, "m": 120, "trials": 40,
                             "seed": 0, "kind": kind})
    s = D.summarize(rows, "realizable")
    print(f"parity/{kind}: realizable {s['count']}/{s['trials']} "
          f"(Wilson {s['wilson_low']:.2f}..{s['wilson_high']:.2f})")

# Halfspaces on corrupted majority instances, via the agnostic variant.
rows = D.run_experiment({"pipeline": "halfspace", "n": 30, "m": 120, "trials": 20,
                         "seed": 0, "beta": 0.05, "corruption": 0.05})
print("halfspace/corrupted:", D.summarize(rows, "almost_realizable")["count"], "/ 20 almost realizable")
