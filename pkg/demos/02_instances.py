"""
Random and planted instances
============================

Instances are lists of signed constraints over n variables.  Random ones
draw variables and signs uniformly; planted ones keep only constraints a
hidden assignment satisfies.
"""

import numpy as np

from csplab import instances as I
from csplab import predicates as P

rng = np.random.default_rng(1)

# A random SAT_3 instance with 200 clauses on 10 variables.  Exhaustive
# search gives its exact value and the lexicographically first optimum.
J = I.random_instance(P.sat(3), 10, 200, rng)
val, witness = I.exact_value(J)
print("VAL =", val, "witness =", "".join("+" if v > 0 else "-" for v in witness))
print("a random assignment gets 7/8 in expectation; local search finds",
      I.estimate_value(J, 5, rng))

# Planting: every constraint is satisfied by the hidden assignment.
a = rng.choice([-1, 1], size=12)
Jp = I.planted_instance(P.maj(3), 12, 200, a, rng)
print("planted value under the plant:", I.eval_value(Jp, a))

# Replacing maj_3 by the weaker OR keeps every literal and cannot lower VAL.
Jo = I.apply_implication(Jp, P.sat(3))
print("after implication:", I.eval_value(Jo, a))

# Corrupting a 5% fraction of the constraints leaves the plant nearly optimal.
Jc = I.corrupt_instance(Jp, 0.05, rng)
print("corrupted value under the plant:", I.eval_value(Jc, a))

# Two file formats: JSON and a compact DIMACS-like text form.
print(I.to_dimacs(Jp.subset(range(3))), end="")
assert I.loads_instance(I.dumps_instance(Jp)) == Jp
