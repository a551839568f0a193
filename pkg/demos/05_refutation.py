"""
Resolution refutations from DPLL
================================

An unsatisfiable run of DPLL is a tree-like resolution refutation.  The
solver records it as a trace that an independent checker verifies.
"""

import numpy as np

from csplab import instances as I
from csplab import predicates as P
from csplab import refutation as F

# The smallest contradiction: x1 xor x2 and its negation.
J = I.Instance(2, P.parity(2), [[0, 1], [0, 1]], [[1, 1], [1, -1]])
res = F.dpll_refute(J)
print(res.verdict, "with a trace of", len(res.trace), "steps")
print(res.trace.dumps(), end="")
print("checker:", F.check_trace(J, res.trace).ok)

# Random 3-SAT well above the threshold: the search tree grows with n.
for n in (20, 30, 40):
    sizes = [F.dpll_refute(I.random_instance(P.sat(3), n, 6 * n,
                                             np.random.default_rng([n, s]))).tree_size
             for s in range(10)]
    print(f"n={n}: median tree size {np.median(sizes)}")

# The expansion condition: most constraints in every small subset keep
# enough variables to themselves.  Success at level l gives width >= l/6.
Js = I.random_instance(P.sat(5), 400, 40, np.random.default_rng(5))
rep = F.expansion_check(Js, 3, threshold=3)
print(rep.status, "after", rep.checked, "subsets; width bound", rep.width_bound,
      "exponent", F.bw_length_bound(rep.width_bound, Js.n)["exponent"])
