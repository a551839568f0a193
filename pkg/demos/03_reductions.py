"""
From instances to learning samples
==================================

Each reduction turns a CSP instance into a labelled sample.  A planted
instance gives a sample realised by a hypothesis built from the plant;
a random one gives a sample that no small hypothesis should fit.
"""

import numpy as np

from csplab import distinguisher as D
from csplab import instances as I
from csplab import predicates as P
from csplab import reductions as R

rng = np.random.default_rng(3)

# Parity: constraint -> (indicator of its variables, 1 xor negation bit).
a = rng.choice([-1, 1], size=20)
S = R.parity_sample(I.planted_instance(P.parity(3), 20, 60, a, rng))
print("parity: error of chi_S(plant) =", D.empirical_error(R.parity_witness(a), S))

# Halfspaces: a majority constraint gives (u(C), 1) and (-u(C), 0).
Jm = I.planted_instance(P.maj(3), 20, 60, a, rng)
S = R.halfspace_sample(Jm)
print("halfspace: error of h_plant =", D.empirical_error(R.Halfspace(a), S))

# The ternary sample embeds into {-1,1}^{2n} by psi, weights by duplication.
S2 = R.tri_to_pm(S)
print("after psi:", S2, "error =", D.empirical_error(R.Halfspace(R.weights_lift(a)), S2))

# DNF: embed each constraint by Psi and label alternately 1, 0.  The shift
# vector y makes the plant violate every second constraint.  HUANG(4) has
# no shift vector, so this uses AND_3 with y = (-1,-1,-1).
Q, y = P.and_(3), (-1, -1, -1)
u = rng.choice([-1, 1], size=8)
J = R.dnf_shift_alternate(I.planted_instance(Q, 8, 16, u, rng), y)
S = R.dnf_sample(J)
F = R.phi_u_formula(u, Q, 8)
print(f"dnf: {len(F.clauses)} clause(s) over {F.d} variables, error =",
      D.empirical_error(F, S))

# Any DNF with c clauses becomes a layered automaton with n 2^c + 1 states.
small = R.DnfFormula(6, [[(0, 1), (1, -1)], [(5, 1)]])
A = R.dnf_to_automaton(small)
X = np.array(np.meshgrid(*[[-1, 1]] * 6)).reshape(6, -1).T
print("automaton states:", A.n_states, " agrees:", bool((A.predict(X) == small.predict(X)).all()))

# Intersections of four halfspaces from the 8-block predicate.
k, n = 3, 30
u = rng.choice([-1, 1], size=n)
S = R.inter4_sample(I.planted_instance(P.pk8(k), n, 8, u, rng))
print("inter4: error of the 4-halfspace witness =",
      D.empirical_error(R.inter4_witness(u, k), S))

# 3-SAT to T_{4,2}: fresh blocks per clause; satisfiable stays satisfiable.
J3 = I.planted_instance(P.sat(3), 8, 12, rng.choice([-1, 1], size=8), rng)
T = R.threesat_to_tkl(J3, 4, 2)
print(f"T_(4,2) instance: n={T.n} m={T.m} value={I.exact_value(T, core=R.tkl_core(J3))[0]}")
