"""
Predicates and their parameters
===============================

Every predicate is a truth table over {-1,+1}^K.  This script computes the
three numbers that govern how hard a CSP over a predicate is to refute:
the uniform value Lval, the 0-variability VAR_0 and the pairwise-uniform
value Uval (an exact rational LP).
"""

from csplab import predicates as P

# Majority: Uval = 1 - 1/(K+1), and (K+1)/2 coordinates force it to 0.
for K in (3, 5, 7):
    M = P.maj(K)
    u = P.uval(M)
    print(f"maj_{K}: lval={P.lval(M)}  var0={int(P.var0(M))}  uval={u.value}")

# The LP witness is a genuine distribution on {-1,1}^K with uniform pair
# marginals; the closed-form one puts extra mass on the all-minus point.
D = P.maj_distribution(5)
print("closed-form witness pairwise uniform:", bool(P.is_pairwise_uniform(D)))
print("its expectation of maj_5:", D.expectation(P.maj(5)))

# Parity is fooled completely by pairwise-uniform distributions.
for K in (3, 4, 5):
    print(f"parity_{K}: uval={P.uval(P.parity(K)).value}  var0={int(P.var0(P.parity(K)))}")

# Thresholds T_{k,l} interpolate between OR (l=1) and AND (l=k).
print("T_{5,3} is maj_5:", P.threshold(5, 3) == P.maj(5))

# The Huang predicate accepts anything within distance k of a codeword
# (z, all triple products of z).  For k = 4 that is every point.
H4 = P.huang(4)
print(f"huang_4: arity={H4.arity} ones={H4.n_ones} of {2 ** H4.arity}")
print("huang_4 shift vectors:", P.shift_vectors_exhaustive(H4))

# For larger k the table is evaluated lazily from the codewords.
H7 = P.huang(7)
print(f"huang_7: arity={H7.arity}, materialized={H7.materialized}")

# The 4-of-8 block predicate used for intersections of halfspaces.
Q = P.pk8(3)
print(f"pk8_3: ones={Q.n_ones} = 7^4 * (8^4 - 7^4) = {7 ** 4 * (8 ** 4 - 7 ** 4)}")

# The Z distribution on {0,1}^4 and the admissibility of the D_R sampler.
Z = P.make_Z_distribution()
print("Pr(Z_1=1) =", Z.marginal(0, 1), " Pr(Z_1=Z_2=1) =", Z.pair_marginal(0, 1)[1, 1])
print("smallest admissible k for D_R:", P.smallest_dr_k())
