"""Random CSPs, the samples they reduce to, and the learners and refuters run on them.

Modules:
    predicates    truth-table predicates, Lval / VAR0 / Uval, named families
    instances     CSP(P) instances, random and planted generation, VAL(J)
    reductions    instance-to-sample reductions and realizing hypotheses
    distinguisher scattered ensembles, learner-wrapping distinguishers
    refutation    DPLL with resolution traces, expansion and width bounds
"""

from .predicates import (Predicate, LazyPredicate, parse_spec, make_named, lval, var0, uval,
                         implies, sat, and_, maj, parity, threshold, huang, pk8)
from .instances import (Constraint, Instance, eval_value, random_instance, planted_instance,
                        exact_value, estimate_value, apply_implication)
from .reductions import LabeledSample, DnfFormula, Automaton, Halfspace
from .distinguisher import (empirical_error, distinguisher_realizable, distinguisher_agnostic,
                            scatter_check_fixed)
from .refutation import dpll_refute, check_trace, expansion_check, bw_length_bound

__version__ = "0.1.0"
