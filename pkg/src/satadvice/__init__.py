"""Learning-augmented SAT: subset/label advice for PPZ/PPSZ, MAX-SAT and MAX-2-SAT."""

from .advice import (LabelAdvice, SubsetAdvice, gen_label_advice, gen_subset_advice,
                     subset_to_label)
from .cnf import (CnfFormula, PartialAssignment, ReductionOutcome, Status, count_satisfied,
                  parse_dimacs, reduce)
from .solvers import (AdviceContradiction, Contradiction, SolverConfig, brute_force_sat,
                      d_implies, ppsz_with_advice)

__version__ = "0.1.0"
