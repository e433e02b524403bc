"""Quantum team logic (QTL) and probabilistic team logic (PTL).

Teams are finite families of partial truth assignments; formulas constrain
the expectations of propositional formulas over them with linear
inequalities.  The package evaluates formulas, decides satisfiability and
validity with witness teams, and classifies probability tables by
contextuality.
"""

from .contextuality import (
    classify,
    derive_bell,
    global_section,
    has_global_section,
    is_strongly_contextual,
    violation,
)
from .decide import (
    Caps,
    Decision,
    ptl_satisfiable,
    ptl_valid,
    qtl_satisfiable,
    qtl_valid,
    synthesize,
)
from .errors import QtlError
from .lin import LinConstraint, LinSystem, feasible
from .logic import Component, LinAtom, parse, ptl_satisfies, satisfies
from .prop import Assignment, eval_formula, is_contradictory, minterm, parse_prop, prop_equiv
from .team import (
    Cover,
    ProbabilityTable,
    QuantumTeam,
    associated_table,
    parse_cover,
    parse_table,
    parse_team,
    team_from_table,
)

__version__ = "0.1.0"
