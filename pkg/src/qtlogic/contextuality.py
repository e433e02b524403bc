"""Logical Bell inequalities and the contextuality hierarchy of probability tables.

The notions of global section and strong contextuality follow the usual
sheaf-theoretic reading of empirical models:

* a *global section* of a table is one distribution on assignments to the
  whole base whose marginal on every cover set ``U`` is ``d_U``;
* a table is *strongly contextual* when no single global assignment is
  possible in every context, i.e. each one restricts to a zero-probability
  entry of some ``d_U``.

Tables with a global section are non-contextual; the others are contextual,
and strongly contextual ones form the top of the hierarchy.
"""

from __future__ import annotations

from fractions import Fraction

from . import lin
from .errors import AmbiguityError, CoverError, NotContradictoryError, ResourceError
from .logic import Component, LinAtom, to_qtl_text
from .prop import all_assignments, conjunction, format_symbols, is_contradictory, to_text
from .team import ProbabilityTable

MAX_BASE = 16

NON_CONTEXTUAL = "non-contextual"
CONTEXTUAL = "contextual"
STRONGLY_CONTEXTUAL = "strongly-contextual"


def derive_bell(phis, general: bool = False) -> LinAtom:
    """The logical Bell inequality ``sum_j [phi_j] <= k - 1``.

    It needs the conjunction of the ``phi_j`` to be contradictory.  With
    ``general`` the contradiction check is skipped and the always-valid
    form ``sum_j [phi_j] - [AND_j phi_j] <= k - 1`` is returned instead.
    """
    phis = list(phis)
    if not phis:
        raise ValueError("at least one formula is needed")
    k = len(phis)
    terms = [(-1, Component(phi)) for phi in phis]
    if general:
        terms.append((1, Component(conjunction(phis))))
    elif not is_contradictory(conjunction(phis)):
        raise NotContradictoryError(
            f"the conjunction of {', '.join(to_text(p) for p in phis)} is satisfiable"
        )
    return LinAtom(terms, -(k - 1))


def table_expectation(table: ProbabilityTable, phi) -> Fraction:
    """E_T[phi] from a cover set containing Var(phi).

    Every cover set that contains Var(phi) must induce the same value.
    """
    var = phi.symbols
    values = {}
    for u, d in table.items():
        if var <= u:
            values[u] = sum((p for s, p in d.items() if phi.evaluate(s)), Fraction(0))
    if not values:
        raise CoverError(f"no cover set contains Var({to_text(phi)}) = {format_symbols(var)}")
    distinct = set(values.values())
    if len(distinct) > 1:
        detail = ", ".join(f"{format_symbols(u)}: {v}" for u, v in values.items())
        raise AmbiguityError(f"cover sets disagree on [{to_text(phi)}] ({detail})")
    return distinct.pop()


def violation(table: ProbabilityTable, phis) -> Fraction:
    """max(0, sum_j E_T[phi_j] - (k - 1)) for a contradictory list of formulas."""
    phis = list(phis)
    derive_bell(phis)
    total = sum((table_expectation(table, phi) for phi in phis), Fraction(0))
    return max(Fraction(0), total - (len(phis) - 1))


def _check_base(table: ProbabilityTable):
    n = len(table.base)
    if n > MAX_BASE:
        raise ResourceError(f"base of {n} symbols exceeds the cap of {MAX_BASE}")


def possible_assignments(table: ProbabilityTable) -> list:
    """Global assignments whose every restriction has positive probability."""
    _check_base(table)
    return [
        s
        for s in all_assignments(table.base)
        if all(d[s.restrict(u)] > 0 for u, d in table.items())
    ]


def global_section(table: ProbabilityTable, stats: lin.SolveStats = None):
    """A distribution on 2^B with every d_U as marginal, or None if there is none.

    Assignments that restrict to a zero entry are fixed to probability 0
    before the linear system is built.
    """
    candidates = possible_assignments(table)
    index = {s: i for i, s in enumerate(candidates)}
    system = []
    for u, d in table.items():
        for t, p in d.items():
            coeffs = {index[s]: 1 for s in candidates if s.restrict(u) == t}
            if not coeffs:
                if p:
                    return None
                continue
            system.extend(lin.constraints(coeffs, "=", p))
    system.extend(lin.LinConstraint({i: 1}, False, 0) for i in range(len(candidates)))
    point = lin.feasible(lin.LinSystem(system, len(candidates)), stats)
    if point is None:
        return None
    section = {s: Fraction(0) for s in all_assignments(table.base)}
    for s, i in index.items():
        section[s] = point[i]
    return section


def has_global_section(table: ProbabilityTable) -> bool:
    return global_section(table) is not None


def is_strongly_contextual(table: ProbabilityTable) -> bool:
    return not possible_assignments(table)


def classify(table: ProbabilityTable) -> str:
    if has_global_section(table):
        return NON_CONTEXTUAL
    if is_strongly_contextual(table):
        return STRONGLY_CONTEXTUAL
    return CONTEXTUAL


def bell_text(phis, names=None) -> str:
    """``[phi_0] + ... + [phi_{k-1}] <= k-1`` using ``names`` when given."""
    phis = list(phis)
    if names:
        lhs = " + ".join(f"[{n}]" for n in names)
        return f"{lhs} <= {len(phis) - 1}"
    return to_qtl_text(derive_bell(phis))
