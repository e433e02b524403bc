"""Satisfiability and validity for QTL and PTL, with witness teams.

The procedure follows the completeness argument for quantum team logic.
For a formula ``alpha`` with support family ``Vs = Sp(alpha)``:

1. conjoin the support-transfer formula :func:`build_beta` and the
   minterm bookkeeping formula :func:`build_gamma`, giving ``delta``;
2. treat the linear atoms of ``delta`` as opaque propositions and search
   for sign assignments that make ``delta`` true, checking each partial
   assignment for rational feasibility with :func:`qtlogic.lin.feasible`;
3. turn a feasible point into one multi-team per support and glue the
   blocks together, supersets first (:func:`synthesize`).

Every witness is re-checked with :func:`qtlogic.logic.satisfies` before
it is returned.  Validity of ``alpha`` is unsatisfiability of ``!alpha``.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import lin
from .errors import ResourceError, SupportError, SynthesisInvariantError
from .logic import (
    Component,
    LinAtom,
    QAnd,
    QFalse,
    QIff,
    QImplies,
    QNot,
    QOr,
    QTrue,
    QtlFormula,
    atoms,
    elementary_components,
    equals,
    evaluate,
    geq,
    is_normal,
    ptl_satisfies,
    qand,
    satisfies,
    support,
    symbols,
    widen,
)
from .prop import Assignment, all_assignments, eval_formula, format_symbols, minterm
from .team import QuantumTeam

log = logging.getLogger(__name__)


@dataclass
class Caps:
    max_atoms: int = 48
    max_variables: int = 64
    max_supports: int = 10
    max_minterms: int = 2**16
    max_rows: int = lin.MAX_ROWS


DEFAULT_CAPS = Caps()


@dataclass
class SearchStats:
    assignments_tried: int = 0
    atoms: int = 0
    variables: int = 0
    supports: int = 0
    lp: lin.SolveStats = field(default_factory=lin.SolveStats)


def ordered_supports(supports) -> list:
    """Supports ordered so that a proper superset always precedes its subsets."""
    return sorted((frozenset(v) for v in supports), key=lambda v: (-len(v), sorted(v)))


def minterm_component(s: Assignment, v) -> Component:
    return Component(minterm(s), v)


def _check_minterms(supports, caps):
    total = sum(2 ** len(v) for v in supports)
    if total > caps.max_minterms:
        raise ResourceError(f"{total} minterms exceed the cap of {caps.max_minterms}")


def _eq(c: Component, value: int) -> QtlFormula:
    return equals([(1, c)], value)


def build_beta(supports, prune: bool = False, caps: Caps = DEFAULT_CAPS) -> QtlFormula:
    """beta^0 & beta^1: a minterm that is 0 (or 1) on V stays so on every V' ⊇ V.

    With ``prune`` the pairs with V = V', which are tautologies, are left out.
    """
    supports = ordered_supports(supports)
    _check_minterms(supports, caps)
    zero, one = [], []
    for v in supports:
        for w in supports:
            if not v <= w or (prune and v == w):
                continue
            for s in all_assignments(v):
                phi = minterm(s)
                zero.append(QImplies(_eq(Component(phi, v), 0), _eq(Component(phi, w), 0)))
                one.append(QImplies(_eq(Component(phi, v), 1), _eq(Component(phi, w), 1)))
    return qand(zero + one)


def _is_own_minterm(c: Component) -> bool:
    sat = [s for s in all_assignments(c.support) if eval_formula(c.formula, s)]
    return len(sat) == 1 and minterm(sat[0]) == c.formula


def build_gamma(alpha: QtlFormula, prune: bool = False, caps: Caps = DEFAULT_CAPS) -> QtlFormula:
    """gamma^0 & gamma^1 for ``alpha``.

    gamma^0 makes the minterms of each support a probability distribution;
    gamma^1 ties every component ``(phi; V)`` to the sum of the minterms of
    ``V`` that satisfy ``phi``.  With ``prune``, identities ``(phi_s; V) =
    (phi_s; V)`` are dropped.
    """
    supports = ordered_supports(support(alpha))
    _check_minterms(supports, caps)
    sums, nonneg = [], []
    for v in supports:
        ms = [minterm_component(s, v) for s in all_assignments(v)]
        sums.append(equals([(1, m) for m in ms], 1))
        nonneg.extend(geq([(1, m)], 0) for m in ms)
    links = []
    for c in elementary_components(alpha):
        if prune and _is_own_minterm(c):
            continue
        terms = [(1, c)]
        for s in all_assignments(c.support):
            if eval_formula(c.formula, s):
                terms.append((-1, minterm_component(s, c.support)))
        links.append(equals(terms, 0))
    return qand(sums + nonneg + links)


# --------------------------------------------------------------------------
# Boolean skeleton over linear atoms


class _Skeleton:
    """Maps the atoms of a formula to LinIneq constraints over component variables."""

    def __init__(self, components):
        self.var = {c: i for i, c in enumerate(components)}
        self.atom_ids = {}
        self.constraints = []

    def atom(self, a: LinAtom):
        coeffs = {}
        for k, c in a.terms:
            coeffs[self.var[c]] = coeffs.get(self.var[c], 0) + k
        con = lin.LinConstraint(coeffs, False, a.bound)
        if not con.coeffs:
            return con.holds({})
        con = lin.normalize(con)
        if con in self.atom_ids:
            return ("atom", self.atom_ids[con])
        neg = lin.normalize(lin.negate(con))
        if neg in self.atom_ids:
            return ("not", ("atom", self.atom_ids[neg]))
        self.atom_ids[con] = len(self.constraints)
        self.constraints.append(con)
        return ("atom", self.atom_ids[con])

    def build(self, alpha):
        if isinstance(alpha, LinAtom):
            return self.atom(alpha)
        if isinstance(alpha, QTrue):
            return True
        if isinstance(alpha, QFalse):
            return False
        if isinstance(alpha, QNot):
            return _neg(self.build(alpha.arg))
        left, right = self.build(alpha.left), self.build(alpha.right)
        if isinstance(alpha, QAnd):
            return _and([left, right])
        if isinstance(alpha, QOr):
            return _or([left, right])
        if isinstance(alpha, QImplies):
            return _or([_neg(left), right])
        if isinstance(alpha, QIff):
            return _iff(left, right)
        raise TypeError(f"not a QTL formula: {alpha!r}")


def _neg(f):
    if isinstance(f, bool):
        return not f
    if f[0] == "not":
        return f[1]
    return ("not", f)


def _and(parts):
    out = []
    for p in parts:
        if p is False:
            return False
        if p is True:
            continue
        out.extend(p[1] if p[0] == "and" else [p])
    if not out:
        return True
    return out[0] if len(out) == 1 else ("and", out)


def _or(parts):
    out = []
    for p in parts:
        if p is True:
            return True
        if p is False:
            continue
        out.extend(p[1] if p[0] == "or" else [p])
    if not out:
        return False
    return out[0] if len(out) == 1 else ("or", out)


def _iff(a, b):
    if isinstance(a, bool):
        return b if a else _neg(b)
    if isinstance(b, bool):
        return a if b else _neg(a)
    return ("iff", a, b)


def _simplify(f, lits):
    if isinstance(f, bool):
        return f
    tag = f[0]
    if tag == "atom":
        return lits.get(f[1], f)
    if tag == "not":
        return _neg(_simplify(f[1], lits))
    if tag == "and":
        return _and([_simplify(p, lits) for p in f[1]])
    if tag == "or":
        return _or([_simplify(p, lits) for p in f[1]])
    return _iff(_simplify(f[1], lits), _simplify(f[2], lits))


def _units(f):
    if isinstance(f, bool):
        return []
    if f[0] == "atom":
        return [(f[1], True)]
    if f[0] == "not" and f[1][0] == "atom":
        return [(f[1][1], False)]
    if f[0] == "and":
        return [u for p in f[1] for u in _units(p)]
    return []


def _first_atom(f):
    stack = [f]
    while stack:
        node = stack.pop()
        if node[0] == "atom":
            return node[1]
        if node[0] == "not":
            stack.append(node[1])
        elif node[0] == "iff":
            stack.extend([node[2], node[1]])
        else:
            stack.extend(reversed(node[1]))
    return None


def _atom_set(f, out=None):
    out = set() if out is None else out
    if isinstance(f, bool):
        return out
    if f[0] == "atom":
        out.add(f[1])
    elif f[0] == "not":
        _atom_set(f[1], out)
    elif f[0] == "iff":
        _atom_set(f[1], out)
        _atom_set(f[2], out)
    else:
        for p in f[1]:
            _atom_set(p, out)
    return out


def _holds(f, point, constraints):
    if isinstance(f, bool):
        return f
    tag = f[0]
    if tag == "atom":
        return constraints[f[1]].holds(point)
    if tag == "not":
        return not _holds(f[1], point, constraints)
    if tag == "and":
        return all(_holds(p, point, constraints) for p in f[1])
    if tag == "or":
        return any(_holds(p, point, constraints) for p in f[1])
    return _holds(f[1], point, constraints) == _holds(f[2], point, constraints)


class _Search:
    def __init__(self, skeleton: _Skeleton, num_vars: int, caps: Caps, stats: SearchStats):
        self.sk = skeleton
        self.num_vars = num_vars
        self.caps = caps
        self.stats = stats
        self.cache = {}

    def lp(self, lits):
        key = frozenset(lits.items())
        if key not in self.cache:
            cons = []
            for i, val in lits.items():
                c = self.sk.constraints[i]
                cons.append(c if val else lin.negate(c))
            self.stats.assignments_tried += 1
            self.cache[key] = lin.feasible(
                lin.LinSystem(cons, self.num_vars), self.stats.lp, self.caps.max_rows
            )
        return self.cache[key]

    def propagate(self, f, lits):
        while True:
            f = _simplify(f, lits)
            if f is False:
                return f, lits
            fresh = [(i, v) for i, v in _units(f) if i not in lits]
            if not fresh:
                return f, lits
            lits = dict(lits)
            for i, v in fresh:
                if lits.setdefault(i, v) != v:
                    return False, lits

    def theory_propagate(self, f, lits):
        """Fix every remaining atom whose sign is implied by ``lits``."""
        lits = dict(lits)
        for i in sorted(_atom_set(f)):
            if i in lits:
                continue
            if self.lp({**lits, i: False}) is None:
                lits[i] = True
            elif self.lp({**lits, i: True}) is None:
                lits[i] = False
        return lits

    def run(self, f):
        f, lits = self.propagate(f, {})
        if f is False or self.lp(lits) is None:
            return None
        lits = self.theory_propagate(f, lits)
        f, lits = self.propagate(f, lits)
        if f is False:
            return None
        remaining = len(_atom_set(f))
        self.stats.atoms = remaining
        if remaining > self.caps.max_atoms:
            raise ResourceError(
                f"{remaining} undetermined atoms exceed the cap of {self.caps.max_atoms}"
            )
        return self.search(f, lits)

    def search(self, f, lits):
        f, lits = self.propagate(f, lits)
        if f is False:
            return None
        point = self.lp(lits)
        if point is None:
            return None
        if f is True or _holds(f, point, self.sk.constraints):
            return point
        i = _first_atom(f)
        for val in (True, False):
            found = self.search(f, {**lits, i: val})
            if found is not None:
                return found
        return None


# --------------------------------------------------------------------------
# Witness synthesis


@dataclass
class GluingStep:
    support: frozenset
    case: int  # 0 = base block, 1 = no proper superset, 2 = glued under supersets
    k: int
    p: int
    added: dict  # assignment -> number of new rows (a_s * k - b_s in case 2)


def block_team_rows(values, v) -> list:
    """Rows of the multi-team X(V) realising the minterm values of ``v``."""
    q = {s: Fraction(values[minterm_component(s, v)]) for s in all_assignments(v)}
    if any(x < 0 for x in q.values()) or sum(q.values()) != 1:
        raise SynthesisInvariantError(
            f"minterm values on {format_symbols(v)} are not a probability distribution"
        )
    t = math.lcm(*(x.denominator for x in q.values() if x))
    rows = []
    for s, x in q.items():
        rows.extend([s] * int(x * t))
    return rows


def synthesize(values, supports, trace: list = None) -> QuantumTeam:
    """Glue one block multi-team per support into a single quantum team.

    ``values`` maps components, including every minterm component
    ``(phi_s; V)``, to rationals.  Supports are processed supersets first.
    A support with no proper superset gets its block appended unchanged;
    otherwise, with ``k`` existing rows defined on V showing assignment
    ``s`` ``b_s`` times and a block of ``p`` rows showing it ``a_s`` times,
    ``k(p-1)`` rows are appended, ``a_s*k - b_s`` of them equal to ``s``.
    """
    order = ordered_supports(supports)
    if not order:
        raise ValueError("no supports to synthesize")
    trace = [] if trace is None else trace
    blocks = {v: block_team_rows(values, v) for v in order}
    rows = list(blocks[order[0]])
    trace.append(GluingStep(order[0], 0, 0, len(rows), dict(Counter(rows))))
    _check_stage(QuantumTeam(rows), order[:1], values)
    for i, v in enumerate(order[1:], 1):
        block = blocks[v]
        p = len(block)
        if not any(v < w for w in order):
            rows.extend(block)
            trace.append(GluingStep(v, 1, 0, p, dict(Counter(block))))
        else:
            seen = Counter(r.restrict(v) for r in rows if v <= r.domain)
            k = sum(seen.values())
            if k == 0:
                raise SynthesisInvariantError(
                    f"no earlier row is defined on {format_symbols(v)} although a superset was placed"
                )
            want = Counter(block)
            added = {}
            for s in all_assignments(v):
                m = want[s] * k - seen[s]
                if not 0 <= m <= k * (p - 1):
                    raise SynthesisInvariantError(
                        f"gluing {format_symbols(v)}: multiplicity {m} outside [0, {k * (p - 1)}]"
                    )
                if m:
                    added[s] = m
                    rows.extend([s] * m)
            if sum(added.values()) != k * (p - 1):
                raise SynthesisInvariantError(
                    f"gluing {format_symbols(v)}: added {sum(added.values())} rows, expected {k * (p - 1)}"
                )
            trace.append(GluingStep(v, 2, k, p, added))
        for w in order[: i + 1]:
            if not any(w <= r.domain for r in rows):
                raise SynthesisInvariantError(
                    f"after stage {i} no row is defined on {format_symbols(w)}"
                )
        _check_stage(QuantumTeam(rows), order[: i + 1], values)
    return QuantumTeam(rows)


def _check_stage(team, placed, values):
    for v in placed:
        for s, p in team.distribution(v).items():
            if p != values[minterm_component(s, v)]:
                raise SynthesisInvariantError(
                    f"glued team gives {p} for {minterm(s)} on {format_symbols(v)}"
                )


# --------------------------------------------------------------------------
# Public entry points


def _trivial_team(alpha):
    syms = symbols(alpha) or {0}
    return QuantumTeam([Assignment({min(syms): 1})])


def qtl_satisfiable(alpha: QtlFormula, caps: Caps = None, stats: SearchStats = None, trace=None):
    """A quantum team satisfying ``alpha``, or None if there is none."""
    caps = caps or DEFAULT_CAPS
    stats = stats if stats is not None else SearchStats()
    supports = ordered_supports(support(alpha))
    stats.supports = len(supports)
    if not supports:
        return _trivial_team(alpha) if evaluate(alpha, lambda c: 0) else None
    if len(supports) > caps.max_supports:
        raise ResourceError(f"{len(supports)} supports exceed the cap of {caps.max_supports}")
    beta = build_beta(supports, prune=True, caps=caps)
    gamma = build_gamma(QAnd(alpha, beta), prune=True, caps=caps)
    delta = qand([alpha, beta, gamma])
    log.debug(
        "beta/gamma built with trivial conjuncts pruned: %d supports, %d atoms in delta",
        len(supports),
        len(atoms(delta)),
    )
    components = elementary_components(delta)
    stats.variables = len(components)
    if len(components) > caps.max_variables:
        raise ResourceError(
            f"{len(components)} LinIneq variables exceed the cap of {caps.max_variables}"
        )
    sk = _Skeleton(components)
    f = sk.build(delta)
    log.debug("delta: %d distinct atoms, %d variables", len(sk.constraints), len(components))
    point = _Search(sk, len(components), caps, stats).run(f)
    if point is None:
        return None
    values = {c: point[i] for c, i in sk.var.items()}
    if not evaluate(delta, values.__getitem__):
        raise RuntimeError("search returned a point that does not satisfy delta")
    team = synthesize(values, supports, trace)
    if not satisfies(team, alpha):
        raise RuntimeError("synthesized team does not satisfy the formula")
    return team


def qtl_valid(alpha: QtlFormula, caps: Caps = None, stats: SearchStats = None) -> bool:
    return qtl_satisfiable(QNot(alpha), caps, stats) is None


def _classicalize(alpha):
    if not is_normal(alpha):
        raise SupportError("PTL formulas must be normal (every support equal to Var(phi))")
    base = symbols(alpha)
    return widen(alpha, base) if base else alpha


def ptl_satisfiable(alpha: QtlFormula, caps: Caps = None, stats: SearchStats = None):
    """A multi-team satisfying the normal formula ``alpha`` under PTL semantics."""
    team = qtl_satisfiable(_classicalize(alpha), caps, stats)
    if team is not None and symbols(alpha) and not ptl_satisfies(team, alpha):
        raise RuntimeError("synthesized multi-team does not satisfy the PTL formula")
    return team


def ptl_valid(alpha: QtlFormula, caps: Caps = None, stats: SearchStats = None) -> bool:
    return ptl_satisfiable(QNot(alpha), caps, stats) is None


VALID = "valid"
SATISFIABLE = "satisfiable"
UNSATISFIABLE = "unsatisfiable"


@dataclass
class Decision:
    verdict: str
    logic: str
    witness: QuantumTeam = None
    countermodel: QuantumTeam = None
    stats: SearchStats = field(default_factory=SearchStats)


def decide(alpha: QtlFormula, logic: str = "qtl", caps: Caps = None) -> Decision:
    """Classify ``alpha`` as valid, satisfiable-but-not-valid, or unsatisfiable.

    ``witness`` satisfies ``alpha``; ``countermodel`` satisfies ``!alpha``.
    """
    if logic not in ("qtl", "ptl"):
        raise ValueError(f"logic must be 'qtl' or 'ptl', not {logic!r}")
    sat = qtl_satisfiable if logic == "qtl" else ptl_satisfiable
    stats = SearchStats()
    witness = sat(alpha, caps, stats)
    if witness is None:
        return Decision(UNSATISFIABLE, logic, stats=stats)
    counter = sat(QNot(alpha), caps, stats)
    verdict = VALID if counter is None else SATISFIABLE
    return Decision(verdict, logic, witness, counter, stats)
