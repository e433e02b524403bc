"""Exact rational linear-constraint systems.

Constraints are ``sum(a_j * x_j) >= c`` or ``sum(a_j * x_j) > c`` over
rational coefficients; ``<=``, ``<`` and ``=`` are rewritten into these two
forms when built with :func:`constraints`.  :func:`feasible` decides a
conjunction by Fourier-Motzkin elimination (equalities are substituted
away first) and returns a rational witness point, which is re-checked by
exact substitution before it is handed back.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import ResourceError

MAX_ROWS = 20000


@dataclass(frozen=True)
class LinConstraint:
    coeffs: tuple  # ((var, Fraction), ...), sorted by var, no zeros
    strict: bool
    bound: Fraction

    def __init__(self, coeffs, strict: bool = False, bound=0):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged = {}
        for v, a in items:
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"variable ids are natural numbers, got {v!r}")
            merged[v] = merged.get(v, 0) + Fraction(a)
        object.__setattr__(self, "coeffs", tuple(sorted((v, a) for v, a in merged.items() if a)))
        object.__setattr__(self, "strict", bool(strict))
        object.__setattr__(self, "bound", Fraction(bound))

    @property
    def comparator(self) -> str:
        return ">" if self.strict else ">="

    @property
    def variables(self) -> frozenset:
        return frozenset(v for v, _ in self.coeffs)

    def lhs(self, point: Mapping) -> Fraction:
        return sum((a * point.get(v, 0) for v, a in self.coeffs), Fraction(0))

    def holds(self, point: Mapping) -> bool:
        value = self.lhs(point)
        return value > self.bound if self.strict else value >= self.bound

    def __str__(self):
        if self.coeffs:
            lhs = " + ".join(f"{a}*x{v}" for v, a in self.coeffs)
        else:
            lhs = "0"
        return f"{lhs} {self.comparator} {self.bound}"


def constraints(coeffs, op: str, bound) -> list:
    """Build the ``>=``/``>`` constraints expressing ``coeffs . x  op  bound``."""
    c = LinConstraint(coeffs, False, bound)
    neg = LinConstraint(((v, -a) for v, a in c.coeffs), False, -c.bound)
    if op == ">=":
        return [c]
    if op == ">":
        return [LinConstraint(c.coeffs, True, c.bound)]
    if op == "<=":
        return [neg]
    if op == "<":
        return [LinConstraint(neg.coeffs, True, neg.bound)]
    if op == "=":
        return [c, neg]
    raise ValueError(f"unknown comparator {op!r}")


def normalize(c: LinConstraint) -> LinConstraint:
    """The same constraint scaled to coprime integer coefficients."""
    key, strict, bound = _row(dict(c.coeffs), c.strict, c.bound)
    return LinConstraint(key, strict, bound)


def negate(c: LinConstraint) -> LinConstraint:
    """not(a.x >= c) is -a.x > -c, and not(a.x > c) is -a.x >= -c."""
    return LinConstraint(((v, -a) for v, a in c.coeffs), not c.strict, -c.bound)


@dataclass(frozen=True)
class LinSystem:
    constraints: tuple
    num_vars: int

    def __init__(self, constraints: Iterable, num_vars: int = None):
        cs = tuple(constraints)
        used = max((v for c in cs for v, _ in c.coeffs), default=-1) + 1
        if num_vars is None:
            num_vars = used
        elif used > num_vars:
            raise ValueError(f"constraint uses variable x{used - 1} but num_vars = {num_vars}")
        object.__setattr__(self, "constraints", cs)
        object.__setattr__(self, "num_vars", num_vars)

    def holds(self, point: Mapping) -> bool:
        return all(c.holds(point) for c in self.constraints)

    def dump(self) -> str:
        return "\n".join(str(c) for c in self.constraints)


@dataclass
class SolveStats:
    eliminations: int = 0
    substitutions: int = 0
    peak_rows: int = 0
    calls: int = 0

    def merge(self, other: SolveStats):
        self.eliminations += other.eliminations
        self.substitutions += other.substitutions
        self.peak_rows = max(self.peak_rows, other.peak_rows)
        self.calls += other.calls


# --------------------------------------------------------------------------
# Fourier-Motzkin internals.  A row is (coeffs, strict, bound) where coeffs
# is a sorted tuple of (var, int) with gcd 1 and bound is a Fraction.


def _row(coeffs: Mapping, strict: bool, bound: Fraction):
    items = [(v, a) for v, a in coeffs.items() if a]
    if not items:
        return ((), strict, Fraction(bound))
    scale = math.lcm(*(Fraction(a).denominator for _, a in items))
    ints = [(v, int(Fraction(a) * scale)) for v, a in items]
    g = math.gcd(*(a for _, a in ints))
    return (
        tuple(sorted((v, a // g) for v, a in ints)),
        strict,
        Fraction(bound) * scale / g,
    )


def _neg_key(key):
    return tuple((v, -a) for v, a in key)


def _reduce(rows):
    """Drop trivial rows, keep the tightest of parallel rows, detect conflicts.

    Returns the reduced list, or None if some constant row is false or two
    opposite rows leave an empty slab.
    """
    best = {}
    for key, strict, bound in rows:
        if not key:
            if (bound >= 0) if strict else (bound > 0):
                return None
            continue
        old = best.get(key)
        if old is None or bound > old[1] or (bound == old[1] and strict and not old[0]):
            best[key] = (strict, bound)
    for key, (strict, bound) in best.items():
        opp = best.get(_neg_key(key))
        if opp is None:
            continue
        # a.x >= bound and a.x <= -opp_bound
        upper = -opp[1]
        if bound > upper or (bound == upper and (strict or opp[0])):
            return None
    return [(k, s, b) for k, (s, b) in best.items()]


def _find_equality(rows):
    index = {k: (s, b) for k, s, b in rows}
    for key, strict, bound in rows:
        if strict:
            continue
        opp = index.get(_neg_key(key))
        if opp is not None and not opp[0] and opp[1] == -bound:
            return key, bound
    return None


def _substitute(rows, key, bound):
    occurrences = {}
    for k, _, _ in rows:
        for v, _ in k:
            occurrences[v] = occurrences.get(v, 0) + 1
    v, ev = min(key, key=lambda item: (occurrences[item[0]], abs(item[1]), item[0]))
    eq = dict(key)
    sgn = 1 if ev > 0 else -1
    out = []
    drop = {key, _neg_key(key)}
    for k, strict, b in rows:
        if k in drop:
            continue
        coeffs = dict(k)
        rv = coeffs.get(v, 0)
        if not rv:
            out.append((k, strict, b))
            continue
        new = {u: abs(ev) * a for u, a in coeffs.items()}
        for u, a in eq.items():
            new[u] = new.get(u, 0) - sgn * rv * a
        new.pop(v, None)
        out.append(_row(new, strict, abs(ev) * b - sgn * rv * bound))
    return v, eq, out


def _choose_variable(rows):
    pos, neg = {}, {}
    for k, _, _ in rows:
        for v, a in k:
            side = pos if a > 0 else neg
            side[v] = side.get(v, 0) + 1
    candidates = set(pos) | set(neg)
    return min(
        candidates,
        key=lambda v: (pos.get(v, 0) * neg.get(v, 0) - pos.get(v, 0) - neg.get(v, 0), v),
    )


def _combine(p, n, v):
    pc, nc = dict(p[0]), dict(n[0])
    ap, an = pc[v], nc[v]
    new = {u: -an * a for u, a in pc.items()}
    for u, a in nc.items():
        new[u] = new.get(u, 0) + ap * a
    new.pop(v, None)
    return _row(new, p[1] or n[1], -an * p[2] + ap * n[2])


def _value(row, point, v):
    """Bound on x_v implied by ``row`` once the other variables are fixed."""
    coeffs = dict(row[0])
    av = coeffs.pop(v)
    rest = sum((a * point.setdefault(u, Fraction(0)) for u, a in coeffs.items()), Fraction(0))
    return (row[2] - rest) / av, av > 0, row[1]


def _simplest(lo, lo_open, hi, hi_open):
    """The rational of least denominator (then least magnitude) in the interval.

    ``None`` stands for an infinite end; the interval must be nonempty.
    """
    if lo is not None and hi is not None and lo == hi:
        return lo
    if hi is not None and (hi < 0 or (hi == 0 and hi_open)):
        return -_simplest(-hi, hi_open, None if lo is None else -lo, lo_open)
    if lo is None or lo < 0 or (lo == 0 and not lo_open):
        return Fraction(0)
    n = math.floor(lo) + 1 if lo_open or lo.denominator != 1 else lo
    if hi is None or n < hi or (n == hi and not hi_open):
        return Fraction(n)
    base = math.floor(lo)
    # lo and hi lie in [base, base + 1]; recurse on reciprocals of the fractional parts
    inv_hi = 1 / (hi - base)
    inv_lo = None if lo == base else 1 / (lo - base)
    return base + 1 / _simplest(inv_hi, hi_open, inv_lo, lo_open)


def _pick(lo, lo_strict, hi, hi_strict):
    if lo is not None and hi is not None and lo == hi and (lo_strict or hi_strict):
        raise RuntimeError("elimination left an empty interval during back-substitution")
    return _simplest(lo, lo_strict, hi, hi_strict)


def feasible(system: LinSystem, stats: SolveStats = None, max_rows: int = MAX_ROWS):
    """A rational point satisfying every constraint of ``system``, or None."""
    stats = stats if stats is not None else SolveStats()
    stats.calls += 1
    rows = _reduce([_row(dict(c.coeffs), c.strict, c.bound) for c in system.constraints])
    events = []
    while rows:
        eq = _find_equality(rows)
        if eq is not None:
            v, coeffs, out = _substitute(rows, *eq)
            events.append(("eq", v, coeffs, eq[1]))
            stats.substitutions += 1
            rows = _reduce(out)
            if rows is None:
                return None
            continue
        v = _choose_variable(rows)
        pos = [r for r in rows if dict(r[0]).get(v, 0) > 0]
        neg = [r for r in rows if dict(r[0]).get(v, 0) < 0]
        rest = [r for r in rows if v not in dict(r[0])]
        if len(rest) + len(pos) * len(neg) > max_rows:
            raise ResourceError(
                f"Fourier-Motzkin elimination exceeded {max_rows} constraints"
            )
        events.append(("fm", v, pos + neg))
        stats.eliminations += 1
        rows = _reduce(rest + [_combine(p, n, v) for p in pos for n in neg])
        if rows is None:
            return None
        stats.peak_rows = max(stats.peak_rows, len(rows))
    if rows is None:
        return None

    point = {}
    for event in reversed(events):
        if event[0] == "eq":
            _, v, coeffs, bound = event
            rest = sum(
                (a * point.setdefault(u, Fraction(0)) for u, a in coeffs.items() if u != v),
                Fraction(0),
            )
            point[v] = (bound - rest) / coeffs[v]
            continue
        _, v, vrows = event
        lo = hi = None
        lo_strict = hi_strict = False
        for row in vrows:
            val, is_lower, strict = _value(row, point, v)
            if is_lower:
                if lo is None or val > lo:
                    lo, lo_strict = val, strict
                elif val == lo:
                    lo_strict = lo_strict or strict
            else:
                if hi is None or val < hi:
                    hi, hi_strict = val, strict
                elif val == hi:
                    hi_strict = hi_strict or strict
        point[v] = _pick(lo, lo_strict, hi, hi_strict)
    witness = {v: point.get(v, Fraction(0)) for v in range(system.num_vars)}
    for v, val in point.items():
        witness.setdefault(v, val)
    for c in system.constraints:
        if not c.holds(witness):
            raise RuntimeError(f"witness fails constraint {c}; elimination is unsound")
    return witness
