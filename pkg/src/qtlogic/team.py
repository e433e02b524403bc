"""Quantum teams, multi-teams and probability tables.

A quantum team is an ordered list of rows; each row is a total assignment
on its own non-empty domain ``Q_i``.  A symbol outside ``Q_i`` is
indeterminate in that row and is rendered as ``-``.  A multi-team is the
special case where every row has the same domain.

All probabilities are :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CoverError,
    DomainMismatchError,
    EmptyRestrictionError,
    ParseError,
    SymbolOutOfDomainError,
    TableError,
)
from .prop import Assignment, Formula, all_assignments, eval_formula, format_symbols, symbol_name

Rational = Fraction


def _symset(symbols) -> frozenset:
    return frozenset(symbols)


def cover_leq(smaller: Iterable, larger: Iterable) -> bool:
    """``U <= U'`` iff every set of ``smaller`` lies inside some set of ``larger``."""
    larger = [frozenset(u) for u in larger]
    return all(any(frozenset(u) <= v for v in larger) for u in smaller)


@dataclass(frozen=True)
class QuantumTeam:
    rows: tuple

    def __init__(self, rows: Iterable):
        rows = tuple(r if isinstance(r, Assignment) else Assignment(r) for r in rows)
        if not rows:
            raise ValueError("a team needs at least one row")
        for i, r in enumerate(rows):
            if not len(r):
                raise ValueError(f"row {i} has an empty domain")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)

    @property
    def domain(self) -> frozenset:
        """dom(X): the union of all row domains."""
        return frozenset().union(*(r.domain for r in self.rows))

    @property
    def support(self) -> frozenset:
        """Sp(X): the set of distinct row domains."""
        return frozenset(r.domain for r in self.rows)

    def is_multi_team(self) -> bool:
        return len(self.support) == 1

    def omega(self, symbols) -> list:
        """Indices of the rows whose domain contains ``symbols`` (Omega_U)."""
        u = _symset(symbols)
        return [i for i, r in enumerate(self.rows) if u <= r.domain]

    def _defined_rows(self, u: frozenset) -> list:
        rows = [r for r in self.rows if u <= r.domain]
        if not rows:
            raise EmptyRestrictionError(f"no row of the team is defined on {format_symbols(u)}")
        return rows

    def restrict(self, symbols) -> QuantumTeam:
        u = _symset(symbols)
        return QuantumTeam(r.restrict(u) for r in self._defined_rows(u))

    def counts(self, symbols) -> Counter:
        """Multiplicity of each assignment on ``symbols`` among the rows of Omega_U."""
        u = _symset(symbols)
        return Counter(r.restrict(u) for r in self._defined_rows(u))

    def prob(self, symbols, v: Mapping[int, int]) -> Fraction:
        """P_{X,U}(v): relative frequency of ``v`` among the rows defined on U."""
        u = _symset(symbols)
        v = v if isinstance(v, Assignment) else Assignment(v)
        if v.domain != u:
            raise DomainMismatchError(
                f"assignment on {format_symbols(v.domain)} given for U = {format_symbols(u)}"
            )
        rows = self._defined_rows(u)
        return Fraction(sum(1 for r in rows if r.restrict(u) == v), len(rows))

    def distribution(self, symbols) -> dict:
        """The full distribution P_{X,U} over every assignment on U, zeros included."""
        u = _symset(symbols)
        c = self.counts(u)
        n = sum(c.values())
        return {s: Fraction(c.get(s, 0), n) for s in all_assignments(u)}

    def expectation(self, phi: Formula, symbols=None) -> Fraction:
        """[phi]_{X,U}; with U omitted this is [phi]_X with U = Var(phi)."""
        u = phi.symbols if symbols is None else _symset(symbols)
        if not phi.symbols <= u:
            raise SymbolOutOfDomainError(
                f"Var({phi}) is not contained in U = {format_symbols(u)}"
            )
        rows = self._defined_rows(u)
        return Fraction(sum(eval_formula(phi, r) for r in rows), len(rows))

    def __str__(self):
        return format_team(self)


def multi_team(symbols, rows) -> QuantumTeam:
    """Build a multi-team from bit tuples listed in ``symbols`` order."""
    symbols = list(symbols)
    return QuantumTeam(Assignment(zip(symbols, bits)) for bits in rows)


# --------------------------------------------------------------------------
# Covers and probability tables


@dataclass(frozen=True)
class Cover:
    """A finite family of symbol sets; its base is their union."""

    sets: tuple
    base: frozenset

    def __init__(self, sets: Iterable, base=None):
        seen = []
        for u in sets:
            u = frozenset(u)
            if not u:
                raise CoverError("cover sets must be non-empty")
            if u not in seen:
                seen.append(u)
        if not seen:
            raise CoverError("a cover needs at least one set")
        union = frozenset().union(*seen)
        if base is not None and frozenset(base) != union:
            raise CoverError(
                f"sets cover {format_symbols(union)}, not the base {format_symbols(base)}"
            )
        object.__setattr__(self, "sets", tuple(seen))
        object.__setattr__(self, "base", union)

    def __iter__(self):
        return iter(self.sets)

    def __len__(self):
        return len(self.sets)

    def __str__(self):
        return ";".join(format_symbols(u) for u in self.sets)


def parse_cover(text: str) -> Cover:
    """Parse ``{p0,p1};{p0,p3}``; whitespace is ignored."""
    compact = "".join(text.split())
    if not compact:
        raise ParseError("empty cover")
    sets = []
    for chunk in compact.split(";"):
        if not chunk:
            continue
        if not (chunk.startswith("{") and chunk.endswith("}")):
            raise ParseError(f"cover set {chunk!r} must be written as {{p0,p1,...}}")
        names = [n for n in chunk[1:-1].split(",") if n]
        sets.append(frozenset(_parse_symbol(n) for n in names))
    try:
        return Cover(sets)
    except CoverError as e:
        raise ParseError(str(e)) from None


def _parse_symbol(name: str) -> int:
    if len(name) < 2 or name[0] != "p" or not name[1:].isdigit():
        raise ParseError(f"bad proposition symbol {name!r}")
    return int(name[1:])


class ProbabilityTable:
    """One rational distribution ``d_U`` per set ``U`` of a cover."""

    def __init__(self, cover, distributions: Mapping):
        self.cover = cover if isinstance(cover, Cover) else Cover(cover)
        dists = {}
        for u in self.cover.sets:
            if u not in distributions:
                raise TableError(f"no distribution given for {format_symbols(u)}")
            given = distributions[u]
            d = {}
            for s, p in given.items():
                s = s if isinstance(s, Assignment) else Assignment(s)
                if s.domain != u:
                    raise TableError(f"assignment {s!r} is not on {format_symbols(u)}")
                p = Fraction(p)
                if not 0 <= p <= 1:
                    raise TableError(f"probability {p} outside [0, 1]")
                d[s] = p
            if sum(d.values()) != 1:
                raise TableError(
                    f"distribution on {format_symbols(u)} sums to {sum(d.values())}, not 1"
                )
            dists[u] = {s: d.get(s, Fraction(0)) for s in all_assignments(u)}
        extra = set(map(frozenset, distributions)) - set(self.cover.sets)
        if extra:
            raise TableError("distributions given for sets outside the cover")
        self._dists = dists

    @property
    def base(self) -> frozenset:
        return self.cover.base

    def __getitem__(self, u) -> dict:
        return self._dists[frozenset(u)]

    def items(self):
        return ((u, self._dists[u]) for u in self.cover.sets)

    def __eq__(self, other):
        if not isinstance(other, ProbabilityTable):
            return NotImplemented
        return set(self.cover.sets) == set(other.cover.sets) and self._dists == other._dists

    def __hash__(self):
        return hash(frozenset(self.cover.sets))

    def __repr__(self):
        return f"ProbabilityTable({self.cover})"

    def __str__(self):
        return format_table(self)


def associated_table(team: QuantumTeam, cover) -> ProbabilityTable:
    """d_U(v) = P_{X,U}(v) for every U in the cover."""
    cover = cover if isinstance(cover, Cover) else Cover(cover)
    if not cover_leq(cover.sets, team.support):
        bad = [u for u in cover.sets if not team.omega(u)]
        raise CoverError(
            "cover is not dominated by the team support: no row is defined on "
            + ", ".join(format_symbols(u) for u in bad)
        )
    return ProbabilityTable(cover, {u: team.distribution(u) for u in cover.sets})


def team_from_table(table: ProbabilityTable) -> QuantumTeam:
    """A quantum team whose associated table is exactly ``table``.

    Each cover set gets a block of ``b`` rows, ``b`` being the least
    common denominator of its probabilities; assignment ``s`` fills
    ``d_U(s) * b`` of them.

    When one cover set contains another, rows placed for the larger set
    also count towards the smaller one.  Sets are then processed largest
    first and the smaller set's block is sized so that old and new rows
    together give ``d_U``.  This fails, with :class:`TableError`, exactly
    when ``d_U(s) = 0`` while a larger set already gives ``s`` weight.
    """
    order = sorted(table.cover.sets, key=lambda u: (-len(u), sorted(u)))
    rows = []
    for u in order:
        d = table[u]
        lcd = math.lcm(*(p.denominator for p in d.values()))
        seen = Counter(r.restrict(u) for r in rows if u <= r.domain)
        k = sum(seen.values())
        for s, p in d.items():
            if p == 0 and seen[s]:
                raise TableError(
                    f"no team has this table: d_{format_symbols(u)}({s.bits()}) = 0 "
                    "but a larger cover set already puts weight on it"
                )
        # smallest multiple n of lcd with n >= k and n * d(s) >= seen(s) for every s
        need = max([k] + [math.ceil(seen[s] / p) for s, p in d.items() if p])
        n = lcd * max(1, math.ceil(need / lcd))
        for s, p in d.items():
            rows.extend([s] * int(p * n - seen[s]))
    return QuantumTeam(rows)


# --------------------------------------------------------------------------
# Text formats


def format_team(team: QuantumTeam) -> str:
    cols = sorted(team.domain)
    lines = [" ".join(symbol_name(c) for c in cols)]
    for r in team.rows:
        lines.append(" ".join(str(r[c]) if c in r else "-" for c in cols))
    return "\n".join(lines) + "\n"


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_team(text: str) -> QuantumTeam:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty team file")
    _, header = lines[0]
    cols = [_parse_symbol(n) for n in header.split()]
    if len(set(cols)) != len(cols):
        raise ParseError("duplicate column in team header")
    rows = []
    for lineno, line in lines[1:]:
        cells = line.split()
        if len(cells) != len(cols):
            raise ParseError(f"line {lineno}: expected {len(cols)} cells, got {len(cells)}")
        row = {}
        for c, cell in zip(cols, cells):
            if cell == "-":
                continue
            if cell not in ("0", "1"):
                raise ParseError(f"line {lineno}: cell {cell!r} must be 0, 1 or -")
            row[c] = int(cell)
        if not row:
            raise ParseError(f"line {lineno}: row has no determinate value")
        rows.append(Assignment(row))
    if not rows:
        raise ParseError("team file has no rows")
    return QuantumTeam(rows)


def format_table(table: ProbabilityTable) -> str:
    blocks = []
    for u, d in table.items():
        order = sorted(u)
        lines = ["U: " + " ".join(symbol_name(c) for c in order)]
        lines += [f"{s.bits(order)} {p}" for s, p in d.items()]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def parse_rational(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    if not num.lstrip("-").isdigit() or (sep and not den.isdigit()):
        raise ParseError(f"bad rational {text!r}; expected p or p/q")
    if sep and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if sep else 1)


def parse_table(text: str) -> ProbabilityTable:
    blocks = []
    current = None
    for lineno, line in _content_lines(text):
        if line.startswith("U:"):
            order = [_parse_symbol(n) for n in line[2:].split()]
            if not order or len(set(order)) != len(order):
                raise ParseError(f"line {lineno}: bad cover-set header")
            current = (order, {})
            blocks.append(current)
            continue
        if current is None:
            raise ParseError(f"line {lineno}: entry before any 'U:' header")
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<bits> <p/q>'")
        order, d = current
        try:
            s = Assignment.from_bits(order, parts[0])
        except ValueError as e:
            raise ParseError(f"line {lineno}: {e}") from None
        if s in d:
            raise ParseError(f"line {lineno}: assignment {parts[0]} listed twice")
        d[s] = parse_rational(parts[1])
    if not blocks:
        raise ParseError("table file has no 'U:' blocks")
    sets = [frozenset(order) for order, _ in blocks]
    if len(set(sets)) != len(sets):
        raise ParseError("the same cover set appears in two blocks")
    return ProbabilityTable(Cover(sets), {frozenset(o): d for o, d in blocks})
