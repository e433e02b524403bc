"""Classical propositional formulas over indexed symbols ``p0, p1, ...``.

Formulas are immutable trees.  Truth values are the ints 0 and 1.  The
brute-force routines here (:func:`is_contradictory`, :func:`prop_equiv`)
enumerate every assignment and serve as the ground-truth oracle for the
rest of the package.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import cached_property

from .errors import ParseError, ResourceError, SymbolOutOfDomainError

ENUMERATION_CAP = 24


def symbol_name(index: int) -> str:
    return f"p{index}"


def format_symbols(symbols: Iterable[int]) -> str:
    return "{" + ",".join(symbol_name(i) for i in sorted(symbols)) + "}"


# --------------------------------------------------------------------------
# Assignments


class Assignment(Mapping):
    """A total truth assignment on a finite set of symbols.

    Behaves as an immutable ``{index: bit}`` mapping; hashable, so it can
    key probability distributions.
    """

    __slots__ = ("_map", "_items", "_hash")

    def __init__(self, values=()):
        m = dict(values)
        for k, v in m.items():
            if not isinstance(k, int) or k < 0:
                raise ValueError(f"symbol index must be a natural number, got {k!r}")
            if v not in (0, 1):
                raise ValueError(f"truth value must be 0 or 1, got {v!r}")
            m[k] = int(v)
        self._map = m
        self._items = tuple(sorted(m.items()))
        self._hash = hash(self._items)

    def __getitem__(self, key):
        return self._map[key]

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return self._items == other._items
        return Mapping.__eq__(self, other)

    def __repr__(self):
        inner = ", ".join(f"{symbol_name(k)}:{v}" for k, v in self._items)
        return f"Assignment({{{inner}}})"

    def __lt__(self, other):
        return self._items < other._items

    @property
    def domain(self) -> frozenset:
        return frozenset(self._map)

    def restrict(self, symbols: Iterable[int]) -> Assignment:
        symbols = frozenset(symbols)
        missing = symbols - self.domain
        if missing:
            raise SymbolOutOfDomainError(
                f"cannot restrict to {format_symbols(missing)}: not in domain"
            )
        return Assignment((k, self._map[k]) for k in symbols)

    def bits(self, order=None) -> str:
        order = sorted(self._map) if order is None else order
        return "".join(str(self._map[k]) for k in order)

    @classmethod
    def from_bits(cls, symbols, bits: str) -> Assignment:
        symbols = list(symbols)
        if len(symbols) != len(bits) or any(b not in "01" for b in bits):
            raise ValueError(f"bit string {bits!r} does not match {len(symbols)} symbols")
        return cls(zip(symbols, map(int, bits)))


def all_assignments(symbols: Iterable[int]) -> Iterator[Assignment]:
    """All assignments on ``symbols``, from all-ones down to all-zeros.

    The lowest-indexed symbol is the most significant bit, so for
    ``{p0, p1}`` the order is 11, 10, 01, 00.
    """
    order = sorted(symbols)
    for bits in itertools.product((1, 0), repeat=len(order)):
        yield Assignment(zip(order, bits))


# --------------------------------------------------------------------------
# Formula AST


class Formula:
    """Base class of propositional formula nodes."""

    precedence = 0

    def __str__(self):
        return to_text(self)

    @cached_property
    def symbols(self) -> frozenset:
        """Var(phi): the symbols occurring in the formula."""
        return _collect_symbols(self)

    def evaluate(self, s: Mapping[int, int]) -> int:
        return eval_formula(self, s)

    # operator sugar for building formulas in code
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)


@dataclass(frozen=True, eq=True, repr=False)
class Sym(Formula):
    index: int
    precedence = 6

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 0:
            raise ValueError(f"symbol index must be a natural number, got {self.index!r}")

    def __repr__(self):
        return symbol_name(self.index)


@dataclass(frozen=True, eq=True, repr=False)
class Not(Formula):
    arg: Formula
    precedence = 5

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, eq=True, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula
    op = "?"
    right_assoc = False

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(_Binary):
    precedence = 4
    op = "&"


class Or(_Binary):
    precedence = 3
    op = "|"


class Implies(_Binary):
    precedence = 2
    op = "->"
    right_assoc = True


class Iff(_Binary):
    precedence = 1
    op = "<->"


def _collect_symbols(phi: Formula) -> frozenset:
    out = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Sym):
            out.add(node.index)
        elif isinstance(node, Not):
            stack.append(node.arg)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(out)


def variables(phi: Formula) -> frozenset:
    return phi.symbols


def literal(index: int, bit: int) -> Formula:
    """``p_i^d``: the symbol itself when d = 1, its negation when d = 0."""
    return Sym(index) if bit else Not(Sym(index))


def conjunction(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjunction(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# --------------------------------------------------------------------------
# Semantics


def eval_formula(phi: Formula, s: Mapping[int, int]) -> int:
    if isinstance(phi, Sym):
        try:
            return s[phi.index]
        except KeyError:
            raise SymbolOutOfDomainError(
                f"{symbol_name(phi.index)} is not in the domain of the assignment"
            ) from None
    if isinstance(phi, Not):
        return 1 - eval_formula(phi.arg, s)
    a = eval_formula(phi.left, s)
    if isinstance(phi, And):
        return a & eval_formula(phi.right, s)
    if isinstance(phi, Or):
        return a | eval_formula(phi.right, s)
    if isinstance(phi, Implies):
        return (1 - a) | eval_formula(phi.right, s)
    if isinstance(phi, Iff):
        return int(a == eval_formula(phi.right, s))
    raise TypeError(f"not a propositional formula: {phi!r}")


def minterm(s: Mapping[int, int]) -> Formula:
    """phi_s: the conjunction of literals p_v^{s(v)}, in increasing symbol order."""
    if not len(s):
        raise ValueError("minterm of an assignment with empty domain")
    return conjunction(literal(k, s[k]) for k in sorted(s))


def _check_cap(symbols, cap):
    if len(symbols) > cap:
        raise ResourceError(
            f"brute-force enumeration over {len(symbols)} symbols exceeds the cap of {cap}"
        )


def is_contradictory(phi: Formula, cap: int = ENUMERATION_CAP) -> bool:
    _check_cap(phi.symbols, cap)
    return not any(eval_formula(phi, s) for s in all_assignments(phi.symbols))


def is_tautology(phi: Formula, cap: int = ENUMERATION_CAP) -> bool:
    _check_cap(phi.symbols, cap)
    return all(eval_formula(phi, s) for s in all_assignments(phi.symbols))


def prop_equiv(phi: Formula, psi: Formula, cap: int = ENUMERATION_CAP) -> bool:
    symbols = phi.symbols | psi.symbols
    _check_cap(symbols, cap)
    return all(
        eval_formula(phi, s) == eval_formula(psi, s) for s in all_assignments(symbols)
    )


def satisfying_assignments(phi: Formula, symbols=None) -> list:
    """Assignments on ``symbols`` (default Var(phi)) that make phi true."""
    symbols = phi.symbols if symbols is None else frozenset(symbols)
    return [s for s in all_assignments(symbols) if eval_formula(phi, s)]


# --------------------------------------------------------------------------
# Text syntax


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<sym>p\d+(?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<op><->|->|<=|>=|!=|[<>=!&|()\[\]{};,+\-*/]|¬|∧|∨|→|↔|≥|≤|≠)
    """,
    re.VERBOSE,
)

_UNICODE_OPS = {"¬": "!", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "≥": ">=", "≤": "<=", "≠": "!="}


@dataclass(frozen=True)
class Token:
    kind: str  # 'sym', 'name', 'num', 'op', 'end'
    value: str
    pos: int


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            value = m.group()
            if kind == "op":
                value = _UNICODE_OPS.get(value, value)
            tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class TokenStream:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def peek_at(self, offset: int) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek
        return tok.kind == "op" and tok.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.next()
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.error(f"expected {value!r}")
        return self.next()

    def error(self, message: str, tok: Token = None):
        tok = tok or self.peek
        found = "end of input" if tok.kind == "end" else repr(tok.value)
        raise ParseError(f"{message}, found {found}", self.text, tok.pos)


def parse_prop_tokens(ts: TokenStream, bindings: Mapping[str, Formula] = None) -> Formula:
    """Parse one propositional formula from ``ts``.

    Precedence, tightest first: ``!``, ``&``, ``|``, ``->`` (right
    associative), ``<->``.  Identifiers are looked up in ``bindings``.
    """
    bindings = bindings or {}

    def iff():
        left = implies()
        while ts.accept("<->"):
            left = Iff(left, implies())
        return left

    def implies():
        left = disj()
        if ts.accept("->"):
            return Implies(left, implies())
        return left

    def disj():
        left = conj()
        while ts.accept("|"):
            left = Or(left, conj())
        return left

    def conj():
        left = unary()
        while ts.accept("&"):
            left = And(left, unary())
        return left

    def unary():
        tok = ts.peek
        if ts.accept("!"):
            return Not(unary())
        if ts.accept("("):
            inner = iff()
            ts.expect(")")
            return inner
        if tok.kind == "sym":
            ts.next()
            return Sym(int(tok.value[1:]))
        if tok.kind == "name":
            if tok.value not in bindings:
                ts.error(f"unbound formula name {tok.value!r}")
            ts.next()
            return bindings[tok.value]
        ts.error("expected a propositional formula")

    return iff()


def parse_prop(text: str, bindings: Mapping[str, Formula] = None) -> Formula:
    ts = TokenStream(text)
    phi = parse_prop_tokens(ts, bindings)
    if ts.peek.kind != "end":
        ts.error("unexpected trailing input")
    return phi


def to_text(phi: Formula) -> str:
    """Render with the minimum parentheses needed to reparse the same tree."""
    if isinstance(phi, Sym):
        return symbol_name(phi.index)
    if isinstance(phi, Not):
        inner = to_text(phi.arg)
        if phi.arg.precedence < Not.precedence:
            inner = f"({inner})"
        return f"!{inner}"
    left, right = to_text(phi.left), to_text(phi.right)
    p = phi.precedence
    lp, rp = phi.left.precedence, phi.right.precedence
    if lp < p or (lp == p and phi.right_assoc):
        left = f"({left})"
    if rp < p or (rp == p and not phi.right_assoc):
        right = f"({right})"
    return f"{left} {phi.op} {right}"
