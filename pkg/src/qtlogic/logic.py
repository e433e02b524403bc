"""Formulas of probabilistic and quantum team logic.

An atom is a linear inequality ``a_0 (phi_0; V_0) + ... >= c`` with
integer coefficients over *elementary components* ``(phi; V)``; formulas
close atoms under negation and conjunction (plus the derived ``|``,
``->`` and ``<->``).  PTL formulas are the normal ones, where every
support is ``Var(phi)``.

Concrete syntax::

    let phi0 = (p0 & p1) | (!p0 & !p1)
    phi0 + 2*[p0 & p1; {p0,p1,p2}] - [p3] >= 1/2 & !([p1] = 1)

A component is ``[formula; {symbols}]``, ``[formula]`` (normal support),
a bare symbol, or a ``let``-bound name.  Comparators ``>= > <= < = !=``
and rational constants are accepted and rewritten at parse time into
``>=`` atoms with integer coefficients.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, SupportError
from .prop import (
    Formula,
    Sym,
    TokenStream,
    format_symbols,
    parse_prop_tokens,
    to_text,
)
from .team import QuantumTeam, cover_leq

KEYWORDS = {"let", "true", "false"}


@dataclass(frozen=True)
class Component:
    """An elementary component ``(phi; V)`` with ``Var(phi) ⊆ V``."""

    formula: Formula
    support: frozenset

    def __init__(self, formula: Formula, support=None):
        support = formula.symbols if support is None else frozenset(support)
        if not formula.symbols <= support:
            raise SupportError(
                f"symbols of {to_text(formula)} are not inside the support {format_symbols(support)}"
            )
        object.__setattr__(self, "formula", formula)
        object.__setattr__(self, "support", support)

    @property
    def is_normal(self) -> bool:
        return self.support == self.formula.symbols

    def __str__(self):
        if self.is_normal:
            return f"[{to_text(self.formula)}]"
        return f"[{to_text(self.formula)}; {format_symbols(self.support)}]"


class QtlFormula:
    precedence = 0

    def __str__(self):
        return to_qtl_text(self)

    def __and__(self, other):
        return QAnd(self, other)

    def __or__(self, other):
        return QOr(self, other)

    def __invert__(self):
        return QNot(self)


@dataclass(frozen=True)
class LinAtom(QtlFormula):
    """``sum(a * component) >= bound`` with integer ``a`` and ``bound``."""

    terms: tuple
    bound: int
    precedence = 6

    def __init__(self, terms: Iterable, bound):
        terms = tuple((int(a), c) for a, c in terms)
        if not terms:
            raise ValueError("an atom needs at least one term")
        for a, c in terms:
            if not isinstance(c, Component):
                raise TypeError(f"expected a Component, got {c!r}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "bound", int(bound))


@dataclass(frozen=True)
class QTrue(QtlFormula):
    precedence = 6


@dataclass(frozen=True)
class QFalse(QtlFormula):
    precedence = 6


@dataclass(frozen=True)
class QNot(QtlFormula):
    arg: QtlFormula
    precedence = 5


@dataclass(frozen=True)
class _QBinary(QtlFormula):
    left: QtlFormula
    right: QtlFormula
    op = "?"
    right_assoc = False


class QAnd(_QBinary):
    precedence = 4
    op = "&"


class QOr(_QBinary):
    precedence = 3
    op = "|"


class QImplies(_QBinary):
    precedence = 2
    op = "->"
    right_assoc = True


class QIff(_QBinary):
    precedence = 1
    op = "<->"


def qand(parts: Iterable[QtlFormula]) -> QtlFormula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    out = None
    for p in parts:
        out = p if out is None else QAnd(out, p)
    return QTrue() if out is None else out


# -- abbreviations -----------------------------------------------------------


def geq(terms, bound) -> LinAtom:
    return LinAtom(terms, bound)


def leq(terms, bound) -> LinAtom:
    return LinAtom(((-a, c) for a, c in terms), -bound)


def equals(terms, bound) -> QtlFormula:
    terms = list(terms)
    return QAnd(geq(terms, bound), leq(terms, bound))


def less(terms, bound) -> QtlFormula:
    return QNot(geq(terms, bound))


def greater(terms, bound) -> QtlFormula:
    return QNot(leq(terms, bound))


# -- structure -----------------------------------------------------------------


def atoms(alpha: QtlFormula) -> list:
    """Atoms of ``alpha`` left to right, with repetitions."""
    out = []
    stack = [alpha]
    while stack:
        node = stack.pop()
        if isinstance(node, LinAtom):
            out.append(node)
        elif isinstance(node, QNot):
            stack.append(node.arg)
        elif isinstance(node, _QBinary):
            stack.append(node.right)
            stack.append(node.left)
    return out


def elementary_components(alpha: QtlFormula) -> tuple:
    """EC(alpha): distinct components in order of first occurrence."""
    seen = {}
    for atom in atoms(alpha):
        for _, c in atom.terms:
            seen.setdefault(c, None)
    return tuple(seen)


def support(alpha: QtlFormula) -> frozenset:
    """Sp(alpha): the set of supports of the elementary components."""
    return frozenset(c.support for c in elementary_components(alpha))


def symbols(alpha: QtlFormula) -> frozenset:
    return frozenset().union(*(c.formula.symbols for c in elementary_components(alpha)))


def is_classical(alpha: QtlFormula) -> bool:
    return len(support(alpha)) <= 1


def is_normal(alpha: QtlFormula) -> bool:
    return all(c.is_normal for c in elementary_components(alpha))


def map_components(alpha: QtlFormula, fn) -> QtlFormula:
    if isinstance(alpha, LinAtom):
        return LinAtom(((a, fn(c)) for a, c in alpha.terms), alpha.bound)
    if isinstance(alpha, QNot):
        return QNot(map_components(alpha.arg, fn))
    if isinstance(alpha, _QBinary):
        return type(alpha)(map_components(alpha.left, fn), map_components(alpha.right, fn))
    return alpha


def widen(alpha: QtlFormula, base) -> QtlFormula:
    """Replace every support by ``base``, giving a classical formula."""
    base = frozenset(base)
    return map_components(alpha, lambda c: Component(c.formula, base))


# -- semantics ----------------------------------------------------------------


def evaluate(alpha: QtlFormula, value) -> bool:
    """Truth of ``alpha`` when component ``c`` takes the number ``value(c)``."""
    if isinstance(alpha, LinAtom):
        return sum(a * value(c) for a, c in alpha.terms) >= alpha.bound
    if isinstance(alpha, QNot):
        return not evaluate(alpha.arg, value)
    if isinstance(alpha, QAnd):
        return evaluate(alpha.left, value) and evaluate(alpha.right, value)
    if isinstance(alpha, QOr):
        return evaluate(alpha.left, value) or evaluate(alpha.right, value)
    if isinstance(alpha, QImplies):
        return (not evaluate(alpha.left, value)) or evaluate(alpha.right, value)
    if isinstance(alpha, QIff):
        return evaluate(alpha.left, value) == evaluate(alpha.right, value)
    if isinstance(alpha, QTrue):
        return True
    if isinstance(alpha, QFalse):
        return False
    raise TypeError(f"not a QTL formula: {alpha!r}")


def component_values(team: QuantumTeam, alpha: QtlFormula) -> dict:
    """``{(phi; V): [phi]_{X,V}}`` for every elementary component of ``alpha``."""
    sp = support(alpha)
    if not cover_leq(sp, team.support):
        bad = [v for v in sp if not team.omega(v)]
        raise SupportError(
            "Sp(alpha) is not dominated by Sp(X): no row is defined on "
            + ", ".join(format_symbols(v) for v in sorted(bad, key=sorted))
        )
    return {c: team.expectation(c.formula, c.support) for c in elementary_components(alpha)}


def satisfies(team: QuantumTeam, alpha: QtlFormula) -> bool:
    """``X |= alpha`` under quantum team semantics."""
    values = component_values(team, alpha)
    return evaluate(alpha, values.__getitem__)


def ptl_satisfies(team: QuantumTeam, alpha: QtlFormula) -> bool:
    """``X |= alpha`` for a multi-team and a normal (PTL) formula."""
    if not team.is_multi_team():
        raise SupportError("PTL semantics needs a multi-team (all rows on one domain)")
    if not is_normal(alpha):
        raise SupportError("PTL formulas are normal: every support must equal Var(phi)")
    missing = symbols(alpha) - team.domain
    if missing:
        raise SupportError(f"symbols {format_symbols(missing)} are not in dom(X)")
    return satisfies(team, widen(alpha, team.domain))


# -- printing -----------------------------------------------------------------


def _lhs_text(terms) -> str:
    parts = []
    for i, (a, c) in enumerate(terms):
        mag = "" if abs(a) == 1 else f"{abs(a)}*"
        if i == 0:
            parts.append(f"{'-' if a < 0 else ''}{mag}{c}")
        else:
            parts.append(f"{'-' if a < 0 else '+'} {mag}{c}")
    return " ".join(parts)


def _flip(atom: LinAtom):
    """Terms and bound with the signs chosen so that some coefficient is positive."""
    if all(a < 0 for a, _ in atom.terms):
        return tuple((-a, c) for a, c in atom.terms), -atom.bound, True
    return atom.terms, atom.bound, False


def atom_text(atom: LinAtom) -> str:
    """``2*[p0] - [p1] >= 1``; atoms with only negative terms print with ``<=``."""
    terms, bound, flipped = _flip(atom)
    return f"{_lhs_text(terms)} {'<=' if flipped else '>='} {bound}"


def _equation(alpha) -> bool:
    if not (isinstance(alpha, QAnd) and isinstance(alpha.left, LinAtom)):
        return False
    mirror = LinAtom(((-a, c) for a, c in alpha.left.terms), -alpha.left.bound)
    return alpha.right == mirror


def to_qtl_text(alpha: QtlFormula) -> str:
    if isinstance(alpha, LinAtom):
        return atom_text(alpha)
    if _equation(alpha):
        return f"{_lhs_text(alpha.left.terms)} = {alpha.left.bound}"
    if isinstance(alpha, QTrue):
        return "true"
    if isinstance(alpha, QFalse):
        return "false"
    if isinstance(alpha, QNot):
        inner = to_qtl_text(alpha.arg)
        if not isinstance(alpha.arg, (QNot, QTrue, QFalse)):
            inner = f"({inner})"
        return f"!{inner}"
    left, right = to_qtl_text(alpha.left), to_qtl_text(alpha.right)
    p = alpha.precedence
    lp = LinAtom.precedence if _equation(alpha.left) else alpha.left.precedence
    rp = LinAtom.precedence if _equation(alpha.right) else alpha.right.precedence
    if lp < p or (lp == p and alpha.right_assoc):
        left = f"({left})"
    if rp < p or (rp == p and not alpha.right_assoc):
        right = f"({right})"
    return f"{left} {alpha.op} {right}"


# -- parsing ------------------------------------------------------------------

_COMPARATORS = (">=", "<=", "!=", ">", "<", "=")


class _Parser:
    def __init__(self, ts: TokenStream, bindings: Mapping[str, Formula]):
        self.ts = ts
        self.bindings = dict(bindings)

    def formula(self) -> QtlFormula:
        left = self.implies()
        while self.ts.accept("<->"):
            left = QIff(left, self.implies())
        return left

    def implies(self):
        left = self.disj()
        if self.ts.accept("->"):
            return QImplies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.ts.accept("|"):
            left = QOr(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.ts.accept("&"):
            left = QAnd(left, self.unary())
        return left

    def unary(self):
        ts = self.ts
        tok = ts.peek
        if ts.accept("!"):
            return QNot(self.unary())
        if ts.accept("("):
            inner = self.formula()
            ts.expect(")")
            return inner
        if tok.kind == "name" and tok.value in ("true", "false"):
            ts.next()
            return QTrue() if tok.value == "true" else QFalse()
        return self.comparison()

    def comparison(self):
        ts = self.ts
        start = ts.peek
        lterms, lconst = self.linexpr()
        tok = ts.peek
        if not (tok.kind == "op" and tok.value in _COMPARATORS):
            ts.error("expected a comparison operator")
        ts.next()
        rterms, rconst = self.linexpr()
        terms = lterms + [(-a, c) for a, c in rterms]
        bound = rconst - lconst
        if not terms:
            ts.error("comparison mentions no component", start)
        scale = math.lcm(*(Fraction(a).denominator for a, _ in terms), Fraction(bound).denominator)
        iterms = [(int(a * scale), c) for a, c in terms]
        ibound = int(bound * scale)
        op = tok.value
        if op == ">=":
            return geq(iterms, ibound)
        if op == "<=":
            return leq(iterms, ibound)
        if op == "=":
            return equals(iterms, ibound)
        if op == "<":
            return less(iterms, ibound)
        if op == ">":
            return greater(iterms, ibound)
        return QNot(equals(iterms, ibound))

    def linexpr(self):
        terms, const = [], Fraction(0)
        sign = 1
        if self.ts.accept("-"):
            sign = -1
        else:
            self.ts.accept("+")
        while True:
            coef, comp = self.term()
            coef *= sign
            if comp is None:
                const += coef
            else:
                terms.append((coef, comp))
            if self.ts.accept("+"):
                sign = 1
            elif self.ts.accept("-"):
                sign = -1
            else:
                return terms, const

    def term(self):
        ts = self.ts
        coef = Fraction(1)
        while ts.accept("-"):
            coef = -coef
        if ts.peek.kind == "num":
            coef *= self.number()
            if not ts.accept("*"):
                return coef, None
        return coef, self.component()

    def number(self) -> Fraction:
        num = int(self.ts.next().value)
        if self.ts.accept("/"):
            tok = self.ts.peek
            if tok.kind != "num":
                self.ts.error("expected a denominator")
            den = int(self.ts.next().value)
            if den == 0:
                self.ts.error("zero denominator", tok)
            return Fraction(num, den)
        return Fraction(num)

    def component(self) -> Component:
        ts = self.ts
        tok = ts.peek
        if tok.kind == "sym":
            ts.next()
            return Component(Sym(int(tok.value[1:])))
        if tok.kind == "name":
            if tok.value not in self.bindings:
                ts.error(f"unbound formula name {tok.value!r}")
            ts.next()
            return Component(self.bindings[tok.value])
        if ts.accept("["):
            phi = parse_prop_tokens(ts, self.bindings)
            supp = None
            if ts.accept(";"):
                supp = self.symbol_set()
            ts.expect("]")
            try:
                return Component(phi, supp)
            except SupportError as e:
                raise ParseError(str(e), ts.text, tok.pos) from None
        ts.error("expected a component such as [p0 & p1; {p0,p1}]")

    def symbol_set(self) -> frozenset:
        ts = self.ts
        ts.expect("{")
        out = set()
        while True:
            tok = ts.peek
            if tok.kind != "sym":
                ts.error("expected a proposition symbol")
            ts.next()
            out.add(int(tok.value[1:]))
            if not ts.accept(","):
                break
        ts.expect("}")
        if not out:
            ts.error("empty support")
        return frozenset(out)


def parse(text: str, bindings: Mapping[str, Formula] = None) -> QtlFormula:
    """Parse a formula file: optional ``let`` lines, then one formula."""
    return parse_document(text, bindings)[0]


def parse_document(text: str, bindings: Mapping[str, Formula] = None):
    """Like :func:`parse` but also returns the ``let`` bindings in order."""
    ts = TokenStream(text)
    names = dict(bindings or {})
    order = []
    while ts.peek.kind == "name" and ts.peek.value == "let":
        ts.next()
        tok = ts.peek
        if tok.kind != "name" or tok.value in KEYWORDS:
            ts.error("expected a formula name after 'let'")
        ts.next()
        ts.expect("=")
        names[tok.value] = parse_prop_tokens(ts, names)
        order.append(tok.value)
    if ts.peek.kind == "end":
        ts.error("expected a formula")
    alpha = _Parser(ts, names).formula()
    if ts.peek.kind != "end":
        ts.error("unexpected trailing input")
    return alpha, {n: names[n] for n in order}


def parse_formula_list(text: str) -> list:
    """``(name, phi)`` pairs, one per line; lines without ``let name =`` get name None."""
    out = []
    names = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        ts = TokenStream(line)
        name = None
        if ts.peek.kind == "name" and ts.peek.value == "let":
            ts.next()
            tok = ts.next()
            if tok.kind != "name" or tok.value in KEYWORDS:
                ts.error("expected a formula name after 'let'", tok)
            ts.expect("=")
            name = tok.value
        phi = parse_prop_tokens(ts, names)
        if ts.peek.kind != "end":
            ts.error("unexpected trailing input")
        if name:
            names[name] = phi
        out.append((name, phi))
    return out
