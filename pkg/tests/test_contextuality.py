import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtlogic.contextuality import (
    CONTEXTUAL,
    NON_CONTEXTUAL,
    STRONGLY_CONTEXTUAL,
    bell_text,
    classify,
    derive_bell,
    global_section,
    has_global_section,
    is_strongly_contextual,
    possible_assignments,
    table_expectation,
    violation,
)
from qtlogic.data import example
from qtlogic.errors import AmbiguityError, CoverError, NotContradictoryError
from qtlogic.logic import is_normal, parse, parse_formula_list, to_qtl_text
from qtlogic.prop import Assignment, Not, Sym, parse_prop
from qtlogic.team import Cover, ProbabilityTable, associated_table, multi_team, parse_table, parse_team

PHIS = [phi for _, phi in parse_formula_list(example("bell_formulas.txt"))]
BELL_COVER = Cover([{0, 1}, {0, 3}, {1, 2}, {2, 3}])


def table(name):
    return parse_table(example(name))


def test_derive_bell_four_pairs():
    atom = derive_bell(PHIS)
    assert is_normal(atom)
    assert atom == parse(example("bell.qtl"))


def test_derive_bell_two_formulas():
    p0 = Sym(0)
    assert to_qtl_text(derive_bell([p0, Not(p0)])) == "[p0] + [!p0] <= 1"


def test_derive_bell_needs_contradiction():
    with pytest.raises(NotContradictoryError):
        derive_bell([Sym(0), Sym(1)])
    general = derive_bell([Sym(0), Sym(1)], general=True)
    assert to_qtl_text(general) == "-[p0] - [p1] + [p0 & p1] >= -1"


def test_violations():
    assert violation(table("table3.table"), PHIS) == F(1, 4)
    assert violation(table("table4.table"), PHIS) == 1
    assert violation(table("table2.table"), PHIS) == 0


def test_violation_is_permutation_invariant():
    t = table("table3.table")
    for perm in itertools.permutations(PHIS):
        assert violation(t, perm) == F(1, 4)


def test_expectation_needs_a_covering_context():
    with pytest.raises(CoverError):
        table_expectation(table("table3.table"), parse_prop("p0 & p2"))


def test_ambiguous_expectation():
    t = ProbabilityTable(
        Cover([{0, 1}, {0, 2}]),
        {
            frozenset({0, 1}): {Assignment({0: 1, 1: 1}): 1},
            frozenset({0, 2}): {Assignment({0: 0, 2: 1}): 1},
        },
    )
    with pytest.raises(AmbiguityError):
        table_expectation(t, Sym(0))
    assert table_expectation(t, Sym(1)) == 1


def test_global_sections():
    section = global_section(table("table2.table"))
    assert section is not None
    assert sum(section.values()) == 1
    t2 = table("table2.table")
    for u, d in t2.items():
        for s, p in d.items():
            assert sum(q for g, q in section.items() if g.restrict(u) == s) == p
    assert not has_global_section(table("table3.table"))
    assert not has_global_section(table("table4.table"))


def test_figure_one_distribution_is_a_section():
    fig1 = parse_team(example("figure1.team"))
    assert has_global_section(associated_table(fig1, BELL_COVER))


def test_strong_contextuality():
    assert is_strongly_contextual(table("table4.table"))
    assert is_strongly_contextual(table("table5.table"))
    t3 = table("table3.table")
    assert not is_strongly_contextual(t3)
    ones = Assignment({0: 1, 1: 1, 2: 1, 3: 1})
    assert ones in possible_assignments(t3)
    assert [d[ones.restrict(u)] for u, d in t3.items()] == [F(1, 2), F(3, 8), F(3, 8), F(1, 8)]


def test_classification():
    assert classify(table("table2.table")) == NON_CONTEXTUAL
    assert classify(table("table3.table")) == CONTEXTUAL
    assert classify(table("table4.table")) == STRONGLY_CONTEXTUAL
    assert classify(table("table5.table")) == STRONGLY_CONTEXTUAL


def test_bell_text_uses_names():
    assert bell_text(PHIS, ["f0", "f1", "f2", "f3"]) == "[f0] + [f1] + [f2] + [f3] <= 3"


rows4 = st.lists(st.tuples(*[st.integers(0, 1)] * 4), min_size=1, max_size=10)


@given(rows4)
def test_multi_team_tables_are_non_contextual(rows):
    team = multi_team([0, 1, 2, 3], rows)
    t = associated_table(team, BELL_COVER)
    assert has_global_section(t)
    assert not is_strongly_contextual(t)
    assert violation(t, PHIS) == 0
