import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtlogic.data import example
from qtlogic.decide import (
    SATISFIABLE,
    UNSATISFIABLE,
    VALID,
    Caps,
    GluingStep,
    build_beta,
    build_gamma,
    decide,
    minterm_component,
    ordered_supports,
    ptl_satisfiable,
    ptl_valid,
    qtl_satisfiable,
    qtl_valid,
    synthesize,
)
from qtlogic.errors import ResourceError, SupportError, SynthesisInvariantError
from qtlogic.logic import (
    QNot,
    atoms,
    component_values,
    parse,
    ptl_satisfies,
    satisfies,
    support,
)
from qtlogic.prop import Assignment, all_assignments, conjunction, is_contradictory
from qtlogic.team import associated_table, parse_table

from oracles import brute_force_satisfiable, independent_satisfies, random_prop, random_qtl


def test_ordered_supports_put_supersets_first():
    order = ordered_supports([{0}, {0, 1}, {2}, {0, 1, 2}])
    for i, v in enumerate(order):
        assert not any(v < w for w in order[i + 1 :])


def test_beta_pruning_drops_only_reflexive_pairs():
    sup = [{0}, {0, 1}]
    full, pruned = build_beta(sup), build_beta(sup, prune=True)
    # pairs (V, V') with V ⊆ V': 3 unpruned, 1 pruned; 2^|V| minterms, 2 directions, 2 atoms each
    assert len(atoms(full)) == (2 + 4 + 2) * 2 * 2 * 2
    assert len(atoms(pruned)) == 2 * 2 * 2 * 2


def test_gamma_mentions_every_minterm():
    alpha = parse("[p0 | p1] >= 1/2")
    gamma = build_gamma(alpha)
    comps = {c for a in atoms(gamma) for _, c in a.terms}
    for s in all_assignments({0, 1}):
        assert minterm_component(s, {0, 1}) in comps


def test_synthesize_single_support():
    v = frozenset({0})
    values = {
        minterm_component(Assignment({0: 1}), v): F(1, 2),
        minterm_component(Assignment({0: 0}), v): F(1, 2),
    }
    team = synthesize(values, [v])
    assert sorted(r[0] for r in team.rows) == [0, 1]


def test_synthesize_nested_supports_uses_case_two():
    big, small = frozenset({0, 1}), frozenset({0})
    values = {}
    for s, p in zip(all_assignments(big), [F(1, 2), 0, 0, F(1, 2)]):
        values[minterm_component(s, big)] = p
    for s, p in zip(all_assignments(small), [F(1, 3), F(2, 3)]):
        values[minterm_component(s, small)] = p
    trace = []
    team = synthesize(values, [small, big], trace)
    assert [step.support for step in trace] == [big, small]
    assert trace[1].case == 2
    step = trace[1]
    assert sum(step.added.values()) == step.k * (step.p - 1)
    assert team.prob(small, {0: 1}) == F(1, 3)
    assert team.prob(big, {0: 1, 1: 1}) == F(1, 2)


def test_synthesize_rejects_beta_violations():
    big, small = frozenset({0, 1}), frozenset({0})
    values = {}
    for s, p in zip(all_assignments(big), [1, 0, 0, 0]):
        values[minterm_component(s, big)] = F(p)
    for s, p in zip(all_assignments(small), [0, 1]):
        values[minterm_component(s, small)] = F(p)
    with pytest.raises(SynthesisInvariantError):
        synthesize(values, [big, small])


def test_bell_witness_reproduces_table_three():
    table = parse_table(example("table3.table"))
    values = {}
    for u, d in table.items():
        for s, p in d.items():
            values[minterm_component(s, u)] = p
    team = synthesize(values, table.cover.sets)
    assert associated_table(team, table.cover) == table


# -- worked examples ----------------------------------------------------------------


@pytest.fixture(scope="module")
def bell():
    return parse(example("bell.qtl"))


def test_bell_is_ptl_valid_but_not_qtl_valid(bell):
    assert ptl_valid(bell)
    assert not qtl_valid(bell)
    counter = qtl_satisfiable(QNot(bell))
    assert satisfies(counter, QNot(bell))


def test_bell_decision_report(bell):
    d = decide(bell)
    assert d.verdict == SATISFIABLE
    assert satisfies(d.witness, bell)
    assert satisfies(d.countermodel, QNot(bell))
    assert decide(bell, "ptl").verdict == VALID


def test_maximal_violation_is_satisfiable():
    alpha = parse(example("bell_maximal.qtl"))
    team = qtl_satisfiable(alpha)
    assert team is not None
    assert set(component_values(team, alpha).values()) == {1}


def test_general_bell_inequalities_are_ptl_valid():
    rng = random.Random(5)
    checked = 0
    while checked < 6:
        phis = [random_prop(rng, {0, 1, 2}) for _ in range(rng.randint(2, 3))]
        if not is_contradictory(conjunction(phis)):
            continue
        terms = " + ".join(f"[{p}]" for p in phis)
        assert ptl_valid(parse(f"{terms} <= {len(phis) - 1}"))
        checked += 1


def test_unsatisfiable_bounds():
    assert qtl_satisfiable(parse("[p0; {p0}] >= 1 & [p0; {p0}] < 1")) is None
    assert decide(parse("[p0] > 1")).verdict == UNSATISFIABLE


def test_axioms_are_valid():
    assert qtl_valid(parse("[p0 | !p0; {p0,p1}] = 1"))
    assert qtl_valid(parse("[p0 & p1; {p0,p1}] + [p0 & !p1; {p0,p1}] = [p0; {p0,p1}]"))
    assert qtl_valid(parse("[p0 & !p0; {p0}] = 0"))
    # with different supports additivity fails
    assert not qtl_valid(parse(example("additivity.qtl")))


def test_ptl_half():
    team = ptl_satisfiable(parse("[p0] >= 1/2"))
    assert team.is_multi_team()
    assert ptl_satisfies(team, parse("[p0] >= 1/2"))


def test_ptl_needs_normal_formulas():
    with pytest.raises(SupportError):
        ptl_satisfiable(parse("[p0; {p0,p1}] >= 1"))


def test_double_slit():
    alpha = parse(example("double_slit.qtl"))
    team = qtl_satisfiable(alpha)
    assert team is not None
    assert satisfies(team, parse("[(p0 | p1) & !(p0 & p1)] = 1"))
    assert satisfies(team, parse("[((p0 | p1) & !(p0 & p1)) & p2; {p0,p1,p2}] != [p2]"))


def test_caps():
    alpha = parse(example("bell.qtl"))
    with pytest.raises(ResourceError):
        qtl_satisfiable(alpha, Caps(max_supports=2))
    with pytest.raises(ResourceError):
        qtl_satisfiable(alpha, Caps(max_variables=5))


def test_decide_rejects_unknown_logic(bell):
    with pytest.raises(ValueError):
        decide(bell, "ltl")


# -- brute-force agreement ---------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_agrees_with_team_enumeration(seed):
    alpha = random_qtl(random.Random(seed))
    trace = []
    team = qtl_satisfiable(alpha, trace=trace)
    ref = brute_force_satisfiable(alpha)
    assert (team is None) == (ref is None)
    if team is not None:
        assert independent_satisfies(team.rows, alpha)
        assert set(team.support) <= set(support(alpha))
    for step in trace:
        assert isinstance(step, GluingStep)
        if step.case == 2:
            assert sum(step.added.values()) == step.k * (step.p - 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_validity_is_unsatisfiable_negation(seed):
    alpha = random_qtl(random.Random(seed))
    d = decide(alpha)
    ref_sat = brute_force_satisfiable(alpha) is not None
    ref_neg = brute_force_satisfiable(QNot(alpha)) is not None
    expected = UNSATISFIABLE if not ref_sat else (VALID if not ref_neg else SATISFIABLE)
    assert d.verdict == expected
