"""The eleven acceptance criteria, one test each.

Every test prints a single PASS/FAIL line; the lines are also repeated in
the pytest terminal summary.
"""

import random
import time
from fractions import Fraction as F

import pytest

from qtlogic.cli import main
from qtlogic.contextuality import (
    CONTEXTUAL,
    NON_CONTEXTUAL,
    STRONGLY_CONTEXTUAL,
    classify,
    violation,
)
from qtlogic.data import example, example_path
from qtlogic.decide import qtl_satisfiable
from qtlogic.lin import LinConstraint, LinSystem, feasible
from qtlogic.logic import component_values, parse, parse_formula_list, satisfies, support
from qtlogic.prop import all_assignments
from qtlogic.team import (
    Cover,
    ProbabilityTable,
    associated_table,
    parse_cover,
    parse_table,
    parse_team,
    team_from_table,
)

from conftest import ACCEPTANCE_LINES
from oracles import (
    brute_force_satisfiable,
    grid_feasible,
    independent_satisfies,
    random_qtl,
    random_system,
    vertex_feasible,
)

PHIS = [phi for _, phi in parse_formula_list(example("bell_formulas.txt"))]
BELL_COVER = parse_cover("{p0,p1};{p0,p3};{p1,p2};{p2,p3}")


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def table(name):
    return parse_table(example(name))


def test_01_bell_table_reproduction():
    start = time.perf_counter()
    t = associated_table(parse_team(example("figure2.team")), BELL_COVER)
    elapsed = time.perf_counter() - start
    entries = [p for _, d in t.items() for p in d.values()]
    ok = (
        t == table("table3.table")
        and len(entries) == 16
        and set(entries) <= {F(1, 2), 0, F(3, 8), F(1, 8)}
        and elapsed < 1
    )
    report(1, ok, f"figure-2 team gives the 16-entry Bell table ({elapsed:.3f}s)")


def test_02_bell_violation():
    v3, v4 = violation(table("table3.table"), PHIS), violation(table("table4.table"), PHIS)
    report(2, v3 == F(1, 4) and v4 == 1, f"violations {v3} and {v4}")


def test_03_ptl_validity_cli(capsys, tmp_path):
    bell = str(example_path("bell.qtl"))
    start = time.perf_counter()
    ptl_code = main(["decide", bell, "--logic", "ptl"])
    ptl_time = time.perf_counter() - start
    ptl_out = capsys.readouterr().out

    counter = tmp_path / "counter.team"
    start = time.perf_counter()
    qtl_code = main(["decide", bell, "--logic", "qtl", "--countermodel", str(counter)])
    qtl_time = time.perf_counter() - start
    qtl_out = capsys.readouterr().out

    negation = tmp_path / "negation.qtl"
    negation.write_text(example("bell_formulas.txt") + "!([f0] + [f1] + [f2] + [f3] <= 3)\n")
    eval_code = main(["eval", str(counter), str(negation)])
    capsys.readouterr()

    ok = (
        ptl_code == 0
        and "verdict: valid" in ptl_out
        and qtl_code == 1
        and "verdict: satisfiable" in qtl_out
        and eval_code == 0
        and ptl_time < 60
        and qtl_time < 60
    )
    report(3, ok, f"ptl valid ({ptl_time:.2f}s), qtl satisfiable with checked countermodel ({qtl_time:.2f}s)")


def test_04_maximal_violation():
    alpha = parse(example("bell_maximal.qtl"))
    team = qtl_satisfiable(alpha)
    ok = team is not None and independent_satisfies(list(team.rows), alpha)
    ok = ok and set(component_values(team, alpha).values()) == {1}
    report(4, ok, f"sum = 4 satisfied by a {len(team) if team else 0}-row team")


def test_05_counterexample_teams():
    t6 = parse_team(example("table6.team"))
    add = parse(example("additivity.qtl"))
    v6 = sorted(component_values(t6, add).values())
    t7 = parse_team(example("table7.team"))
    rule = parse(example("rule_f.qtl"))
    v7 = sorted(component_values(t7, rule).values())
    ok = (
        not satisfies(t6, add)
        and v6 == [F(1, 2)] * 3
        and not satisfies(t7, rule)
        and v7 == [0, F(1, 2)]
    )
    report(5, ok, f"additivity values {[str(v) for v in v6]}, equality values {[str(v) for v in v7]}")


def _random_table(rng):
    # measurement contexts: distinct sets, none contained in another
    while True:
        sets = {frozenset(rng.sample(range(5), rng.randint(1, 3))) for _ in range(rng.randint(1, 3))}
        if not any(u < v for u in sets for v in sets):
            break
    dists = {}
    for u in sets:
        assignments = list(all_assignments(u))
        den = rng.randint(1, 12)
        weights = [0] * len(assignments)
        for _ in range(den):
            weights[rng.randrange(len(assignments))] += 1
        dists[u] = {s: F(w, den) for s, w in zip(assignments, weights)}
    return ProbabilityTable(Cover(sets), dists)


def test_06_table_team_round_trip():
    rng = random.Random(6)
    bad = 0
    for _ in range(200):
        t = _random_table(rng)
        if associated_table(team_from_table(t), t.cover) != t:
            bad += 1
    report(6, bad == 0, f"200 random tables, {bad} mismatches")


@pytest.fixture(scope="module")
def decision_runs():
    rng = random.Random(7)
    runs = []
    for _ in range(500):
        alpha = random_qtl(rng)
        trace = []
        team = qtl_satisfiable(alpha, trace=trace)
        runs.append((alpha, team, trace))
    return runs


def test_07_oracle_equivalence(decision_runs):
    mismatches = bad_witnesses = sat = 0
    for alpha, team, _ in decision_runs:
        ref = brute_force_satisfiable(alpha)
        if (team is None) != (ref is None):
            mismatches += 1
        if team is not None:
            sat += 1
            if not independent_satisfies(list(team.rows), alpha) or not set(team.support) <= support(alpha):
                bad_witnesses += 1
    ok = mismatches == 0 and bad_witnesses == 0
    report(7, ok, f"500 formulas ({sat} satisfiable), {mismatches} mismatches, {bad_witnesses} bad witnesses")


def test_08_synthesis_invariants(decision_runs):
    # a stage-nonemptiness failure would have raised inside criterion 7's runs
    steps = case2 = broken = 0
    for _, _, trace in decision_runs:
        for step in trace:
            steps += 1
            if step.case == 2:
                case2 += 1
                if step.k <= 0 or sum(step.added.values()) != step.k * (step.p - 1):
                    broken += 1
            elif sum(step.added.values()) != step.p:
                broken += 1
    report(8, broken == 0, f"{steps} gluing stages ({case2} of case 2), {broken} broken identities")


def test_09_lin_solver():
    rng = random.Random(9)
    disagree = unsound = 0
    for _ in range(1000):
        n, rows = random_system(rng)
        system = LinSystem([LinConstraint(dict(enumerate(c)), s, b) for c, s, b in rows], n)
        x = feasible(system)
        ref = grid_feasible(n, rows) or vertex_feasible(n, rows)
        if (x is None) != (ref is None):
            disagree += 1
        if x is not None:
            lhs = [sum(a * x[i] for i, a in enumerate(c)) for c, _, _ in rows]
            if not all(v > b if s else v >= b for v, (_, s, b) in zip(lhs, rows)):
                unsound += 1
    report(9, disagree == 0 and unsound == 0, f"1000 systems, {disagree} disagreements, {unsound} bad witnesses")


def test_10_classification():
    start = time.perf_counter()
    got = [classify(table(f"table{i}.table")) for i in (2, 3, 4, 5)]
    again = [classify(table(f"table{i}.table")) for i in (2, 3, 4, 5)]
    elapsed = time.perf_counter() - start
    expected = [NON_CONTEXTUAL, CONTEXTUAL, STRONGLY_CONTEXTUAL, STRONGLY_CONTEXTUAL]
    ok = got == expected and again == got and elapsed < 5
    report(10, ok, f"{', '.join(got)} ({elapsed:.2f}s)")


def test_11_double_slit():
    alpha = parse(example("double_slit.qtl"))
    team = qtl_satisfiable(alpha)
    ok = team is not None
    if ok:
        ok = satisfies(team, parse("[(p0 | p1) & !(p0 & p1)] = 1")) and satisfies(
            team, parse("[((p0 | p1) & !(p0 & p1)) & p2; {p0,p1,p2}] != [p2]")
        )
        ok = ok and independent_satisfies(list(team.rows), alpha)
    report(11, ok, f"team with [phi] = 1 and [phi & p2] != [p2] ({len(team) if team else 0} rows)")
