"""Acceptance suite.

Each test implements one acceptance criterion at its stated tolerance and
prints one PASS line (run with ``pytest -s`` to see them).  Exact set
equality everywhere; percentages are exact rationals with truncated
display values; the randomized equivalence battery runs 500 seeded trees
against the brute-force oracle with a hard time budget.
"""

import json
import random
import time
from fractions import Fraction

from conftest import fixture_path, literal_names, load_tree

from dtexplain import (
    CheckStats,
    Literal,
    PATH_RESTRICTED,
    PATH_UNRESTRICTED,
    bf_entails,
    build_hitting_sets,
    check_tree,
    enumerate_mhs,
    enumerate_pi_explanations,
    entails,
    is_path_redundant,
    one_pi_explanation_instance,
    one_pi_explanation_path,
    path_point_count,
    random_tree,
    tree_report,
)
from dtexplain.cli import run
from dtexplain.report import TABLE_COLUMNS, display_pct

# explanations emitted while the suite runs, re-validated by criterion 5
EMITTED: list[tuple] = []  # (tree, explanation, candidate universe)


def emit(tree, explanation, universe):
    EMITTED.append((tree, explanation, frozenset(universe)))
    return explanation


def ok(criterion: int, message: str) -> None:
    print(f"\nACCEPTANCE criterion {criterion}: PASS - {message}")


def test_criterion_1_four_feature_fixture_exactness(capsys):
    """The pairwise-disjunction tree: P2 is redundant, its one extracted
    explanation is exactly {x3=1, x4=1}, and the restricted enumeration
    holds exactly that one set."""
    started = time.perf_counter()
    tree = load_tree("or_of_ands")
    p2 = tree.path("P2")

    verdict = is_path_redundant(tree, p2)
    assert verdict.redundant

    explanation = emit(tree, one_pi_explanation_path(tree, p2), p2.literals)
    assert literal_names(tree, explanation.literals) == {"x3=1", "x4=1"}

    everything = enumerate_pi_explanations(tree, p2, PATH_RESTRICTED)
    for e in everything:
        emit(tree, e, p2.literals)
    assert len(everything) == 1
    assert everything[0].literals == explanation.literals

    # the same results through the command line
    code = run(["redundancy", "-t", fixture_path("or_of_ands"),
                "--path", "P2", "--format", "json"])
    captured = capsys.readouterr()
    assert code == 0 and json.loads(captured.out)["redundant"] is True
    code = run(["explain", "-t", fixture_path("or_of_ands"),
                "--path", "P2", "--format", "json"])
    captured = capsys.readouterr()
    assert code == 0 and json.loads(captured.out) == {"x3": "1", "x4": "1"}
    code = run(["enumerate", "-t", fixture_path("or_of_ands"),
                "--path", "P2", "--mode", "restricted", "--format", "json"])
    captured = capsys.readouterr()
    assert code == 0 and json.loads(captured.out) == [{"x3": "1", "x4": "1"}]

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    ok(1, f"P2 redundant, explanation {{x3=1, x4=1}}, single restricted "
          f"enumeration ({elapsed:.3f}s)")


CASE_STUDIES = {
    # fixture -> (%R display, redundant path literal sets, irredundant ones)
    "restaurant": (
        25,
        [
            {"Patrons=Full", "Hungry=Yes", "Type=Italian"},
            {"Patrons=Full", "Hungry=Yes", "Type=Thai", "Fri/Sat=No"},
        ],
        [
            {"Patrons=None"},
            {"Patrons=Full", "Hungry=No"},
            {"Patrons=Some"},
            {"Patrons=Full", "Hungry=Yes", "Type=French"},
            {"Patrons=Full", "Hungry=Yes", "Type=Thai", "Fri/Sat=Yes"},
            {"Patrons=Full", "Hungry=Yes", "Type=Burger"},
        ],
    ),
    "articles": (
        50,
        [
            {"Length=short", "Thread=follow-up", "Author=unknown"},
            {"Length=short", "Thread=follow-up", "Author=known"},
        ],
        [
            {"Length=long"},
            {"Length=short", "Thread=new"},
        ],
    ),
    "cross_circle": (
        33,
        [{"y>0.73=N", "x>0.64=Y"}],
        [{"y>0.73=Y"}, {"y>0.73=N", "x>0.64=N"}],
    ),
}


def test_criterion_2_case_study_redundancy():
    """Case-study trees match their published per-path verdicts and
    display percentages (25, 50, 33)."""
    started = time.perf_counter()
    for name, (pct, redundant_sets, irredundant_sets) in CASE_STUDIES.items():
        tree = load_tree(name)
        report = tree_report(tree, name)
        assert display_pct(report.pct_redundant) == pct, name
        assert report.redundant_count == len(redundant_sets), name
        assert report.path_count == len(redundant_sets) + len(irredundant_sets)
        by_literals = {
            literal_names(tree, tree.path(d.path_id).literals): d.redundant
            for d in report.details
        }
        for wanted in redundant_sets:
            assert by_literals[frozenset(wanted)] is True, (name, wanted)
        for wanted in irredundant_sets:
            assert by_literals[frozenset(wanted)] is False, (name, wanted)
        for d in report.details:
            emit(tree, d.explanation, tree.path(d.path_id).literals)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    ok(2, f"case studies give %R = 25, 50, 33 with the published "
          f"path-level verdicts ({elapsed:.3f}s)")


def test_criterion_3_hitting_set_examples():
    """Exact hitting-set families and their minimal hitting sets."""
    tree = load_tree("or_of_ands")
    p2 = tree.path("P2")
    hs = build_hitting_sets(tree, p2, PATH_RESTRICTED)
    families = [literal_names(tree, ls) for _, ls in hs.literal_sets()]
    assert families == [
        frozenset({"x1=1", "x3=1"}),
        frozenset({"x1=1", "x4=1"}),
        frozenset({"x3=1"}),
        frozenset({"x4=1"}),
    ]
    answers = enumerate_mhs(hs)
    assert [literal_names(tree, s) for s in answers] == [
        frozenset({"x3=1", "x4=1"})
    ]

    selector = load_tree("selector")
    point = (1, 1, 1, 1)
    hs2 = build_hitting_sets(selector, point, PATH_UNRESTRICTED)
    families2 = [literal_names(selector, ls) for _, ls in hs2.literal_sets()]
    assert families2 == [
        frozenset({"x1=1", "x2=1"}),
        frozenset({"x1=1", "x4=1"}),
        frozenset({"x3=1"}),
    ]
    answers2 = enumerate_mhs(hs2)
    assert {literal_names(selector, s) for s in answers2} == {
        frozenset({"x1=1", "x3=1"}),
        frozenset({"x2=1", "x3=1", "x4=1"}),
    }
    for e in enumerate_pi_explanations(selector, point, PATH_UNRESTRICTED):
        emit(selector, e, [Literal(i, frozenset({v})) for i, v in enumerate(point)])
    ok(3, "hitting-set families and minimal hitting sets match exactly")


BATTERY_TREES = 500
BATTERY_INSTANCES = 50
BATTERY_SEED = 20250810
BATTERY_STATS = CheckStats()


def test_criterion_4_oracle_equivalence_battery():
    """500 seeded random trees (up to 6 features, domains up to 4, depth
    up to 6): every path's redundancy verdict, extraction and enumeration,
    plus 50 random instances per tree, agree with the brute-force oracle.
    Zero mismatches within the time budget."""
    started = time.perf_counter()
    rng = random.Random(BATTERY_SEED)
    for index in range(BATTERY_TREES):
        tree = random_tree(rng)
        BATTERY_STATS.merge(
            check_tree(
                tree, rng, n_instances=BATTERY_INSTANCES, label=f"tree#{index}"
            )
        )
    elapsed = time.perf_counter() - started
    assert BATTERY_STATS.trees == BATTERY_TREES
    assert BATTERY_STATS.instances == BATTERY_TREES * BATTERY_INSTANCES
    assert elapsed < 60.0
    ok(4, f"{BATTERY_STATS.trees} trees, {BATTERY_STATS.paths} paths, "
          f"{BATTERY_STATS.instances} instances, zero mismatches "
          f"({elapsed:.1f}s)")


def test_criterion_5_minimality_and_containment():
    """Every explanation the suite emitted entails its prediction, loses
    entailment when any literal is dropped, and stays inside its candidate
    universe.  The randomized battery enforces the same for each of its
    explanations internally; fixture-level explanations are re-checked
    here through both the fast path and the oracle."""
    assert EMITTED, "criteria 1-3 must emit explanations first"
    for tree, explanation, universe in EMITTED:
        assert explanation.literals <= universe
        assert entails(tree, explanation.literals, explanation.target)
        assert bf_entails(tree, explanation.literals, explanation.target)
        for lit in explanation.literals:
            rest = explanation.literals - {lit}
            assert not entails(tree, rest, explanation.target)
            assert not bf_entails(tree, rest, explanation.target)
    # instance-level extraction obeys containment in the instance literals
    for name, point in [("or_tree", (0, 1)), ("selector", (1, 1, 1, 1))]:
        tree = load_tree(name)
        explanation = one_pi_explanation_instance(tree, point)
        equality = frozenset(
            Literal(i, frozenset({v})) for i, v in enumerate(point)
        )
        assert explanation.literals <= equality
    ok(5, f"minimality and containment hold for {len(EMITTED)} emitted "
          "explanations")


def test_criterion_6_complexity_witness():
    """The instrumented redundancy decision never examines more than
    |tree| + |path nodes| nodes, on fixtures and on the battery trees."""
    for name in ("or_tree", "or_of_ands", "selector", "cross_circle",
                 "play_tennis", "restaurant", "articles", "repeat_feature",
                 "constant"):
        tree = load_tree(name)
        for path in tree.paths:
            verdict = is_path_redundant(tree, path)
            assert verdict.node_visits <= tree.node_count + path.depth
    assert BATTERY_STATS.trees == BATTERY_TREES, "battery must run first"
    assert BATTERY_STATS.max_visit_slack <= 0
    ok(6, "node-visit counter always within the |tree| + |path| bound "
          f"(max slack {BATTERY_STATS.max_visit_slack})")


def test_criterion_7_coverage_arithmetic():
    """Path point counts partition feature space exactly; the two-feature
    case study covers exactly a quarter of its space with redundant
    paths."""
    for name in ("or_tree", "or_of_ands", "selector", "cross_circle",
                 "play_tennis", "restaurant", "articles", "repeat_feature",
                 "constant"):
        tree = load_tree(name)
        total = sum(path_point_count(tree.space, p.literals) for p in tree.paths)
        assert total == tree.space.point_count(), name
    report = tree_report(load_tree("cross_circle"), "cross_circle")
    assert report.pct_coverage == Fraction(25)
    ok(7, "sum of path point counts equals the space size on every "
          "fixture; redundant coverage of the two-feature study is "
          "exactly 25%")


def test_criterion_8_report_mirrors_table_semantics(capsys):
    """The published experiment tables rest on externally trained trees
    and their original datasets, so they are not reproducible here;
    criteria 1-7 substitute exact fixtures and randomized equivalence.
    This check pins the substitute report to the same column semantics
    (D, #N, #P, %R, %C, %m, %M, %avg) with the case-study values."""
    assert TABLE_COLUMNS == ("Tree", "D", "#N", "#P", "%R", "%C", "%m", "%M", "%avg")
    code = run(["stats", "-t", fixture_path("cross_circle"),
                fixture_path("articles"), fixture_path("restaurant")])
    captured = capsys.readouterr()
    assert code == 0
    lines = captured.out.splitlines()
    assert lines[0].split() == list(TABLE_COLUMNS)
    rows = [line.split() for line in lines[1:4]]
    assert [r[4] for r in rows] == ["33", "50", "25"]
    ok(8, "report format mirrors the experiment tables' column semantics; "
          "original tables stay out of scope by design")
