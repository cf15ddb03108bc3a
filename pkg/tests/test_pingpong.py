from fractions import Fraction

import pytest

from schottky.exact_arith import Matrix, ValidationError
from schottky.pingpong import (
    ActionUniverse,
    SetFamily,
    check_action,
    discreteness_rationale,
    sample_points,
    trace_word,
    tree_universe,
    verify_hypotheses,
)
from schottky.word_oracle import enumerate_reduced

INF = "inf"


def mobius(m, z):
    (a, b), (c, d) = m.rows
    if z == INF:
        return INF if c == 0 else a / c
    den = c * z + d
    return INF if den == 0 else (a * z + b) / den


def modular_universe():
    """z -> z + 4 and its conjugate by z -> 1/z acting on the rational projective line."""
    a = Matrix([[1, 4], [0, 1]])
    b = Matrix([[1, 0], [4, 1]])
    universe = ActionUniverse(
        apply=mobius,
        generators=[a, b],
        inverses=[a.inverse(), b.inverse()],
        basepoint=Fraction(1),
        compose=lambda g, h: g * h,
        identity=Matrix.identity(2),
    )
    family = SetFamily(
        plus=[lambda z: z == INF or z >= 2, lambda z: z != INF and 0 <= z <= Fraction(1, 2)],
        minus=[lambda z: z != INF and z < -2, lambda z: z != INF and Fraction(-1, 2) < z < 0],
    )
    return universe, family


def test_tree_family_passes(demo_pair, demo_sets):
    universe, family = tree_universe(demo_pair, demo_sets)
    rep = verify_hypotheses(universe, family, 200, seed=0)
    assert rep.ok, rep.violations[:3]
    assert rep.summary == f"no violation found in {rep.checks_run} checks"
    assert rep.samples == 200
    assert all(e["witnesses"] > 0 for e in rep.nonempty)
    assert rep.basepoint_outside


def test_modular_family_passes():
    universe, family = modular_universe()
    rep = verify_hypotheses(universe, family, 150, seed=1)
    assert rep.ok, rep.violations[:3]
    assert not rep.discreteness["discrete_claimed"]


def test_disjointness_mutation(demo_pair, demo_sets):
    universe, family = tree_universe(demo_pair, demo_sets)
    family.minus = list(family.minus)
    family.minus[0] = family.plus[0]
    rep = verify_hypotheses(universe, family, 200, seed=0)
    assert not rep.ok
    assert any(v["kind"] == "disjointness" for v in rep.violations)


def test_swapped_sets_violate_containment(demo_pair, demo_sets):
    universe, family = tree_universe(demo_pair, demo_sets)
    family.plus, family.minus = family.minus, family.plus
    rep = verify_hypotheses(universe, family, 200, seed=0)
    assert any(v["kind"] == "containment" for v in rep.violations)


def test_empty_set_reported():
    universe, family = modular_universe()
    family.minus = [lambda z: False, family.minus[1]]
    rep = verify_hypotheses(universe, family, 50, seed=0)
    assert any(v["kind"] == "empty" and v["sets"] == ["X1-"] for v in rep.violations)


def test_single_generator_rejected():
    universe, family = modular_universe()
    universe.generators, universe.inverses = universe.generators[:1], universe.inverses[:1]
    family.plus, family.minus = family.plus[:1], family.minus[:1]
    with pytest.raises(ValidationError):
        verify_hypotheses(universe, family)


def test_report_is_deterministic(demo_pair, demo_sets):
    universe, family = tree_universe(demo_pair, demo_sets)
    a = verify_hypotheses(universe, family, 100, seed=3).to_json()
    b = verify_hypotheses(universe, family, 100, seed=3).to_json()
    assert a == b
    assert sample_points(universe, 50, 9) == sample_points(universe, 50, 9)


def test_traces_of_short_words(demo_pair, demo_sets):
    universe, family = tree_universe(demo_pair, demo_sets)
    x0 = universe.basepoint
    empty = trace_word(universe, family, (), x0)
    assert empty.passed and not empty.in_y
    words = list(enumerate_reduced(2, 3))
    assert len(words) == 52
    for w in words:
        tr = trace_word(universe, family, w, x0)
        assert tr.passed, str(w)
        assert len(tr.steps) == len(w) + 1
        # the last letter applied decides which set the point lands in
        i, s = w[0]
        assert f"X{i + 1}{'+' if s > 0 else '-'}" in tr.steps[-1].sets


def test_trace_detects_failure():
    universe, family = modular_universe()
    # 3 lies in X1+, and a^-1 sends it to -1, outside every set
    tr = trace_word(universe, family, [(0, -1)], Fraction(3))
    assert tr.steps[0].sets == ["X1+"]
    assert tr.steps[-1].point == -1
    assert not tr.in_y and not tr.passed


def test_discreteness_flags():
    yes = discreteness_rationale(SetFamily([], [], closed_sets=True, locally_compact=True))
    assert yes["discrete_claimed"]
    assert not discreteness_rationale(SetFamily([], [], closed_sets=True))["discrete_claimed"]
    no = discreteness_rationale(SetFamily([], [], locally_compact=True))
    assert not no["discrete_claimed"] and "closed" in no["rationale"]


def test_tree_universe_claims_discreteness(demo_pair, demo_sets):
    _, family = tree_universe(demo_pair, demo_sets)
    assert discreteness_rationale(family)["discrete_claimed"]


def test_check_action(demo_pair, demo_sets):
    universe, _ = tree_universe(demo_pair, demo_sets)
    pts = sample_points(universe, 30, 0)
    assert check_action(universe, pts) == []
    # composing in the wrong order is caught
    broken, _ = modular_universe()
    broken.compose = lambda g, h: h * g
    assert check_action(broken, [Fraction(1, 3), Fraction(5, 7)], trials=40)
