import json
import random
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from schottky.bt_tree import INAPPLICABLE, TreeIsometry, axes_relation, axis, schottky_check
from schottky.cat0_config import (
    PI,
    AbstractAxis,
    PairRelation,
    check_theorem1,
    config_from_tree,
    dump_config,
    format_angle,
    load_config,
    parse_angle,
    relation_from_tree,
)
from schottky.exact_arith import Matrix, ValidationError

from _gen import random_sl2

F = Fraction


def case1(length_1, length_2, seg, fp1=None, fp2=None, angles=(PI, PI)):
    lo, hi = F(seg[0]), F(seg[1])
    return [AbstractAxis("A1", F(length_1)), AbstractAxis("A2", F(length_2))], [
        PairRelation(
            "A1", "A2", "CaseI",
            angles=angles,
            segment_i=(lo, hi),
            segment_j=(lo, hi),
            footprints={("A1", "A2"): fp1 or (lo, hi), ("A2", "A1"): fp2 or (lo, hi)},
        )
    ]


def test_case2_single_points_certified():
    data = json.loads(resources.files("schottky").joinpath("data/case2.json").read_text())
    axes, rels = load_config(data)
    v = check_theorem1(axes, rels)
    assert v.certified
    assert v.domains == {"A1": (F(-1), F(1)), "A2": (F(4), F(6))}
    assert not v.warnings


def test_long_segment_rejected():
    v = check_theorem1(*case1(2, 2, (0, 3)))
    assert v.status == "rejected" and v.reason.startswith("projection condition")


def test_right_angle_rejected():
    v = check_theorem1(*case1(2, 2, (0, 0), angles=(PI, PI / 2)))
    assert v.status == "rejected" and v.reason.startswith("angle hypothesis")


def test_short_segment_certified_with_centered_domains():
    v = check_theorem1(*case1(3, 4, (0, 1)))
    assert v.certified
    assert v.domains["A1"] == (F(-1), F(2)) and v.domains["A2"] == (F(-3, 2), F(5, 2))
    assert v.to_json()["conclusion"] == "free of rank 2"


def test_boundary_is_strict():
    # diameter exactly l does not fit in an open interval of length l
    assert not check_theorem1(*case1(2, 2, (0, 2))).certified
    assert check_theorem1(*case1(F(201, 100), 3, (0, 2))).certified


def test_two_generator_segment_warning():
    axes, rels = case1(2, 5, (0, 1), fp1=(F(0), F(1)))
    v = check_theorem1(axes, rels)
    assert v.certified and not v.warnings
    v = check_theorem1(*case1(2, 5, (0, 2)))
    assert not v.certified and any("two-generator" in w for w in v.warnings)


def test_footprint_consistency():
    axes, rels = case1(4, 4, (0, 1), fp1=(F(0), F(1, 2)))
    v = check_theorem1(axes, rels)
    assert v.status == "rejected" and "not contained" in v.reason
    axes, rels = case1(4, 4, (0, 1), fp1=(F(-1), F(1)))
    v = check_theorem1(axes, rels)
    assert v.certified and any("review" in w for w in v.warnings)
    axes, rels = case1(4, 4, (0, 1))
    rels[0].segment_j = (F(0), F(2))
    assert "extents differ" in check_theorem1(axes, rels).reason


def test_errors():
    axes, rels = case1(2, 2, (0, 0))
    with pytest.raises(ValidationError, match="missing relation"):
        check_theorem1(axes + [AbstractAxis("A3", F(1))], rels)
    bad = PairRelation("A1", "A2", "CaseII", angles=(PI,) * 4, bridge_length=F(0),
                       footprints={("A1", "A2"): (F(0), F(0)), ("A2", "A1"): (F(0), F(0))})
    with pytest.raises(ValidationError, match="bridge length"):
        check_theorem1(axes, [bad])
    with pytest.raises(ValidationError):
        check_theorem1(axes[:1], [])
    with pytest.raises(ValidationError):
        AbstractAxis("A", F(0))


def test_angle_parsing():
    assert parse_angle("pi") == 1
    assert parse_angle("1/2·pi") == F(1, 2)
    assert parse_angle("1/2*pi") == F(1, 2)
    assert parse_angle("3/4 pi") == F(3, 4)
    for a in (F(1), F(1, 2), F(7, 3)):
        assert parse_angle(format_angle(a)) == a
    with pytest.raises(ValidationError):
        parse_angle("3.14")


def test_config_round_trip():
    axes, rels = case1(3, 4, (0, 1))
    data = dump_config(axes, rels)
    axes2, rels2 = load_config(json.loads(json.dumps(data)))
    assert dump_config(axes2, rels2) == data
    assert check_theorem1(axes2, rels2).to_json() == check_theorem1(axes, rels).to_json()


# -- tree bridge --------------------------------------------------------------


def tree_configs(count, seed=0):
    """Pairs and triples of conjugates of diagonal elements, Inapplicable ones skipped."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        p = rng.choice([2, 3])
        k = rng.choice([1, 2])
        g = TreeIsometry(Matrix.diag(F(p) ** k, F(p) ** -k), p)
        if rng.random() < 0.5:
            g = TreeIsometry(g.matrix * g.matrix, p)
        n = rng.choice([2, 2, 3])
        gens = [g] + [g.conjugate(random_sl2(rng, p, 3, 1)) for _ in range(n - 1)]
        axes = [axis(h) for h in gens]
        rels = {(i, j): axes_relation(axes[i], axes[j]) for i in range(n) for j in range(i + 1, n)}
        if any(r.kind == INAPPLICABLE for r in rels.values()):
            continue
        out.append((gens, rels))
    return out


def test_mode_agreement():
    configs = tree_configs(20)
    statuses = set()
    for gens, rels in configs:
        tree = schottky_check(gens)
        abstract = check_theorem1(*config_from_tree(tree.lengths, rels))
        assert abstract.certified == tree.certified
        if tree.certified:
            for k, d in enumerate(tree.domains):
                assert abstract.domains[f"A{k + 1}"] == (d.lo, d.hi)
        statuses.add(tree.status)
    assert statuses == {"certified", "inconclusive"}


def test_demo_pair_certified_in_both_modes(demo_pair):
    tree = schottky_check(demo_pair)
    v = check_theorem1(*config_from_tree(tree.lengths, tree.relations))
    assert tree.certified and v.certified


def test_relation_from_tree():
    configs = tree_configs(40, seed=1)
    case2 = [r for _, rels in configs for r in rels.values() if r.kind == "CaseII"]
    assert case2
    pr = relation_from_tree(case2[0], "A1", "A2")
    assert pr.angles == (PI, PI, PI, PI)
    assert pr.bridge_length == case2[0].length
    a = axis(TreeIsometry(Matrix.diag(5, F(1, 5)), 5))
    with pytest.raises(ValidationError):
        relation_from_tree(axes_relation(a, a), "A1", "A2")


def _shift_axis(axes, rels, axis_id, c):
    out = []
    for r in rels:
        fps = {k: ((v[0] + c, v[1] + c) if k[0] == axis_id else v) for k, v in r.footprints.items()}
        seg_i, seg_j = r.segment_i, r.segment_j
        if r.kind == "CaseI":
            if r.i == axis_id:
                seg_i = (seg_i[0] + c, seg_i[1] + c)
            if r.j == axis_id:
                seg_j = (seg_j[0] + c, seg_j[1] + c)
        out.append(PairRelation(r.i, r.j, r.kind, r.angles, seg_i, seg_j, r.bridge_length, fps))
    return axes, out


def test_gauge_invariance():
    rng = random.Random(3)
    for gens, rels in tree_configs(10, seed=2):
        axes, prs = config_from_tree(schottky_check(gens).lengths, rels)
        base = check_theorem1(axes, prs)
        for ax in axes:
            c = F(rng.randint(-50, 50), rng.randint(1, 7))
            moved = check_theorem1(*_shift_axis(axes, prs, ax.id, c))
            assert moved.status == base.status
            if base.certified:
                lo, hi = base.domains[ax.id]
                assert moved.domains[ax.id] == (lo + c, hi + c)


def _widen(rels, rng):
    out = []
    for r in rels:
        fps = {
            k: (v[0] - F(rng.randint(0, 5), rng.randint(1, 4)), v[1] + F(rng.randint(0, 5), rng.randint(1, 4)))
            for k, v in r.footprints.items()
        }
        out.append(PairRelation(r.i, r.j, r.kind, r.angles, r.segment_i, r.segment_j, r.bridge_length, fps))
    return out


def test_monotonicity_on_tree_configs():
    rng = random.Random(4)
    rejected = 0
    for gens, rels in tree_configs(20, seed=5):
        axes, prs = config_from_tree(schottky_check(gens).lengths, rels)
        if check_theorem1(axes, prs).certified:
            continue
        rejected += 1
        for _ in range(5):
            assert not check_theorem1(axes, _widen(prs, rng)).certified
    assert rejected


rat = st.fractions(min_value=-20, max_value=20, max_denominator=6)
pos = st.fractions(min_value=F(1, 6), max_value=10, max_denominator=6)


@settings(max_examples=200, deadline=None)
@given(rat, st.fractions(min_value=0, max_value=6, max_denominator=6), pos, pos, st.lists(pos, min_size=4, max_size=4))
def test_monotonicity_abstract(start, seg_len, l1, l2, grow):
    seg = (start, start + seg_len)
    axes, rels = case1(l1, l2, seg)
    before = check_theorem1(axes, rels)
    axes, wide = case1(l1, l2, seg, fp1=(seg[0] - grow[0], seg[1] + grow[1]), fp2=(seg[0] - grow[2], seg[1] + grow[3]))
    after = check_theorem1(axes, wide)
    assert before.certified or not after.certified
    assert after.certified == (seg_len + grow[0] + grow[1] < l1 and seg_len + grow[2] + grow[3] < l2)
