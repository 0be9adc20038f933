from fractions import Fraction

import pytest

from conftest import one_course
from mefe.core import (
    CapacityMismatch,
    InfeasibleMatching,
    InvalidInstance,
    MalformedMatching,
    Matching,
    avg_util,
    build_graph,
    envy_pairs,
    format_rational,
    is_weakly_stable,
    make_instance,
    to_rational,
    verify,
)
from mefe.reductions import ThreeDMInput, from_3dpm

DISPLAYED = Matching({"t2": "c1", "t1": "c2", "t3": "c3"})
DIAGONAL = Matching({"t1": "c1", "t2": "c2", "t3": "c3"})


class TestRational:
    def test_parse_forms(self):
        assert to_rational("14/4") == Fraction(7, 2)
        assert to_rational(3) == Fraction(3)
        assert format_rational(Fraction(14, 4)) == "7/2"

    @pytest.mark.parametrize("bad", ["7/0", "x", "1/2/3", 0.5, True])
    def test_rejects(self, bad):
        with pytest.raises(InvalidInstance):
            to_rational(bad)


class TestInstance:
    def test_zero_pattern_must_agree(self):
        with pytest.raises(InvalidInstance):
            make_instance([("x", 1, {"a": 2})], [("a", {}, {})], 1)

    def test_too_few_tas(self):
        with pytest.raises(InvalidInstance):
            make_instance([("x", 2, {"a": 1})], [("a", {"x": 1}, {})], 0)
        inst = make_instance([("x", 2, {"a": 1})], [("a", {"x": 1}, {})], 0, allow_short=True)
        assert inst.total_capacity == 2

    def test_duplicate_ids(self):
        with pytest.raises(InvalidInstance):
            make_instance([], [("a", {}, {}), ("a", {}, {})], 0)

    def test_missing_entries_default_to_zero(self, trio):
        inst = make_instance([("x", 1, {})], [("a", {}, {})], 0)
        assert inst.value("x", "a") == 0 and inst.grade("a", "x") == 0

    def test_negative_k(self):
        with pytest.raises(InvalidInstance):
            make_instance([], [], -1)


class TestGraph:
    def test_trio_complete(self, trio):
        g = build_graph(trio)
        assert len(g.edges) == 9
        assert len(g.components) == 1

    def test_single_edge_components(self):
        inst = make_instance(
            [("x1", 1, {"t1": 1}), ("x2", 1, {})],
            [("t1", {"x1": 1}, {}), ("t2", {}, {})],
            0,
            allow_short=True,
        )
        g = build_graph(inst)
        assert g.edges == [("x1", "t1")]
        assert set(g.components) == {(("x1",), ("t1",)), (("x2",), ()), ((), ("t2",))}

    def test_3dm_copy_has_degree_six(self):
        inst = from_3dpm(ThreeDMInput(("p",), ("q",), ("r",), (("p", "q", "r"),)))
        g = build_graph(inst)
        assert sorted(g.course_nbrs["r#1"]) == sorted(["p", "q", "r.d1", "r.d2", "r.dp1", "r.dp2"])

    def test_degree_matches_valuations(self, trio):
        g = build_graph(trio)
        for x in trio.course_ids:
            assert g.degree(x) == sum(1 for t in trio.ta_ids if trio.value(x, t) > 0)


class TestAvgUtil:
    def test_trio(self, trio):
        assert avg_util(trio, DISPLAYED, "c1") == 8

    def test_exact_threshold(self):
        inst = one_course(1, [("a", 3, 1, 1)], Fraction(3))
        assert avg_util(inst, Matching({"a": "x"}), "x") == 3

    def test_3dm_dummy_pair(self):
        inst = from_3dpm(ThreeDMInput(("p",), ("q",), ("r",), (("p", "q", "r"),)))
        mu = Matching({"r.d1": "r#2", "r.dp1": "r#2"})
        assert avg_util(inst, mu, "r#2") == 2

    def test_capacity_mismatch(self, trio):
        with pytest.raises(CapacityMismatch):
            avg_util(trio, Matching({}), "c1")


class TestEnvy:
    def test_trio_displayed(self, trio):
        assert envy_pairs(trio, DISPLAYED) == [("t1", "t2")]

    def test_unassigned_envies_equal_grade(self):
        inst = one_course(1, [("a", 1, 1, 1), ("b", 1, 1, 1)], 0)
        assert envy_pairs(inst, Matching({"a": "x"})) == [("b", "a")]

    def test_top_choice_no_envy(self):
        inst = make_instance(
            [("x", 1, {"a": 1, "b": 1}), ("y", 1, {"a": 1, "b": 1})],
            [("a", {"x": 2, "y": 1}, {"x": 1, "y": 1}), ("b", {"x": 1, "y": 2}, {"x": 1, "y": 1})],
            0,
        )
        assert envy_pairs(inst, Matching({"a": "x", "b": "y"})) == []

    def test_unknown_ids(self, trio):
        with pytest.raises(MalformedMatching):
            envy_pairs(trio, Matching({"t1": "nope"}))


class TestVerify:
    def test_trio_displayed(self, trio):
        r = verify(trio, DISPLAYED)
        assert r.feasible and not r.is_mefe
        assert r.envy_pairs == [("t1", "t2")]
        assert all(a >= 7 for a in r.avg_utils.values())

    def test_trio_diagonal(self, trio):
        assert verify(trio, DIAGONAL).is_mefe

    def test_empty_matching_infeasible(self, trio):
        r = verify(trio, Matching({}))
        assert not r.feasible and not r.is_mefe
        assert {v.kind for v in r.violations} >= {"capacity_mismatch", "unsatisfied_course"}

    def test_zero_valued_assignment_reported(self):
        inst = make_instance(
            [("x", 1, {"a": 1})], [("a", {"x": 1}, {}), ("b", {}, {})], 0
        )
        r = verify(inst, Matching({"b": "x"}))
        assert not r.feasible
        assert any(v.kind == "zero_valued_assignment" for v in r.violations)

    def test_threshold_override(self, trio):
        assert not verify(trio.with_k(8), DIAGONAL).is_mefe
        assert verify(trio.with_k(8), DIAGONAL, threshold=7).is_mefe

    def test_pure(self, trio):
        assert verify(trio, DISPLAYED) == verify(trio, DISPLAYED)


class TestWeakStability:
    def test_mefe_with_value_grades(self):
        inst = one_course(1, [("a", 3, 1, 3), ("b", 2, 1, 2)], 0)
        assert is_weakly_stable(inst, Matching({"a": "x"}))

    def test_indifferent_course(self):
        inst = one_course(1, [("a", 1, 1, 1), ("b", 1, 1, 1)], 0)
        assert is_weakly_stable(inst, Matching({"a": "x"}))
        assert is_weakly_stable(inst, Matching({"b": "x"}))

    def test_direct_blocking_pair(self):
        inst = one_course(1, [("a", 1, 1, 2), ("b", 1, 1, 1)], 0)
        assert not is_weakly_stable(inst, Matching({"b": "x"}))

    def test_infeasible_raises(self, trio):
        with pytest.raises(InfeasibleMatching):
            is_weakly_stable(trio, Matching({}))


def test_instances_pickle(trio):
    import pickle

    assert pickle.loads(pickle.dumps(trio)) == trio
