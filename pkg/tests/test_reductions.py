from fractions import Fraction

import pytest

from mefe.core import InvalidInstance, Matching
from mefe.oracle import solve_bruteforce
from mefe.reductions import (
    STRUCTURES,
    DegreeTooHigh,
    ListTooLong,
    NotAGeneratedInstance,
    OddCardinality,
    SmtiInput,
    ThreeDMInput,
    TiesOnMenSide,
    UnsatisfiableProfile,
    from_3dpm,
    from_partition,
    from_smti33,
    map_back_3dpm,
    map_back_partition,
    random_3dm,
    random_instance,
    random_smti,
)
from source_oracles import has_complete_weakly_stable, has_equal_partition, has_perfect_3dm


class TestPartition:
    def test_small_yes(self):
        inst = from_partition([1, 2, 3, 4])
        assert [inst.capacity(x) for x in inst.course_ids] == [2, 2]
        assert inst.k == Fraction(5, 2)
        out = solve_bruteforce(inst)
        assert out.is_yes
        halves = map_back_partition(inst, out.matching)
        assert sorted(map(sorted, halves)) == [[1, 4], [2, 3]]

    def test_small_no(self):
        assert solve_bruteforce(from_partition([1, 1, 1, 5])).is_no

    def test_odd(self):
        with pytest.raises(OddCardinality):
            from_partition([1, 2, 3])

    def test_bad_values(self):
        with pytest.raises(InvalidInstance):
            from_partition([1, 0])

    def test_map_back_rejects_foreign(self, trio):
        with pytest.raises(NotAGeneratedInstance):
            map_back_partition(trio, Matching({}))

    @pytest.mark.parametrize("values", [[2, 2], [1, 3, 2, 2], [5, 1, 1, 1, 2, 2], [1, 2, 3, 4, 5, 6]])
    def test_round_trip(self, values):
        assert solve_bruteforce(from_partition(values)).is_yes == has_equal_partition(values)


def smti_pair():
    return SmtiInput({"m1": ["w1", "w2"], "m2": ["w2"]}, {"w1": [["m1"]], "w2": [["m1"], ["m2"]]})


class TestSmti:
    def test_smti_pair_grades(self):
        inst = from_smti33(smti_pair())
        assert [inst.grade("w1", "m1"), inst.grade("w2", "m1"), inst.grade("w2", "m2")] == [3, 2, 3]
        assert inst.k == 1
        assert all(inst.capacity(x) == 1 for x in inst.course_ids)

    def test_smti_pair_answer(self):
        inst = from_smti33(smti_pair())
        out = solve_bruteforce(inst)
        assert out.is_yes and out.matching == Matching({"w1": "m1", "w2": "m2"})

    def test_no_complete_stable_matching(self):
        # m1 and m2 both want w1 first; w1 ranks m2 above m1 and m1 cannot be placed
        smti = SmtiInput(
            {"m1": ["w1"], "m2": ["w1", "w2"]},
            {"w1": [["m2"], ["m1"]], "w2": [["m2"]]},
        )
        assert not has_complete_weakly_stable(smti.men, smti.women)
        assert solve_bruteforce(from_smti33(smti)).is_no

    def test_tie_positions(self):
        smti = SmtiInput({"m1": ["w1"], "m2": ["w1", "w2"]}, {"w1": [["m1", "m2"]], "w2": [["m2"]]})
        inst = from_smti33(smti)
        assert inst.utility("w1", "m1") == inst.utility("w1", "m2") == 3

    def test_binary(self):
        inst = from_smti33(smti_pair(), binary=True)
        assert {inst.value(x, t) for x in inst.course_ids for t in inst.neighbors_of_course(x)} == {1}

    def test_long_list(self):
        with pytest.raises(ListTooLong):
            SmtiInput({"m": ["a", "b", "c", "d"]}, {w: [["m"]] for w in "abcd"})

    def test_men_ties(self):
        with pytest.raises(TiesOnMenSide):
            SmtiInput({"m": [["a", "b"]]}, {"a": [["m"]], "b": [["m"]]})

    def test_mutual(self):
        with pytest.raises(InvalidInstance):
            SmtiInput({"m": ["a"]}, {"a": []})

    @pytest.mark.parametrize("binary", [False, True])
    def test_random_round_trip(self, binary):
        for seed in range(60):
            smti = random_smti(seed, 1 + seed % 4)
            expected = has_complete_weakly_stable(smti.men, smti.women)
            assert solve_bruteforce(from_smti33(smti, binary)).is_yes == expected


class TestThreeDM:
    def test_single_triple(self):
        inp = ThreeDMInput(("p",), ("q",), ("r",), (("p", "q", "r"),))
        inst = from_3dpm(inp)
        assert inst.course_ids == ["r#1", "r#2", "r#3"]
        assert len(inst.ta_ids) == 6
        out = solve_bruteforce(inst)
        assert out.is_yes
        assert map_back_3dpm(inp, out.matching) == [("p", "q", "r")]

    def test_no_triples(self):
        inp = ThreeDMInput(("p",), ("q",), ("r",), ())
        assert solve_bruteforce(from_3dpm(inp)).is_no

    def test_degree(self):
        E = tuple(("p1", q, r) for q in ("q1", "q2") for r in ("r1", "r2"))
        with pytest.raises(DegreeTooHigh):
            ThreeDMInput(("p1", "p2"), ("q1", "q2"), ("r1", "r2"), E)

    def test_sizes(self):
        with pytest.raises(InvalidInstance):
            ThreeDMInput(("p",), (), ("r",), ())

    def test_random_round_trip(self):
        for seed in range(10):
            inp = random_3dm(seed, 2, 3 + seed % 3)
            expected = has_perfect_3dm(inp.P, inp.Q, inp.R, inp.E)
            out = solve_bruteforce(from_3dpm(inp))
            assert out.is_yes == expected
            if out.is_yes:
                assert len(map_back_3dpm(inp, out.matching)) == 2


class TestRandomInstance:
    @pytest.mark.parametrize("structure", STRUCTURES)
    def test_deterministic(self, structure):
        a = random_instance(5, 2, 5, structure=structure)
        b = random_instance(5, 2, 5, structure=structure)
        assert a == b

    def test_unknown_structure(self):
        with pytest.raises(UnsatisfiableProfile):
            random_instance(0, 1, 1, structure="weird")

    def test_too_many_courses(self):
        with pytest.raises(UnsatisfiableProfile):
            random_instance(0, 5, 2)

    def test_profiles(self):
        from mefe.existence import check_binval_preconditions
        from mefe.polycases import profile

        for seed in range(30):
            assert check_binval_preconditions(random_instance(seed, 2, 5, structure="binval")).ok
            p = profile(random_instance(seed, 3, 6, structure="cap1"))
            assert p.max_capacity == 1
            p = profile(random_instance(seed, 3, 6, structure="tadeg1"))
            assert p.max_ta_degree <= 1
