from fractions import Fraction
from math import comb

import pytest

from conftest import one_course
from mefe.core import ResourceBound, make_instance, verify
from mefe.oracle import solve_bruteforce
from mefe.paramsolvers import (
    bucket_base,
    bucket_count,
    bucket_of,
    compositions,
    solve_approx,
    solve_fpt_n,
    valid_seat_vectors,
)
from mefe.polycases import solve_two_valuation
from mefe.reductions import random_instance


class TestCompositions:
    @pytest.mark.parametrize("total,parts", [(0, 0), (0, 3), (3, 1), (4, 3), (5, 4)])
    def test_count_and_sums(self, total, parts):
        out = list(compositions(total, parts))
        expected = comb(total + parts - 1, parts - 1) if parts else 1
        assert len(out) == expected == len(set(out))
        assert all(sum(a) == total and len(a) == parts for a in out)
        assert out == sorted(out, reverse=True)

    def test_empty(self):
        assert list(compositions(2, 0)) == []


class TestSeatVectors:
    def test_example(self):
        assert valid_seat_vectors([3, 1], 2, Fraction(2)) == [(2, 0), (1, 1)]

    def test_every_vector_meets_threshold(self):
        for k in (Fraction(0), Fraction(5, 2), Fraction(4)):
            for vec in valid_seat_vectors([5, 3, 1], 3, k):
                assert sum(v * a for v, a in zip([5, 3, 1], vec)) >= 3 * k

    def test_unreachable(self):
        assert valid_seat_vectors([2], 2, Fraction(3)) == []


class TestBuckets:
    def test_base(self):
        assert bucket_base(Fraction(1, 2)) == 2
        assert bucket_base(Fraction(1, 3)) == Fraction(3, 2)

    @pytest.mark.parametrize("eps", [Fraction(1, 2), Fraction(1, 3), Fraction(1, 10)])
    def test_bucket_bounds(self, eps):
        base = bucket_base(eps)
        for top in range(1, 40):
            nb = bucket_count(top, base)
            for v in range(1, top + 1):
                j = bucket_of(v, base)
                assert 1 <= j <= nb
                assert base ** (j - 1) <= v < base**j

    def test_non_positive(self):
        with pytest.raises(ValueError):
            bucket_of(0, Fraction(2))


class TestFptN:
    def test_two_valuation_counterexample(self):
        # a seat market split into {value 3} and {value 1} can fill while the
        # collapsed matching fails; the full-market search must still decide.
        inst = one_course(2, [("a", 3, 1, 1), ("b", 1, 1, 3), ("c", 1, 1, 2)], 2)
        assert solve_fpt_n(inst).verdict == solve_bruteforce(inst).verdict

    def test_agrees_with_two_valuation(self):
        checked = 0
        for seed in range(500):
            inst = random_instance(seed, 2, 4, structure="twoval")
            a, b = solve_fpt_n(inst), solve_two_valuation(inst)
            if a.applicable and b.applicable:
                checked += 1
                assert a.verdict == b.verdict
                for out in (a, b):
                    if out.is_yes:
                        assert verify(inst, out.matching).is_mefe
        assert checked > 400

    def test_agrees_with_oracle(self):
        for seed in range(200):
            inst = random_instance(seed, 2, 5, structure="distinct")
            out = solve_fpt_n(inst)
            assert out.verdict == solve_bruteforce(inst).verdict

    def test_ties_rejected(self):
        inst = one_course(1, [("a", 1, 1, 1), ("b", 1, 1, 1)], 0)
        assert not solve_fpt_n(inst).applicable

    def test_budget(self):
        inst = random_instance(3, 3, 6, structure="distinct")
        out = solve_fpt_n(inst, budget=1)
        assert not out.applicable and "budget" in out.reason


class TestApprox:
    @pytest.mark.parametrize("eps", [0, 1, Fraction(-1, 2), Fraction(3, 2)])
    def test_epsilon_range(self, eps):
        inst = one_course(1, [("a", 1, 1, 1)], 1)
        assert not solve_approx(inst, eps).applicable

    def test_float_rejected(self):
        inst = one_course(1, [("a", 1, 1, 1)], 1)
        with pytest.raises(Exception):
            solve_approx(inst, 0.5)

    def test_yes_instances_stay_yes(self):
        for seed in range(150):
            inst = random_instance(seed, 2, 4, val_max=16, structure="distinct")
            if not solve_bruteforce(inst).is_yes:
                continue
            for eps in (Fraction(1, 2), Fraction(1, 4)):
                out = solve_approx(inst, eps)
                assert out.is_yes
                rep = verify(inst, out.matching, (1 - eps) * inst.k)
                assert rep.is_mefe

    def test_resource_bound(self):
        inst = make_instance(
            [("x", 3, {f"t{i}": 1000 for i in range(4)})],
            [(f"t{i}", {"x": 1}, {"x": i}) for i in range(4)],
            1,
        )
        with pytest.raises(ResourceBound):
            solve_approx(inst, Fraction(1, 100), budget=10)
