"""Constructive existence results.

Two settings always admit an MEFE matching:

* binary utilities (one common positive value), valuations equal to grades,
  Hall's condition on course seats and distinct grades per course.  Here a
  seat-saturating matching is repaired by Exchange Matching, and the result
  meets any threshold up to ``k_star``.
* all-positive tables with distinct utilities per TA and distinct grades per
  course, at threshold 1.  TA-proposing deferred acceptance already works.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Tuple

from .core import (
    InfeasibleMatching,
    Instance,
    Matching,
    PreconditionViolated,
    rosters,
    verify,
)
from .engines import deferred_acceptance, max_bipartite_matching
from .oracle import NotApplicable, SolverOutcome, Yes, No
from .polycases import full_market, grades_distinct, utilities_distinct


@dataclass(frozen=True)
class RankProfile:
    """Per-course ranking of all TAs, rank 1 being the highest grade.

    Ties (only possible among TAs that do not value the course) fall back
    to TA order.  ``thresholds[x]`` is the grade of the TA ranked ``seats``
    in ``x``; ``k_star`` is the smallest threshold.
    """

    ranks: Dict[str, Dict[str, int]]
    seats: int
    thresholds: Dict[str, Fraction]
    k_star: Optional[Fraction]

    def rank(self, course: str, ta: str) -> int:
        return self.ranks[course][ta]


def rank_profile(instance: Instance) -> RankProfile:
    seats = instance.total_capacity
    ranks, thresholds = {}, {}
    for x in instance.course_ids:
        order = sorted(instance.ta_ids, key=lambda t: (-instance.grade(t, x), instance.ta_index(t)))
        ranks[x] = {t: i + 1 for i, t in enumerate(order)}
        if 1 <= seats <= len(order):
            thresholds[x] = instance.grade(order[seats - 1], x)
    k_star = min(thresholds.values()) if thresholds else None
    return RankProfile(ranks, seats, thresholds, k_star)


@dataclass(frozen=True)
class PreconditionReport:
    binary_utilities: bool
    common_utility: Optional[int]
    valuation_is_grade: bool
    hall: bool
    distinct_grades: bool
    ranks: RankProfile
    problems: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.binary_utilities and self.valuation_is_grade and self.hall and self.distinct_grades

    @property
    def k_star(self) -> Optional[Fraction]:
        return self.ranks.k_star


def course_copies(instance: Instance) -> Dict[str, List[str]]:
    """Seat copies ``x#1 .. x#c`` of every course, each adjacent to N(x)."""
    return {
        f"{x}#{s}": instance.neighbors_of_course(x)
        for x in instance.course_ids
        for s in range(1, instance.capacity(x) + 1)
    }


def hall_by_matching(instance: Instance) -> bool:
    return max_bipartite_matching(course_copies(instance)).saturates_left


def hall_by_subsets(instance: Instance) -> bool:
    """Direct check of |N(S)| >= sum of capacities over every course subset."""
    cids = instance.course_ids
    for r in range(1, len(cids) + 1):
        for subset in combinations(cids, r):
            nbrs = set()
            for x in subset:
                nbrs.update(instance.neighbors_of_course(x))
            if len(nbrs) < sum(instance.capacity(x) for x in subset):
                return False
    return True


def check_binval_preconditions(instance: Instance) -> PreconditionReport:
    problems = []
    positive = {instance.utility(t, x) for t in instance.ta_ids for x in instance.course_ids} - {0}
    binary = len(positive) <= 1
    if not binary:
        problems.append(f"positive utilities take {len(positive)} values")
    same = all(
        instance.value(x, t) == instance.grade(t, x) for x in instance.course_ids for t in instance.ta_ids
    )
    if not same:
        problems.append("some valuation differs from the matching grade")
    hall = hall_by_matching(instance)
    if not hall:
        problems.append("course seats cannot all be covered (Hall's condition fails)")
    distinct = all(grades_distinct(instance, x) for x in instance.course_ids)
    if not distinct:
        problems.append("two TAs share a grade in a course they both value")
    return PreconditionReport(
        binary, next(iter(positive), None), same, hall, distinct, rank_profile(instance), problems
    )


# ---------------------------------------------------------------------------
# Potential and Exchange Matching


def potential(instance: Instance, matching: Matching) -> Tuple[Dict[str, int], int]:
    """Per-course count of outsiders graded above the weakest insider, and the total."""
    if not verify(instance, matching).feasible:
        raise InfeasibleMatching("potential needs a feasible matching")
    sigma = {}
    for x, roster in rosters(instance, matching).items():
        low = min(instance.grade(t, x) for t in roster)
        inside = set(roster)
        sigma[x] = sum(1 for t in instance.ta_ids if t not in inside and instance.grade(t, x) > low)
    return sigma, sum(sigma.values())


@dataclass(frozen=True)
class ExchangeStep:
    envier: str
    envied: str
    course: str
    evicted: str
    psi_before: int
    psi_after: int
    matching: Matching


def _find_swap(instance: Instance, assign: Dict[str, str]) -> Optional[Tuple[str, str]]:
    for ti in instance.ta_ids:
        if ti in assign:
            continue
        for tj in instance.ta_ids:
            x = assign.get(tj)
            if x is None:
                continue
            if instance.utility(ti, x) > 0 and instance.grade(ti, x) > instance.grade(tj, x):
                return ti, tj
    return None


def exchange_steps(instance: Instance, feasible: Matching) -> Iterator[ExchangeStep]:
    """Yield every swap Exchange Matching performs, in order."""
    report = check_binval_preconditions(instance)
    if not report.ok:
        raise PreconditionViolated("; ".join(report.problems))
    if not verify(instance, feasible).feasible:
        raise PreconditionViolated("input matching is not feasible")
    assign = dict(feasible.assignment)
    _, psi = potential(instance, feasible)
    while True:
        pair = _find_swap(instance, assign)
        if pair is None:
            return
        ti, tj = pair
        x = assign[tj]
        evicted = min((t for t, c in assign.items() if c == x), key=lambda t: instance.grade(t, x))
        del assign[evicted]
        assign[ti] = x
        mu = Matching(dict(assign))
        _, after = potential(instance, mu)
        yield ExchangeStep(ti, tj, x, evicted, psi, after, mu)
        psi = after


def exchange_matching(instance: Instance, feasible: Matching) -> Matching:
    """Swap unmatched enviers in until no merit-based envy remains."""
    result = feasible
    for step in exchange_steps(instance, feasible):
        result = step.matching
    return result


def seat_covering_matching(instance: Instance) -> Matching:
    """A feasible matching read off a maximum matching of seat copies to TAs.

    Under Hall's condition every copy is covered, so every course is full.
    """
    eta = max_bipartite_matching(course_copies(instance)).matching
    return Matching({t: copy.rsplit("#", 1)[0] for copy, t in eta.assignment.items() if t is not None})


def solve_existence_binval(instance: Instance) -> SolverOutcome:
    name = "exist-binval"
    report = check_binval_preconditions(instance)
    if not report.ok:
        return NotApplicable("; ".join(report.problems), name)
    k_star = report.k_star
    if k_star is not None and instance.k > k_star:
        return NotApplicable(f"k = {instance.k} exceeds the certified threshold {k_star}", name)
    mu = exchange_matching(instance, seat_covering_matching(instance))
    if verify(instance, mu).is_mefe:
        return Yes(mu, solver=name, k_star=k_star)
    return No("exchange result failed verification", name, k_star=k_star)  # pragma: no cover


def solve_existence_hr(instance: Instance) -> SolverOutcome:
    name = "exist-hr"
    for x in instance.course_ids:
        for t in instance.ta_ids:
            if instance.utility(t, x) == 0:
                return NotApplicable(f"pair ({x}, {t}) is not positively valued", name)
        if not grades_distinct(instance, x):
            return NotApplicable(f"course {x} has tied grades", name)
    for t in instance.ta_ids:
        if not utilities_distinct(instance, t):
            return NotApplicable(f"TA {t} has repeated utilities", name)
    if instance.k > 1:
        return NotApplicable("existence is only certified for k <= 1", name)
    em = deferred_acceptance(full_market(instance))
    mu = Matching({t: x for t, x in em.assignment.items() if x is not None})
    if verify(instance, mu).is_mefe:
        return Yes(mu, solver=name)
    return No("deferred acceptance result failed verification", name)  # pragma: no cover
