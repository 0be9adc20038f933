"""Exact solver parameterised by the number of courses, and the approximation scheme.

Both guess, for every course, how many seats go to each valuation class
(exact) or valuation bucket (approximate), and then check the guess with a
seat market.  A guess whose market fills every seat is only accepted once the
collapsed matching verifies.  If some market fills but nothing verifies, the
stable matchings of the full market are searched instead, which keeps both
solvers complete.  When no market fills at all the answer is a sound No: the
seat split of any solution yields a market with a full stable matching, and
then every stable matching of that market is full.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .core import Instance, RationalLike, ResourceBound, to_rational, verify
from .oracle import No, NotApplicable, SolverOutcome, Yes
from .polycases import SeatGroup, grades_distinct, seat_market, stable_fallback, utilities_distinct

DEFAULT_VECTOR_BUDGET = 10**6


def _distinctness_problem(instance: Instance) -> Optional[str]:
    for x in instance.course_ids:
        if not grades_distinct(instance, x):
            return f"course {x} has tied grades"
    for t in instance.ta_ids:
        if not utilities_distinct(instance, t):
            return f"TA {t} has repeated positive utilities"
    return None


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``total``,
    in lexicographically decreasing order (most seats on the first part)."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def valuation_classes(instance: Instance, course: str) -> List[int]:
    """Distinct positive valuations of a course, highest first."""
    return sorted({instance.value(course, t) for t in instance.neighbors_of_course(course)}, reverse=True)


def valid_seat_vectors(values: Sequence[int], capacity: int, k: Fraction) -> List[Tuple[int, ...]]:
    """Seat counts per valuation class that fill the course and reach ``k`` on average."""
    return [
        a
        for a in compositions(capacity, len(values))
        if sum(ai * q for ai, q in zip(a, values)) >= k * capacity
    ]


def _run_guesses(instance, per_course, make_groups, threshold, name, info):
    """Try every combination of per-course guesses in order."""
    any_saturated = False
    tried = 0
    for combo in itertools.product(*per_course):
        tried += 1
        groups = [g for x, vec in zip(instance.course_ids, combo) for g in make_groups(x, vec)]
        mu, saturated = seat_market(instance, groups)
        if not saturated:
            continue
        any_saturated = True
        if verify(instance, mu, threshold).is_mefe:
            return Yes(mu, solver=name, guesses=tried, path="seats", **info)
    info = dict(info, guesses=tried)
    if not any_saturated:
        return No("no seat guess fills every seat", name, **info)
    mu = stable_fallback(instance, threshold)
    if mu is None:
        return No("no stable matching of the full market verifies", name, **info)
    return Yes(mu, solver=name, path="fallback", **info)


def solve_fpt_n(instance: Instance, budget: Optional[int] = None) -> SolverOutcome:
    """Exact solver over valid seat vectors for every course."""
    name = "fptn"
    problem = _distinctness_problem(instance)
    if problem:
        return NotApplicable(problem, name)
    budget = DEFAULT_VECTOR_BUDGET if budget is None else budget
    classes = {x: valuation_classes(instance, x) for x in instance.course_ids}
    bound = prod((instance.capacity(x) + 1) ** len(classes[x]) for x in instance.course_ids)
    if bound > budget:
        return NotApplicable(f"seat-vector bound {bound} exceeds budget {budget}", name)

    per_course = []
    for x in instance.course_ids:
        if not classes[x]:
            return No(f"course {x} has no positively valuing TA", name)
        vecs = valid_seat_vectors(classes[x], instance.capacity(x), instance.k)
        if not vecs:
            return No(f"course {x} has no valid seat vector", name)
        per_course.append(vecs)

    def make_groups(x, vec):
        nb = instance.neighbors_of_course(x)
        return [
            SeatGroup(x, j, a, frozenset(t for t in nb if instance.value(x, t) == q))
            for j, (a, q) in enumerate(zip(vec, classes[x]))
            if a
        ]

    return _run_guesses(instance, per_course, make_groups, None, name, {"vector_bound": bound})


# ---------------------------------------------------------------------------
# Approximation


def bucket_base(epsilon: Fraction) -> Fraction:
    """1 + eps' where eps' = 1/(1 - eps) - 1; that is, 1/(1 - eps)."""
    eps_prime = 1 / (1 - epsilon) - 1
    return 1 + eps_prime


def bucket_count(max_value: int, base: Fraction) -> int:
    """Smallest B with base**B >= max_value + 1."""
    b, power = 0, Fraction(1)
    while power < max_value + 1:
        power *= base
        b += 1
    return b


def bucket_of(value: int, base: Fraction) -> int:
    """The j >= 1 with base**(j-1) <= value < base**j."""
    if value < 1:
        raise ValueError("only positive valuations are bucketed")
    j, upper = 1, base
    while value >= upper:
        upper *= base
        j += 1
    return j


def solve_approx(
    instance: Instance, epsilon: RationalLike, budget: Optional[int] = None
) -> SolverOutcome:
    """Envy-free feasible matching with every average at least (1 - eps) k.

    On instances that admit an MEFE matching at ``k`` the answer is always a
    matching.  On other instances it may be No or a matching meeting the
    relaxed threshold.
    """
    name = "approx"
    eps = to_rational(epsilon)
    if not 0 < eps < 1:
        return NotApplicable("epsilon must lie strictly between 0 and 1", name)
    problem = _distinctness_problem(instance)
    if problem:
        return NotApplicable(problem, name)
    budget = DEFAULT_VECTOR_BUDGET if budget is None else budget
    base = bucket_base(eps)
    relaxed = (1 - eps) * instance.k

    buckets: Dict[str, Dict[int, List[str]]] = {}
    per_course = []
    count = 1
    for x in instance.course_ids:
        nb = instance.neighbors_of_course(x)
        if not nb:
            return No(f"course {x} has no positively valuing TA", name)
        top = max(instance.value(x, t) for t in nb)
        nbuckets = bucket_count(top, base)
        members: Dict[int, List[str]] = {}
        for t in nb:
            members.setdefault(bucket_of(instance.value(x, t), base), []).append(t)
        buckets[x] = members
        cap = instance.capacity(x)
        count *= comb(cap + nbuckets - 1, nbuckets - 1)
        if count > budget:
            raise ResourceBound(f"bucket guesses exceed budget {budget}")
        uppers = [base**j for j in range(1, nbuckets + 1)]
        # values in bucket j stay below base**j; drop guesses that cannot reach the relaxed bar
        vecs = [
            v
            for v in compositions(cap, nbuckets)
            if sum(c * u for c, u in zip(v, uppers)) > relaxed * cap
            or relaxed == 0
        ]
        per_course.append(vecs)

    def make_groups(x, vec):
        return [
            SeatGroup(x, j, c, frozenset(buckets[x].get(j + 1, ())))
            for j, c in enumerate(vec)
            if c
        ]

    out = _run_guesses(instance, per_course, make_groups, relaxed, name, {"threshold": relaxed})
    return out
