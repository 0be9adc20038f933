"""Polynomial special-case solvers and the strategy dispatcher.

Each solver first checks its own applicability and answers NotApplicable
when the instance is outside its class.  Whatever a solver claims as Yes
has been run through :func:`core.verify`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .core import BipartiteGraph, Instance, Matching, build_graph, verify
from .engines import (
    NO_STRONGLY_STABLE,
    PreferenceSystem,
    deferred_acceptance,
    enumerate_stable_matchings,
    strongly_stable_max_weight,
)
from .oracle import No, NotApplicable, SolverOutcome, Yes, resolve_budget, solve_bruteforce

N0 = 4
C0 = 4


# ---------------------------------------------------------------------------
# Profile


@dataclass(frozen=True)
class CaseProfile:
    degrees: Dict[str, int]
    slack: Dict[str, int]
    max_ta_degree: int
    distinct_values: Dict[str, int]
    grades_distinct: Dict[str, bool]
    utilities_distinct: Dict[str, bool]
    n: int
    max_capacity: int

    @property
    def all_grades_distinct(self) -> bool:
        return all(self.grades_distinct.values())

    @property
    def all_utilities_distinct(self) -> bool:
        return all(self.utilities_distinct.values())


def grades_distinct(instance: Instance, course: str) -> bool:
    """No two TAs who value ``course`` positively share a grade there."""
    gs = [instance.grade(t, course) for t in instance.neighbors_of_course(course)]
    return len(gs) == len(set(gs))


def utilities_distinct(instance: Instance, ta: str) -> bool:
    us = [instance.utility(ta, x) for x in instance.neighbors_of_ta(ta)]
    return len(us) == len(set(us))


def profile(instance: Instance) -> CaseProfile:
    deg = {x: len(instance.neighbors_of_course(x)) for x in instance.course_ids}
    return CaseProfile(
        degrees=deg,
        slack={x: deg[x] - instance.capacity(x) for x in instance.course_ids},
        max_ta_degree=max((len(instance.neighbors_of_ta(t)) for t in instance.ta_ids), default=0),
        distinct_values={
            x: len({instance.value(x, t) for t in instance.neighbors_of_course(x)})
            for x in instance.course_ids
        },
        grades_distinct={x: grades_distinct(instance, x) for x in instance.course_ids},
        utilities_distinct={t: utilities_distinct(instance, t) for t in instance.ta_ids},
        n=instance.n,
        max_capacity=max((instance.capacity(x) for x in instance.course_ids), default=0),
    )


def _checked(instance: Instance, matching: Matching, solver: str, threshold=None, **info) -> SolverOutcome:
    if verify(instance, matching, threshold).is_mefe:
        return Yes(matching, solver=solver, **info)
    return No("candidate matching failed verification", solver=solver, **info)


# ---------------------------------------------------------------------------
# Degree minus capacity at most one


def extended_matching(
    graph: BipartiteGraph,
    partial: Matching,
    matched_tas: Set[str],
    matched_courses: Set[str],
) -> Matching:
    """Propagate forced assignments outward from a seed.

    ``matched_tas`` may contain TAs that are deliberately left unassigned;
    they still count as used.  While some course outside ``matched_courses``
    touches a used TA, the lowest-indexed such course receives all of its
    unused neighbours.
    """
    assign = dict(partial.assignment)
    used = set(matched_tas)
    done = set(matched_courses)
    while True:
        nxt = next(
            (x for x, nbrs in graph.course_nbrs.items() if x not in done and any(t in used for t in nbrs)),
            None,
        )
        if nxt is None:
            return Matching(assign)
        for t in graph.course_nbrs[nxt]:
            if t not in used:
                assign[t] = nxt
                used.add(t)
        done.add(nxt)


def _find_cycle_courses(graph: BipartiteGraph, courses: Sequence[str], tas: Sequence[str]) -> Tuple[List[str], Dict]:
    """Strip leaves until only the unique cycle remains."""
    adj: Dict[Tuple[str, str], Set[Tuple[str, str]]] = {}
    for x in courses:
        adj[("c", x)] = {("t", t) for t in graph.course_nbrs[x]}
    for t in tas:
        adj[("t", t)] = {("c", x) for x in graph.ta_nbrs[t]}
    leaves = [v for v, nb in adj.items() if len(nb) <= 1]
    while leaves:
        v = leaves.pop()
        if v not in adj:
            continue
        for w in adj.pop(v):
            if w in adj:
                adj[w].discard(v)
                if len(adj[w]) == 1:
                    leaves.append(w)
    cyc = [x for x in courses if ("c", x) in adj]
    return cyc, adj


def _solve_component(instance: Instance, graph: BipartiteGraph, courses, tas) -> Tuple[Optional[Matching], str]:
    if not courses:
        return Matching({}), "isolated"
    sub = instance.restrict(courses, tas)

    def attempt(seed_assign: Dict[str, str], used: Set[str], done: Set[str]) -> Optional[Matching]:
        mu = extended_matching(graph, Matching(seed_assign), used, done)
        mu = Matching({t: x for t, x in mu.items() if x in done or x in courses})
        return mu if verify(sub, mu).is_mefe else None

    forced = [x for x in courses if len(graph.course_nbrs[x]) == instance.capacity(x)]
    if forced:
        seed: Dict[str, str] = {}
        for x in forced:
            for t in graph.course_nbrs[x]:
                if t in seed:
                    return None, "forced-overlap"
                seed[t] = x
        return attempt(seed, set(seed), set(forced)), "forced"

    edges = sum(len(graph.course_nbrs[x]) for x in courses)
    vertices = len(courses) + len(tas)
    if edges == vertices - 1:
        for t in tas:
            mu = attempt({}, {t}, set())
            if mu is not None:
                return mu, "tree"
        return None, "tree"
    if edges == vertices:
        cyc, core_adj = _find_cycle_courses(graph, courses, tas)
        x1 = cyc[0]
        a, b = sorted(t for _, t in core_adj[("c", x1)])
        nbrs = list(graph.course_nbrs[x1])
        seeds = [b, a] + [t for t in nbrs if t not in (a, b)]
        for left_out in seeds:
            keep = [t for t in nbrs if t != left_out]
            mu = attempt({t: x1 for t in keep}, set(keep), {x1})
            if mu is not None:
                return mu, "one-cycle"
        return None, "one-cycle"
    return None, "many-cycles"


def solve_degcap_le1(instance: Instance) -> SolverOutcome:
    """Courses whose degree exceeds capacity by at most one."""
    name = "degcap"
    prof = profile(instance)
    bad = [x for x, s in prof.slack.items() if s not in (0, 1)]
    if bad:
        return NotApplicable(f"course {bad[0]} has degree minus capacity {prof.slack[bad[0]]}", name)
    graph = build_graph(instance)
    assign: Dict[str, str] = {}
    cases = []
    for courses, tas in graph.components:
        mu, case = _solve_component(instance, graph, courses, tas)
        cases.append(case)
        if mu is None:
            return No(f"component {list(courses)} has no solution ({case})", name, cases=cases)
        assign.update(mu.assignment)
    return _checked(instance, Matching(assign), name, cases=cases)


# ---------------------------------------------------------------------------
# Single course and TA degree one


def _rank_by_grade(instance: Instance, course: str) -> List[str]:
    """Positively valuing TAs, best grade first, ties by identifier."""
    return sorted(instance.neighbors_of_course(course), key=lambda t: (-instance.grade(t, course), t))


def solve_single_course(instance: Instance) -> SolverOutcome:
    name = "single"
    if instance.n != 1:
        return NotApplicable(f"needs exactly one course, found {instance.n}", name)
    x = instance.course_ids[0]
    ranked = _rank_by_grade(instance, x)
    cap = instance.capacity(x)
    if len(ranked) < cap:
        return No("fewer positively valuing TAs than seats", name)
    return _checked(instance, Matching({t: x for t in ranked[:cap]}), name)


def solve_ta_degree1(instance: Instance) -> SolverOutcome:
    name = "tadeg1"
    for t in instance.ta_ids:
        if len(instance.neighbors_of_ta(t)) > 1:
            return NotApplicable(f"TA {t} values more than one course", name)
    assign: Dict[str, str] = {}
    for x in instance.course_ids:
        sub = instance.restrict([x], instance.neighbors_of_course(x))
        out = solve_single_course(sub)
        if not out.is_yes:
            return No(f"course {x}: {out.reason}", name)
        assign.update(out.matching.assignment)
    return _checked(instance, Matching(assign), name)


# ---------------------------------------------------------------------------
# Constant number of courses and capacities


def constant_enum_size(instance: Instance) -> int:
    seats = instance.total_capacity
    size = comb(instance.m, seats)
    left = seats
    for x in instance.course_ids:
        size *= comb(left, instance.capacity(x))
        left -= instance.capacity(x)
    return size


def solve_constant_enum(
    instance: Instance, n0: int = N0, c0: int = C0, budget: Optional[int] = None
) -> SolverOutcome:
    """Try every way to fill the seats, course by course."""
    name = "constenum"
    if instance.n > n0:
        return NotApplicable(f"{instance.n} courses exceeds the constant {n0}", name)
    if any(instance.capacity(x) > c0 for x in instance.course_ids):
        return NotApplicable(f"a capacity exceeds the constant {c0}", name)
    budget = resolve_budget(budget)
    if constant_enum_size(instance) > budget:
        return NotApplicable("candidate count exceeds the enumeration budget", name)

    courses = instance.course_ids
    nbrs = {x: instance.neighbors_of_course(x) for x in courses}
    need = {x: instance.k * instance.capacity(x) for x in courses}

    def rec(i: int, used: Set[str], assign: Dict[str, str]) -> Optional[Matching]:
        if i == len(courses):
            mu = Matching(dict(assign))
            return mu if verify(instance, mu).is_mefe else None
        x = courses[i]
        pool = [t for t in nbrs[x] if t not in used]
        for group in itertools.combinations(pool, instance.capacity(x)):
            if sum(instance.value(x, t) for t in group) < need[x]:
                continue
            for t in group:
                assign[t] = x
            found = rec(i + 1, used | set(group), assign)
            for t in group:
                del assign[t]
            if found is not None:
                return found
        return None

    mu = rec(0, set(), {})
    if mu is None:
        return No("no candidate filling verified", name)
    return Yes(mu, solver=name)


# ---------------------------------------------------------------------------
# Capacity one


def capacity1_system(instance: Instance) -> PreferenceSystem:
    """TAs propose with strict utility lists; courses rank by grade with ties."""
    left = {
        t: sorted(instance.neighbors_of_ta(t), key=lambda x: (-instance.utility(t, x), instance.course_index(x)))
        for t in instance.ta_ids
    }
    right = {}
    for x in instance.course_ids:
        groups: List[List[str]] = []
        last = None
        for t in _rank_by_grade(instance, x):
            g = instance.grade(t, x)
            if groups and g == last:
                groups[-1].append(t)
            else:
                groups.append([t])
            last = g
        right[x] = groups
    weights = {
        (t, x): 1 if instance.value(x, t) >= instance.k else 0
        for t in instance.ta_ids
        for x in instance.neighbors_of_ta(t)
    }
    return PreferenceSystem(left, right, {x: 1 for x in instance.course_ids}, weights)


def solve_capacity1(instance: Instance) -> SolverOutcome:
    name = "cap1"
    if any(instance.capacity(x) != 1 for x in instance.course_ids):
        return NotApplicable("some course has capacity above one", name)
    for t in instance.ta_ids:
        if not utilities_distinct(instance, t):
            return NotApplicable(f"TA {t} has repeated positive utilities", name)
    result = strongly_stable_max_weight(capacity1_system(instance))
    if result is NO_STRONGLY_STABLE:
        return No("no strongly stable matching exists", name)
    em, weight = result
    if weight < instance.n:
        return No(f"best strongly stable weight is {weight} < {instance.n}", name, weight=weight)
    return _checked(instance, Matching(dict(em.assignment)), name, weight=weight)


# ---------------------------------------------------------------------------
# Seat markets shared with the parameterized solvers


@dataclass(frozen=True)
class SeatGroup:
    course: str
    index: int
    capacity: int
    accepts: frozenset


def seat_market(instance: Instance, groups: Sequence[SeatGroup]) -> Tuple[Optional[Matching], bool]:
    """Run TA-proposing deferred acceptance over seat groups.

    TAs rank courses by utility and, inside a course, groups by index.
    Groups rank TAs by grade.  Returns the collapsed matching (or None) and
    whether every seat was filled.
    """
    gid = {g: f"{g.course}\x00{g.index}" for g in groups}
    by_name = {gid[g]: g for g in groups}
    left = {}
    for t in instance.ta_ids:
        lst = []
        for x in sorted(instance.neighbors_of_ta(t), key=lambda x: -instance.utility(t, x)):
            lst.extend(gid[g] for g in groups if g.course == x and t in g.accepts)
        left[t] = lst
    right = {
        gid[g]: [[t] for t in _rank_by_grade(instance, g.course) if t in g.accepts] for g in groups
    }
    system = PreferenceSystem(left, right, {gid[g]: g.capacity for g in groups})
    em = deferred_acceptance(system)
    rosters = em.rosters()
    saturated = all(len(rosters.get(gid[g], [])) == g.capacity for g in groups)
    if not saturated:
        return None, False
    return Matching({t: by_name[s].course for t, s in em.assignment.items() if s is not None}), True


def full_market(instance: Instance) -> PreferenceSystem:
    """Hospitals/residents market of the whole instance (strict lists)."""
    left = {
        t: sorted(instance.neighbors_of_ta(t), key=lambda x: (-instance.utility(t, x), instance.course_index(x)))
        for t in instance.ta_ids
    }
    right = {x: [[t] for t in _rank_by_grade(instance, x)] for x in instance.course_ids}
    return PreferenceSystem(left, right, {x: instance.capacity(x) for x in instance.course_ids})


def stable_fallback(instance: Instance, threshold=None) -> Optional[Matching]:
    """Search the stable matchings of the full market for one that verifies.

    Under distinct grades per course and distinct utilities per TA, a
    matching is MEFE exactly when it is stable in this market, fills every
    course and meets the threshold, so this search is complete.
    """
    for em in enumerate_stable_matchings(full_market(instance)):
        mu = Matching({t: x for t, x in em.assignment.items() if x is not None})
        if verify(instance, mu, threshold).is_mefe:
            return mu
    return None


# ---------------------------------------------------------------------------
# Two valuations per course


def ceil_fraction(value: Fraction) -> int:
    p, q = value.numerator, value.denominator
    return (p + q - 1) // q


def two_valuation_quota(q: int, q2: int, c: int, k) -> Optional[Tuple[int, int]]:
    """Seat split (high, low) for a course with values q >= q2 and capacity c.

    Returns None when no split reaches average ``k``.
    """
    k = Fraction(k)
    if q < k:
        return None
    if q == q2:
        return c, 0
    a = max(0, ceil_fraction(Fraction(c) * (k - q2) / (q - q2)))
    if a > c:
        return None
    return a, c - a


def _two_values(instance: Instance, x: str) -> List[int]:
    return sorted({instance.value(x, t) for t in instance.neighbors_of_course(x)}, reverse=True)


def solve_two_valuation(instance: Instance) -> SolverOutcome:
    name = "twoval"
    for x in instance.course_ids:
        if len(_two_values(instance, x)) > 2:
            return NotApplicable(f"course {x} has more than two positive valuations", name)
        if not grades_distinct(instance, x):
            return NotApplicable(f"course {x} has tied grades", name)
    for t in instance.ta_ids:
        if not utilities_distinct(instance, t):
            return NotApplicable(f"TA {t} has repeated positive utilities", name)

    groups: List[SeatGroup] = []
    quotas = {}
    for x in instance.course_ids:
        vals = _two_values(instance, x)
        if not vals:
            return No(f"course {x} has no positively valuing TA", name)
        q, q2 = vals[0], vals[-1]
        quota = two_valuation_quota(q, q2, instance.capacity(x), instance.k)
        if quota is None:
            return No(f"course {x} cannot reach the threshold", name)
        quotas[x] = quota
        nb = instance.neighbors_of_course(x)
        high = frozenset(t for t in nb if instance.value(x, t) == q)
        if quota[0]:
            groups.append(SeatGroup(x, 0, quota[0], high))
        if quota[1]:
            groups.append(SeatGroup(x, 1, quota[1], frozenset(nb)))
    mu, saturated = seat_market(instance, groups)
    if not saturated:
        return No("seat market leaves a seat empty", name, quotas=quotas)
    if verify(instance, mu).is_mefe:
        return Yes(mu, solver=name, quotas=quotas, path="seats")
    mu = stable_fallback(instance)
    if mu is None:
        return No("no stable matching of the full market verifies", name, quotas=quotas)
    return Yes(mu, solver=name, quotas=quotas, path="fallback")


# ---------------------------------------------------------------------------
# Dispatcher

AUTO_ORDER = ("tadeg1", "single", "degcap", "cap1", "twoval", "constenum", "fptn", "brute")
STRATEGIES = AUTO_ORDER + ("auto", "approx", "exist-binval", "exist-hr")


def _solver_table(budget, jobs, epsilon):
    from . import existence, paramsolvers

    return {
        "tadeg1": solve_ta_degree1,
        "single": solve_single_course,
        "degcap": solve_degcap_le1,
        "cap1": solve_capacity1,
        "twoval": solve_two_valuation,
        "constenum": lambda inst: solve_constant_enum(inst, budget=budget),
        "fptn": lambda inst: paramsolvers.solve_fpt_n(inst, budget=budget),
        "brute": lambda inst: solve_bruteforce(inst, budget=budget, jobs=jobs),
        "approx": lambda inst: paramsolvers.solve_approx(inst, epsilon, budget=budget),
        "exist-binval": existence.solve_existence_binval,
        "exist-hr": existence.solve_existence_hr,
    }


def dispatch(
    instance: Instance,
    strategy: str = "auto",
    *,
    epsilon=None,
    budget: Optional[int] = None,
    jobs: int = 1,
) -> SolverOutcome:
    """Run a named solver, or the first applicable one in auto order."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "approx" and epsilon is None:
        raise ValueError("strategy approx needs an epsilon")
    table = _solver_table(budget, jobs, epsilon)
    if strategy != "auto":
        out = table[strategy](instance)
        return out.named(strategy)
    skipped = []
    for name in AUTO_ORDER:
        out = table[name](instance)
        if out.applicable:
            return out.named(name, skipped=skipped)
        skipped.append(name)
    raise AssertionError("bruteforce is always applicable")  # pragma: no cover
