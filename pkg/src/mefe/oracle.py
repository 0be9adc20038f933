"""Exhaustive ground-truth solver.

The search assigns TAs one at a time in instance order.  Each TA tries its
positively valued courses in course order and then stays unassigned, so
solutions come out in lexicographic assignment order.  Branches are cut as
soon as a course overflows, some course can no longer be filled, a filled
course falls short of ``k``, or two already-placed TAs form an envy pair.
Every cut is sound, and every leaf is re-checked with :func:`core.verify`.

The budget bounds the number of search nodes visited.  The space is always
split by the first TA's choice; each part gets the full budget, which makes
the serial and parallel runs behave identically.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

from .core import Instance, Matching, ResourceBound, verify

DEFAULT_BUDGET = 10**8

YES = "yes"
NO = "no"
NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class SolverOutcome:
    """Result of a solver run.

    ``matching`` is set iff the verdict is yes; ``reason`` is set for
    not-applicable outcomes (and optionally explains a no).
    """

    verdict: str
    matching: Optional[Matching] = None
    reason: str = ""
    solver: str = ""
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_yes(self) -> bool:
        return self.verdict == YES

    @property
    def is_no(self) -> bool:
        return self.verdict == NO

    @property
    def applicable(self) -> bool:
        return self.verdict != NOT_APPLICABLE

    def named(self, solver: str, **info) -> "SolverOutcome":
        merged = dict(self.info)
        merged.update(info)
        return SolverOutcome(self.verdict, self.matching, self.reason, solver, merged)


def Yes(matching: Matching, solver: str = "", **info) -> SolverOutcome:
    return SolverOutcome(YES, matching, "", solver, info)


def No(reason: str = "", solver: str = "", **info) -> SolverOutcome:
    return SolverOutcome(NO, None, reason, solver, info)


def NotApplicable(reason: str, solver: str = "") -> SolverOutcome:
    return SolverOutcome(NOT_APPLICABLE, None, reason, solver)


def resolve_budget(budget: Optional[int]) -> int:
    """Explicit budget, else ``MEFE_BUDGET`` from the environment, else 10**8."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("MEFE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class _Search:
    """Index-based tables for the pruned depth-first search."""

    def __init__(self, instance: Instance):
        self.instance = instance
        cids, tids = instance.course_ids, instance.ta_ids
        self.n, self.m = len(cids), len(tids)
        self.cap = [instance.capacity(x) for x in cids]
        self.val = [[instance.value(x, t) for x in cids] for t in tids]
        self.util = [[instance.utility(t, x) for x in cids] for t in tids]
        self.grade = [[instance.grade(t, x) for x in cids] for t in tids]
        self.need = [instance.k * c for c in self.cap]
        self.options = [
            [j for j in range(self.n) if self.util[i][j] > 0] + [-1] for i in range(self.m)
        ]
        # suffix[j][i] = TAs with index >= i that can sit in course j
        self.suffix = [[0] * (self.m + 1) for _ in range(self.n)]
        for j in range(self.n):
            for i in range(self.m - 1, -1, -1):
                self.suffix[j][i] = self.suffix[j][i + 1] + (1 if self.val[i][j] > 0 else 0)

    def initial_ok(self) -> bool:
        return all(self.suffix[j][0] >= self.cap[j] for j in range(self.n))

    def _conflict(self, i: int, ci: int, choice: List[int]) -> bool:
        own_i = self.util[i][ci] if ci >= 0 else 0
        g, u = self.grade, self.util
        for j in range(i):
            cj = choice[j]
            if cj == ci:
                continue
            if cj >= 0 and g[i][cj] >= g[j][cj] and u[i][cj] > own_i:
                return True
            if ci >= 0:
                own_j = u[j][cj] if cj >= 0 else 0
                if g[j][ci] >= g[i][ci] and u[j][ci] > own_j:
                    return True
        return False

    def run(self, first: Optional[int], budget: int) -> Iterator[List[int]]:
        """Yield complete choice vectors; ``first`` pins TA 0's option."""
        n, m = self.n, self.m
        load = [0] * n
        total = [0] * n
        choice = [-1] * m
        visits = [0]

        def rec(i: int):
            visits[0] += 1
            if visits[0] > budget:
                raise ResourceBound(f"search exceeded budget of {budget} nodes")
            if i == m:
                yield list(choice)
                return
            opts = self.options[i] if (i > 0 or first is None) else [first]
            for c in opts:
                if c >= 0:
                    if load[c] == self.cap[c]:
                        continue
                    if self._conflict(i, c, choice):
                        continue
                    load[c] += 1
                    total[c] += self.val[i][c]
                    ok = load[c] < self.cap[c] or total[c] >= self.need[c]
                else:
                    if self._conflict(i, -1, choice):
                        continue
                    ok = True
                if ok:
                    for j in range(n):
                        if self.cap[j] - load[j] > self.suffix[j][i + 1]:
                            ok = False
                            break
                if ok:
                    choice[i] = c
                    yield from rec(i + 1)
                    choice[i] = -1
                if c >= 0:
                    load[c] -= 1
                    total[c] -= self.val[i][c]

        yield from rec(0)

    def to_matching(self, choice: List[int]) -> Matching:
        cids, tids = self.instance.course_ids, self.instance.ta_ids
        return Matching({tids[i]: cids[c] for i, c in enumerate(choice) if c >= 0})


def _branch(instance: Instance, first: Optional[int], budget: int, find_all: bool) -> List[Matching]:
    search = _Search(instance)
    found = []
    for choice in search.run(first, budget):
        matching = search.to_matching(choice)
        if not verify(instance, matching).is_mefe:  # pragma: no cover - pruning bug guard
            raise AssertionError(f"search produced a non-MEFE leaf {matching}")
        found.append(matching)
        if not find_all:
            break
    return found


def _branch_safe(args):
    instance, first, budget, find_all = args
    try:
        return ("ok", _branch(instance, first, budget, find_all))
    except ResourceBound as exc:
        return ("budget", str(exc))


def _search(instance: Instance, budget: Optional[int], jobs: int, find_all: bool) -> List[Matching]:
    budget = resolve_budget(budget)
    search = _Search(instance)
    if search.m == 0:
        return [Matching({})] if search.n == 0 else []
    if not search.initial_ok():
        return []
    firsts = search.options[0]
    tasks = [(instance, f, budget, find_all) for f in firsts]
    results: List[Matching] = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_branch_safe, tasks))
        for status, payload in outcomes:
            if status == "budget":
                raise ResourceBound(payload)
            results.extend(payload)
            if results and not find_all:
                break
        return results
    for task in tasks:
        status, payload = _branch_safe(task)
        if status == "budget":
            raise ResourceBound(payload)
        results.extend(payload)
        if results and not find_all:
            break
    return results


def solve_bruteforce(instance: Instance, budget: Optional[int] = None, jobs: int = 1) -> SolverOutcome:
    """Exact answer by exhaustive search; the first MEFE matching in order."""
    found = _search(instance, budget, jobs, find_all=False)
    if found:
        return Yes(found[0], solver="brute")
    return No("exhaustive search found no MEFE matching", solver="brute")


def enumerate_all_mefe(instance: Instance, budget: Optional[int] = None, jobs: int = 1) -> List[Matching]:
    """Every MEFE matching, in lexicographic assignment order."""
    return _search(instance, budget, jobs, find_all=True)


def count_assignments(instance: Instance) -> int:
    """Size of the unpruned assignment space, (n+1)^m."""
    return (instance.n + 1) ** instance.m
