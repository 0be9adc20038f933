"""Matching engines shared by the special-case solvers.

All engines work on a :class:`PreferenceSystem`: a proposing left side with
strict lists and unit capacity, and a right side whose lists may contain
ties and whose agents carry capacities.  Lists are most-preferred first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import networkx as nx
from networkx.algorithms import bipartite

from .core import PreconditionViolated, TiesPresent


@dataclass(frozen=True, eq=False)
class PreferenceSystem:
    """Two-sided market.

    ``left_prefs[a]`` is a strict list of right agents.  ``right_prefs[b]`` is a
    list of tie groups, each a list of left agents.  ``weights`` maps
    ``(a, b)`` to 0 or 1 and is only consulted by the weighted engine.
    """

    left_prefs: Dict[str, List[str]]
    right_prefs: Dict[str, List[List[str]]]
    right_capacity: Dict[str, int] = field(default_factory=dict)
    weights: Dict[Tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        caps = {b: self.right_capacity.get(b, 1) for b in self.right_prefs}
        object.__setattr__(self, "right_capacity", caps)
        for b, c in caps.items():
            if not isinstance(c, int) or c < 1:
                raise PreconditionViolated(f"right agent {b!r} needs a positive capacity")
        left_rank = {}
        for a, lst in self.left_prefs.items():
            if len(set(lst)) != len(lst):
                raise PreconditionViolated(f"left agent {a!r} lists someone twice")
            left_rank[a] = {b: i for i, b in enumerate(lst)}
        right_rank = {}
        for b, groups in self.right_prefs.items():
            ranks = {}
            for i, grp in enumerate(groups):
                for a in grp:
                    if a in ranks:
                        raise PreconditionViolated(f"right agent {b!r} lists {a!r} twice")
                    ranks[a] = i
            right_rank[b] = ranks
        for a, ranks in left_rank.items():
            for b in ranks:
                if b not in right_rank or a not in right_rank[b]:
                    raise PreconditionViolated(f"acceptability of ({a}, {b}) is not mutual")
        for b, ranks in right_rank.items():
            for a in ranks:
                if a not in left_rank or b not in left_rank[a]:
                    raise PreconditionViolated(f"acceptability of ({a}, {b}) is not mutual")
        object.__setattr__(self, "_lrank", left_rank)
        object.__setattr__(self, "_rrank", right_rank)

    @property
    def left(self) -> List[str]:
        return list(self.left_prefs)

    @property
    def right(self) -> List[str]:
        return list(self.right_prefs)

    def left_rank(self, a: str, b: str) -> Optional[int]:
        return self._lrank[a].get(b)

    def right_rank(self, b: str, a: str) -> Optional[int]:
        return self._rrank[b].get(a)

    def has_right_ties(self) -> bool:
        return any(len(g) > 1 for groups in self.right_prefs.values() for g in groups)

    def weight(self, a: str, b: str) -> int:
        return self.weights.get((a, b), 0)


@dataclass(frozen=True, eq=False)
class EngineMatching:
    assignment: Dict[str, Optional[str]]

    def partner(self, a: str) -> Optional[str]:
        return self.assignment.get(a)

    def rosters(self) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = {}
        for a, b in self.assignment.items():
            if b is not None:
                out.setdefault(b, []).append(a)
        return out

    @property
    def size(self) -> int:
        return sum(1 for b in self.assignment.values() if b is not None)

    def key(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(sorted((a, b) for a, b in self.assignment.items() if b is not None))

    def __eq__(self, other):
        return isinstance(other, EngineMatching) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


class NoStronglyStable:
    """Marker returned when no strongly stable matching exists."""

    def __repr__(self):
        return "NoStronglyStable"

    def __bool__(self):
        return False


NO_STRONGLY_STABLE = NoStronglyStable()


# ---------------------------------------------------------------------------
# Deferred acceptance


def deferred_acceptance(system: PreferenceSystem) -> EngineMatching:
    """Left-proposing deferred acceptance; the left-optimal stable matching."""
    if system.has_right_ties():
        raise TiesPresent("deferred acceptance needs strict lists on both sides")
    nxt = {a: 0 for a in system.left_prefs}
    held: Dict[str, List[str]] = {b: [] for b in system.right_prefs}
    partner: Dict[str, Optional[str]] = {a: None for a in system.left_prefs}
    free = list(reversed(system.left))
    while free:
        a = free.pop()
        prefs = system.left_prefs[a]
        if nxt[a] >= len(prefs):
            continue
        b = prefs[nxt[a]]
        nxt[a] += 1
        roster = held[b]
        roster.append(a)
        partner[a] = b
        if len(roster) > system.right_capacity[b]:
            worst = max(roster, key=lambda s: system.right_rank(b, s))
            roster.remove(worst)
            partner[worst] = None
            free.append(worst)
    return EngineMatching(partner)


def blocking_pairs(system: PreferenceSystem, matching: EngineMatching) -> List[Tuple[str, str]]:
    """Classical blocking pairs: both sides strictly better off (weak stability)."""
    rosters = matching.rosters()
    out = []
    for a, prefs in system.left_prefs.items():
        cur = matching.partner(a)
        cur_rank = system.left_rank(a, cur) if cur is not None else len(prefs)
        for b in prefs[:cur_rank]:
            roster = rosters.get(b, [])
            if len(roster) < system.right_capacity[b]:
                out.append((a, b))
            elif any(system.right_rank(b, a) < system.right_rank(b, s) for s in roster):
                out.append((a, b))
    return out


def strongly_blocking_pairs(system: PreferenceSystem, matching: EngineMatching) -> List[Tuple[str, str]]:
    """Pairs where one side strictly improves and the other weakly improves.

    Left lists are strict, so the left agent always has to improve strictly;
    the right agent only needs to like the newcomer at least as much as one
    of its current partners (or to have a free seat).
    """
    rosters = matching.rosters()
    out = []
    for a, prefs in system.left_prefs.items():
        cur = matching.partner(a)
        cur_rank = system.left_rank(a, cur) if cur is not None else len(prefs)
        for b in prefs[:cur_rank]:
            roster = rosters.get(b, [])
            if len(roster) < system.right_capacity[b]:
                out.append((a, b))
            elif any(system.right_rank(b, a) <= system.right_rank(b, s) for s in roster):
                out.append((a, b))
    return out


# ---------------------------------------------------------------------------
# Strongly stable, maximum weight


def strongly_stable_max_weight(system: PreferenceSystem):
    """Maximum-weight strongly stable matching for unit capacities.

    Returns ``(EngineMatching, weight)`` or :data:`NO_STRONGLY_STABLE`.
    The search is exhaustive with pruning: left agents are placed in order
    and a branch dies as soon as two placed agents form a strongly blocking
    pair.  Among optimal matchings the first in placement order is returned.
    """
    for (a, b), w in system.weights.items():
        if w not in (0, 1):
            raise PreconditionViolated(f"weight of ({a}, {b}) must be 0 or 1")
    if any(c != 1 for c in system.right_capacity.values()):
        raise PreconditionViolated("strongly stable engine requires unit capacities")

    left = system.left
    holder: Dict[str, Optional[str]] = {b: None for b in system.right_prefs}
    choice: Dict[str, Optional[str]] = {}
    upper = min(len(left), len(system.right_prefs))
    best: List = [None, -1]

    def left_prefers(a, b) -> bool:
        cur = choice[a]
        if cur is None:
            return True
        return system.left_rank(a, b) < system.left_rank(a, cur)

    def blocked_by_placed(a: str, b: Optional[str]) -> bool:
        # pairs (a, b') with b' already held by a placed agent
        prefs = system.left_prefs[a]
        cut = system.left_rank(a, b) if b is not None else len(prefs)
        for b2 in prefs[:cut]:
            h = holder[b2]
            if h is not None and system.right_rank(b2, a) <= system.right_rank(b2, h):
                return True
        # pairs (a', b) with a' placed and preferring b
        if b is not None:
            for a2 in choice:
                if system.right_rank(b, a2) is not None and left_prefers(a2, b):
                    if system.right_rank(b, a2) <= system.right_rank(b, a):
                        return True
        return False

    def rec(i: int, weight: int):
        if best[1] == upper:
            return
        if weight + (len(left) - i) <= best[1]:
            return
        if i == len(left):
            # free right agents block with anyone who would strictly gain
            for b, h in holder.items():
                if h is None:
                    for a2 in choice:
                        if system.right_rank(b, a2) is not None and left_prefers(a2, b):
                            return
            best[0] = EngineMatching(dict(choice))
            best[1] = weight
            return
        a = left[i]
        for b in system.left_prefs[a] + [None]:
            if b is not None and holder[b] is not None:
                continue
            if blocked_by_placed(a, b):
                continue
            choice[a] = b
            if b is not None:
                holder[b] = a
            rec(i + 1, weight + (system.weight(a, b) if b is not None else 0))
            if b is not None:
                holder[b] = None
            del choice[a]

    rec(0, 0)
    if best[0] is None:
        return NO_STRONGLY_STABLE
    return best[0], best[1]


# ---------------------------------------------------------------------------
# Maximum bipartite matching


@dataclass(frozen=True)
class MaxMatchingResult:
    matching: EngineMatching
    saturates_left: bool
    saturates_right: bool


def max_bipartite_matching(adjacency: Mapping[str, Iterable[str]], right: Optional[Iterable[str]] = None) -> MaxMatchingResult:
    """Maximum-cardinality matching of a bipartite graph (Hopcroft-Karp).

    ``adjacency`` maps each left vertex to its right neighbours.  Left and
    right names live in separate namespaces.
    """
    g = nx.Graph()
    left_nodes = [("L", a) for a in adjacency]
    g.add_nodes_from(left_nodes)
    right_names = list(dict.fromkeys(right or []))
    for nbrs in adjacency.values():
        for b in nbrs:
            if b not in right_names:
                right_names.append(b)
    g.add_nodes_from(("R", b) for b in right_names)
    for a, nbrs in adjacency.items():
        for b in nbrs:
            g.add_edge(("L", a), ("R", b))
    mate = bipartite.hopcroft_karp_matching(g, top_nodes=left_nodes)
    assignment = {a: mate[("L", a)][1] if ("L", a) in mate else None for a in adjacency}
    em = EngineMatching(assignment)
    return MaxMatchingResult(
        em,
        saturates_left=em.size == len(assignment),
        saturates_right=em.size == len(right_names),
    )


# ---------------------------------------------------------------------------
# All stable matchings (strict lists, capacities)


def _clone_seats(system: PreferenceSystem):
    seats: Dict[str, Tuple[str, int]] = {}
    seat_of: Dict[str, List[str]] = {}
    for b, cap in system.right_capacity.items():
        names = [f"{b}\x00{s}" for s in range(cap)]
        seat_of[b] = names
        for s, name in enumerate(names):
            seats[name] = (b, s)
    men = {a: [s for b in prefs for s in seat_of[b]] for a, prefs in system.left_prefs.items()}
    women = {s: [grp[0] for grp in system.right_prefs[b]] for s, (b, _) in seats.items()}
    return men, women, seats


def enumerate_stable_matchings(system: PreferenceSystem) -> List[EngineMatching]:
    """Every stable matching of a strict many-to-one market.

    Each right agent is cloned into unit seats ranked consecutively by every
    left agent; stable matchings of the clone correspond one-to-one with the
    original ones.  The clone's lattice is walked with the break-marriage
    recursion, starting from the left-optimal matching.
    """
    if system.has_right_ties():
        raise TiesPresent("stable-matching enumeration needs strict lists")
    men, women, seats = _clone_seats(system)
    mrank = {a: {w: i for i, w in enumerate(lst)} for a, lst in men.items()}
    wrank = {w: {a: i for i, a in enumerate(lst)} for w, lst in women.items()}
    order = list(men)

    # left-optimal matching on the clone
    wife: Dict[str, Optional[str]] = {a: None for a in men}
    husband: Dict[str, Optional[str]] = {w: None for w in women}
    nxt = {a: 0 for a in men}
    free = list(reversed(order))
    while free:
        a = free.pop()
        while nxt[a] < len(men[a]):
            w = men[a][nxt[a]]
            nxt[a] += 1
            h = husband[w]
            if h is None or wrank[w][a] < wrank[w][h]:
                husband[w] = a
                wife[a] = w
                if h is not None:
                    wife[h] = None
                    free.append(h)
                break

    found: List[Dict[str, Optional[str]]] = []

    def break_marriage(wife_m, husband_m, idx):
        a0 = order[idx]
        w0 = wife_m[a0]
        if w0 is None:
            return None
        wife2, husband2 = dict(wife_m), dict(husband_m)
        threshold = wrank[w0][a0]
        husband2[w0] = None
        wife2[a0] = None
        a = a0
        pos = mrank[a0][w0] + 1
        while True:
            accepted = False
            while pos < len(men[a]):
                w = men[a][pos]
                pos += 1
                r = wrank[w][a]
                if w == w0:
                    if r < threshold:
                        husband2[w0] = a
                        wife2[a] = w0
                        return wife2, husband2
                    continue
                h = husband2[w]
                if h is None:
                    # a seat left empty in every stable matching
                    return None
                if r < wrank[w][h]:
                    husband2[w] = a
                    wife2[a] = w
                    wife2[h] = None
                    a = h
                    pos = mrank[h][w] + 1
                    accepted = True
                    break
            if not accepted:
                return None

    def rec(wife_m, husband_m, start):
        found.append(wife_m)
        for i in range(start, len(order)):
            res = break_marriage(wife_m, husband_m, i)
            if res is not None:
                rec(res[0], res[1], i)

    rec(wife, husband, 0)

    out, seen = [], set()
    for w_map in found:
        em = EngineMatching({a: (seats[w][0] if w is not None else None) for a, w in w_map.items()})
        if em.key() not in seen:
            seen.add(em.key())
            out.append(em)
    return out
