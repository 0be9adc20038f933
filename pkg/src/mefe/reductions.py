"""Instance generators: hardness constructions and random fixtures.

The three constructions turn instances of equal-cardinality partition,
(3,3)-SMTI and 3-dimensional perfect matching into MEFE instances, so that
the exact solvers can be cross-checked against independent brute force on
the source problems.  Generated identifiers are structured (``r#2``,
``r.d1``) so solutions can be mapped back without side tables.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import TA, Course, Instance, InvalidInstance, Matching, MEFEError, verify


class OddCardinality(InvalidInstance):
    pass


class ListTooLong(InvalidInstance):
    pass


class TiesOnMenSide(InvalidInstance):
    pass


class DegreeTooHigh(InvalidInstance):
    pass


class NotAGeneratedInstance(MEFEError, ValueError):
    pass


class UnsatisfiableProfile(MEFEError, ValueError):
    pass


# ---------------------------------------------------------------------------
# Equal-cardinality partition


def from_partition(values: Sequence[int]) -> Instance:
    """Two identical courses with capacity |S|/2 valuing TA ``tj`` at ``s_j``.

    The threshold is the average Σs/|S|, so a course reaches it exactly
    when its half of S sums to Σs/2.
    """
    values = list(values)
    if len(values) % 2:
        raise OddCardinality("partition input needs an even number of values")
    if any(isinstance(s, bool) or not isinstance(s, int) or s < 1 for s in values):
        raise InvalidInstance("partition values must be positive integers")
    m = len(values)
    tids = [f"t{j + 1}" for j in range(m)]
    vals = dict(zip(tids, values))
    courses = tuple(Course(x, m // 2, dict(vals)) for x in ("x1", "x2")) if m else ()
    tas = tuple(
        TA(t, {x.id: 1 for x in courses}, {x.id: Fraction(1) for x in courses}) for t in tids
    )
    k = Fraction(sum(values), m) if m else Fraction(0)
    return Instance(courses, tas, k)


def map_back_partition(instance: Instance, matching: Matching) -> Tuple[List[int], List[int]]:
    """Read the two halves of S off an MEFE matching of a partition instance."""
    if instance.course_ids != ["x1", "x2"]:
        raise NotAGeneratedInstance("expected courses x1 and x2")
    if any(instance.value("x1", t) != instance.value("x2", t) for t in instance.ta_ids):
        raise NotAGeneratedInstance("courses value TAs differently")
    if not verify(instance, matching).is_mefe:
        raise NotAGeneratedInstance("matching is not MEFE for this instance")
    halves = ([], [])
    for t in instance.ta_ids:
        x = matching.course_of(t)
        halves[0 if x == "x1" else 1].append(instance.value("x1", t))
    return halves


# ---------------------------------------------------------------------------
# (3,3)-SMTI with ties on the women's side


@dataclass(frozen=True)
class SmtiInput:
    """Men list women strictly; women list tie groups of men."""

    men: Dict[str, List[str]]
    women: Dict[str, List[List[str]]]

    def __post_init__(self):
        for m, lst in self.men.items():
            if len(lst) > 3:
                raise ListTooLong(f"man {m} lists more than three women")
            if any(not isinstance(w, str) for w in lst):
                raise TiesOnMenSide(f"man {m} has a tie in his list")
            if len(set(lst)) != len(lst):
                raise TiesOnMenSide(f"man {m} repeats a woman")
        for w, groups in self.women.items():
            flat = [m for g in groups for m in g]
            if len(flat) > 3:
                raise ListTooLong(f"woman {w} lists more than three men")
        acc_m = {(m, w) for m, lst in self.men.items() for w in lst}
        acc_w = {(m, w) for w, gs in self.women.items() for g in gs for m in g}
        if acc_m != acc_w:
            raise InvalidInstance("acceptability is not mutual")

    def woman_position(self, w: str, m: str) -> Optional[int]:
        for i, grp in enumerate(self.women[w]):
            if m in grp:
                return i + 1
        return None


def from_smti33(smti: SmtiInput, binary: bool = False) -> Instance:
    """Men become unit-capacity courses, women become TAs.

    Grades (and valuations, unless ``binary``) are 4 minus the man's rank of
    the woman; utilities are 4 minus the woman's position for the man, tied
    men sharing a position.
    """
    courses = []
    for m, lst in smti.men.items():
        courses.append(Course(m, 1, {w: 1 if binary else 4 - (i + 1) for i, w in enumerate(lst)}))
    tas = []
    for w in smti.women:
        utils, grades = {}, {}
        for m, lst in smti.men.items():
            if w in lst:
                utils[m] = 4 - smti.woman_position(w, m)
                grades[m] = Fraction(4 - (lst.index(w) + 1))
        tas.append(TA(w, utils, grades))
    return Instance(tuple(courses), tuple(tas), Fraction(1))


def random_smti(seed: int, n: int, density: float = 0.6, tie_prob: float = 0.3) -> SmtiInput:
    rng = random.Random(seed)
    men = [f"m{i + 1}" for i in range(n)]
    women = [f"w{i + 1}" for i in range(n)]
    load = {w: 0 for w in women}
    lists = {}
    for m in men:
        pool = [w for w in women if load[w] < 3 and rng.random() < density]
        rng.shuffle(pool)
        chosen = pool[:3]
        for w in chosen:
            load[w] += 1
        lists[m] = chosen
    wl = {}
    for w in women:
        suitors = [m for m in men if w in lists[m]]
        rng.shuffle(suitors)
        groups: List[List[str]] = []
        for m in suitors:
            if groups and rng.random() < tie_prob:
                groups[-1].append(m)
            else:
                groups.append([m])
        wl[w] = groups
    return SmtiInput(lists, wl)


# ---------------------------------------------------------------------------
# 3-dimensional perfect matching


@dataclass(frozen=True)
class ThreeDMInput:
    P: Tuple[str, ...]
    Q: Tuple[str, ...]
    R: Tuple[str, ...]
    E: Tuple[Tuple[str, str, str], ...]

    def __post_init__(self):
        if not len(self.P) == len(self.Q) == len(self.R):
            raise InvalidInstance("P, Q and R must have equal size")
        names = list(self.P) + list(self.Q) + list(self.R)
        if len(set(names)) != len(names):
            raise InvalidInstance("element names must be distinct across P, Q and R")
        for p, q, r in self.E:
            if p not in self.P or q not in self.Q or r not in self.R:
                raise InvalidInstance(f"triple ({p}, {q}, {r}) uses unknown elements")
        if len(set(self.E)) != len(self.E):
            raise InvalidInstance("duplicate triple")
        for z in names:
            if sum(1 for e in self.E if z in e) > 3:
                raise DegreeTooHigh(f"element {z} lies in more than three triples")


def from_3dpm(inst: ThreeDMInput) -> Instance:
    """Three capacity-2 copies ``r#1..r#3`` per r and four dummy TAs per r.

    Copy j of r values the P and Q members of the j-th triple through r at 2.
    Dummies ``r.d1, r.d2`` are valued 3 and ``r.dp1, r.dp2`` 1 by every copy
    of r, with grade 2 there; originals have grade 1 on the copies that value
    them.  TA utility is 1 exactly where the course value is positive.
    """
    courses = []
    vals: Dict[str, Dict[str, int]] = {}
    for r in inst.R:
        triples = [e for e in inst.E if e[2] == r]
        for j in range(1, 4):
            cid = f"{r}#{j}"
            v = {f"{r}.d1": 3, f"{r}.d2": 3, f"{r}.dp1": 1, f"{r}.dp2": 1}
            if j <= len(triples):
                p, q, _ = triples[j - 1]
                v[p] = v[q] = 2
            vals[cid] = v
            courses.append(Course(cid, 2, v))
    ta_names = list(inst.P) + list(inst.Q)
    for r in inst.R:
        ta_names += [f"{r}.d1", f"{r}.d2", f"{r}.dp1", f"{r}.dp2"]
    tas = []
    for t in ta_names:
        utils = {c: 1 for c, v in vals.items() if t in v}
        grades = {c: Fraction(2 if v[t] != 2 else 1) for c, v in vals.items() if t in v}
        tas.append(TA(t, utils, grades))
    return Instance(tuple(courses), tuple(tas), Fraction(2))


def map_back_3dpm(inst: ThreeDMInput, matching: Matching) -> List[Tuple[str, str, str]]:
    """Triples whose copy course is filled by its two original TAs."""
    out = []
    for r in inst.R:
        triples = [e for e in inst.E if e[2] == r]
        for j, (p, q, _) in enumerate(triples, start=1):
            cid = f"{r}#{j}"
            if matching.course_of(p) == cid and matching.course_of(q) == cid:
                out.append((p, q, r))
    return out


def random_3dm(seed: int, size: int, n_triples: int) -> ThreeDMInput:
    """Random 3DM input where every element lies in at most three triples."""
    rng = random.Random(seed)
    P = tuple(f"p{i + 1}" for i in range(size))
    Q = tuple(f"q{i + 1}" for i in range(size))
    R = tuple(f"r{i + 1}" for i in range(size))
    deg: Dict[str, int] = {}
    E = []
    candidates = [(p, q, r) for p in P for q in Q for r in R]
    rng.shuffle(candidates)
    for e in candidates:
        if len(E) >= n_triples:
            break
        if all(deg.get(z, 0) < 3 for z in e):
            E.append(e)
            for z in e:
                deg[z] = deg.get(z, 0) + 1
    return ThreeDMInput(P, Q, R, tuple(E))


# ---------------------------------------------------------------------------
# Random instances with a requested profile

STRUCTURES = ("none", "degcap1", "cap1", "twoval", "binval", "allpos", "tadeg1", "single", "distinct")


def _capacities(rng, n, m, cap_max):
    caps = [rng.randint(1, cap_max) for _ in range(n)]
    while sum(caps) > m:
        i = max(range(n), key=lambda j: (caps[j], -j))
        if caps[i] == 1:
            raise UnsatisfiableProfile(f"{n} courses need more than {m} TAs")
        caps[i] -= 1
    return caps


def _distinct_values(rng, count, val_max):
    if count > val_max:
        raise UnsatisfiableProfile(f"cannot draw {count} distinct values from 1..{val_max}")
    return rng.sample(range(1, val_max + 1), count)


def random_instance(
    seed: int,
    n: int,
    m: int,
    cap_max: int = 2,
    val_max: int = 4,
    tie_policy: str = "allow",
    structure: str = "none",
    k: Optional[Fraction] = None,
    density: float = 0.6,
    _retry: int = 0,
) -> Instance:
    """Deterministic pseudo-random instance with the requested profile.

    ``tie_policy="distinct"`` forces distinct grades per course and distinct
    positive utilities per TA; several structures imply it.  ``k`` defaults
    to a random half-integer between 0 and ``val_max``.  The stream comes
    from :class:`random.Random`, which is seeded identically on every
    platform.
    """
    if structure not in STRUCTURES:
        raise UnsatisfiableProfile(f"unknown structure {structure!r}")
    if n < 0 or m < 0 or cap_max < 1 or val_max < 1:
        raise UnsatisfiableProfile("parameters must be positive")
    rng = random.Random(seed)
    if structure == "single":
        n = 1
    if structure == "cap1":
        cap_max = 1
    distinct = tie_policy == "distinct" or structure in ("cap1", "twoval", "binval", "allpos", "distinct")
    if structure == "cap1":
        distinct_grades = tie_policy == "distinct"
    else:
        distinct_grades = distinct
    caps = _capacities(rng, n, m, cap_max) if n else []
    cids = [f"x{i + 1}" for i in range(n)]
    tids = [f"t{j + 1}" for j in range(m)]

    # edges
    edges = {x: set() for x in cids}
    if structure == "allpos":
        for x in cids:
            edges[x] = set(tids)
    elif structure == "degcap1":
        for x, c in zip(cids, caps):
            d = min(m, c + rng.randint(0, 1))
            edges[x] = set(rng.sample(tids, d))
    elif structure == "tadeg1":
        for t in tids:
            if rng.random() < 0.85 and cids:
                edges[rng.choice(cids)].add(t)
    else:
        for x in cids:
            for t in tids:
                if rng.random() < density:
                    edges[x].add(t)
            if structure in ("binval",) and len(edges[x]) < caps[cids.index(x)]:
                extra = [t for t in tids if t not in edges[x]]
                rng.shuffle(extra)
                edges[x].update(extra[: caps[cids.index(x)] - len(edges[x])])

    ta_courses = {t: [x for x in cids if t in edges[x]] for t in tids}
    # utilities
    utils: Dict[str, Dict[str, int]] = {}
    a = rng.randint(1, val_max)
    for t in tids:
        cs = ta_courses[t]
        if structure == "binval":
            utils[t] = {x: a for x in cs}
        elif distinct:
            utils[t] = dict(zip(cs, _distinct_values(rng, len(cs), max(val_max, len(cs)))))
        else:
            utils[t] = {x: rng.randint(1, val_max) for x in cs}
    # valuations and grades
    vals: Dict[str, Dict[str, int]] = {}
    grades: Dict[str, Dict[str, Fraction]] = {t: {} for t in tids}
    for x in cids:
        nb = [t for t in tids if t in edges[x]]
        if structure == "twoval":
            hi = rng.randint(1, val_max)
            lo = rng.randint(1, hi)
            vals[x] = {t: rng.choice((hi, lo)) for t in nb}
        else:
            vals[x] = {t: rng.randint(1, val_max) for t in nb}
        if structure == "binval":
            gs = _distinct_values(rng, len(nb), max(val_max, len(nb)))
            vals[x] = dict(zip(nb, gs))
            for t, g in zip(nb, gs):
                grades[t][x] = Fraction(g)
        elif distinct_grades:
            gs = _distinct_values(rng, len(nb), 2 * max(val_max, len(nb)))
            for t, g in zip(nb, gs):
                grades[t][x] = Fraction(g, 2)
        else:
            for t in nb:
                grades[t][x] = Fraction(rng.randint(1, val_max))
    if k is None:
        k = Fraction(rng.randint(0, 2 * val_max), 2)
    inst = Instance(
        tuple(Course(x, c, vals[x]) for x, c in zip(cids, caps)),
        tuple(TA(t, utils[t], grades[t]) for t in tids),
        Fraction(k),
    )
    if structure == "binval":
        from .existence import hall_by_matching

        if not hall_by_matching(inst):
            if _retry >= 100:
                raise UnsatisfiableProfile("could not draw an instance meeting Hall's condition")
            return random_instance(
                seed + 1_000_003, n, m, cap_max, val_max, tie_policy, structure, k, density, _retry + 1
            )
    return inst
