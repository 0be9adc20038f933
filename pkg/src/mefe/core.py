"""Data model and verifier for merit-based envy-free egalitarian (MEFE) matching.

An instance has courses (capacity, valuation over TAs) and TAs (utility over
courses, grade per course) plus a satisfaction threshold ``k``.  Grades and
``k`` are exact :class:`fractions.Fraction` values; valuations and utilities
are plain integers.  Nothing in here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

RationalLike = Union[int, str, Fraction]


class MEFEError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstance(MEFEError, ValueError):
    pass


class MalformedMatching(MEFEError, ValueError):
    pass


class CapacityMismatch(MEFEError):
    pass


class InfeasibleMatching(MEFEError):
    pass


class ResourceBound(MEFEError):
    """An enumeration would exceed its configured budget."""


class PreconditionViolated(MEFEError, ValueError):
    pass


class TiesPresent(PreconditionViolated):
    pass


def to_rational(value: RationalLike) -> Fraction:
    """Parse an int, a ``"num/den"`` string or a Fraction into a Fraction.

    Floats are refused: a float grade would silently lose ties.
    """
    if isinstance(value, bool):
        raise InvalidInstance(f"boolean is not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise InvalidInstance(f"malformed rational {value!r}") from None
        if d == 0:
            raise InvalidInstance(f"zero denominator in {value!r}")
        return Fraction(n, d)
    raise InvalidInstance(f"cannot interpret {value!r} as a rational")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _check_nonneg_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise InvalidInstance(f"{what} must be a nonnegative integer, got {value!r}")
    return value


@dataclass(frozen=True)
class Course:
    id: str
    capacity: int
    valuations: Dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class TA:
    id: str
    utilities: Dict[str, int] = field(default_factory=dict)
    grades: Dict[str, Fraction] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Instance:
    """An MEFE instance.

    Any table entry left out means 0.  Construction checks
    every structural invariant; pass ``allow_short=True`` to admit instances
    with fewer TAs than total seats (only sub-instances and negative fixtures
    need that).
    """

    courses: Tuple[Course, ...]
    tas: Tuple[TA, ...]
    k: Fraction
    allow_short: bool = False

    def __post_init__(self):
        courses = tuple(self.courses)
        tas = tuple(self.tas)
        object.__setattr__(self, "courses", courses)
        object.__setattr__(self, "tas", tas)
        object.__setattr__(self, "k", to_rational(self.k))
        if self.k < 0:
            raise InvalidInstance("threshold k must be nonnegative")

        course_ids = [x.id for x in courses]
        ta_ids = [t.id for t in tas]
        if len(set(course_ids)) != len(course_ids):
            raise InvalidInstance("duplicate course identifier")
        if len(set(ta_ids)) != len(ta_ids):
            raise InvalidInstance("duplicate TA identifier")
        cset, tset = set(course_ids), set(ta_ids)

        for x in courses:
            if isinstance(x.capacity, bool) or not isinstance(x.capacity, int) or x.capacity < 1:
                raise InvalidInstance(f"course {x.id}: capacity must be a positive integer")
            for t, val in x.valuations.items():
                if t not in tset:
                    raise InvalidInstance(f"course {x.id} values unknown TA {t!r}")
                _check_nonneg_int(val, f"valuation of {x.id} for {t}")
        for t in tas:
            for x, val in t.utilities.items():
                if x not in cset:
                    raise InvalidInstance(f"TA {t.id} has utility for unknown course {x!r}")
                _check_nonneg_int(val, f"utility of {t.id} for {x}")
            for x in t.grades:
                if x not in cset:
                    raise InvalidInstance(f"TA {t.id} has grade for unknown course {x!r}")

        # Normalised lookup tables; every pair present, zeros included.
        vals = {x.id: {t: x.valuations.get(t, 0) for t in ta_ids} for x in courses}
        utils = {t.id: {x: t.utilities.get(x, 0) for x in course_ids} for t in tas}
        grades = {}
        for t in tas:
            row = {}
            for x in course_ids:
                g = to_rational(t.grades.get(x, 0))
                if g < 0:
                    raise InvalidInstance(f"grade of {t.id} in {x} is negative")
                row[x] = g
            grades[t.id] = row

        for x in course_ids:
            for t in ta_ids:
                if (vals[x][t] == 0) != (utils[t][x] == 0):
                    raise InvalidInstance(
                        f"valuation/utility zero pattern differs on ({x}, {t})"
                    )

        if not self.allow_short and len(tas) < sum(x.capacity for x in courses):
            raise InvalidInstance("fewer TAs than total course capacity")

        object.__setattr__(self, "_v", vals)
        object.__setattr__(self, "_u", utils)
        object.__setattr__(self, "_g", grades)
        object.__setattr__(self, "_cap", {x.id: x.capacity for x in courses})
        object.__setattr__(self, "_course_index", {c: i for i, c in enumerate(course_ids)})
        object.__setattr__(self, "_ta_index", {t: i for i, t in enumerate(ta_ids)})

    # -- accessors -------------------------------------------------------
    @property
    def course_ids(self) -> List[str]:
        return [x.id for x in self.courses]

    @property
    def ta_ids(self) -> List[str]:
        return [t.id for t in self.tas]

    @property
    def n(self) -> int:
        return len(self.courses)

    @property
    def m(self) -> int:
        return len(self.tas)

    def value(self, course: str, ta: str) -> int:
        return self._v[course][ta]

    def utility(self, ta: str, course: str) -> int:
        return self._u[ta][course]

    def grade(self, ta: str, course: str) -> Fraction:
        return self._g[ta][course]

    def capacity(self, course: str) -> int:
        return self._cap[course]

    def course_index(self, course: str) -> int:
        return self._course_index[course]

    def ta_index(self, ta: str) -> int:
        return self._ta_index[ta]

    def has_course(self, course: str) -> bool:
        return course in self._cap

    def has_ta(self, ta: str) -> bool:
        return ta in self._ta_index

    def neighbors_of_course(self, course: str) -> List[str]:
        """TAs positively valued by ``course``, in instance order."""
        row = self._v[course]
        return [t for t in self.ta_ids if row[t] > 0]

    def neighbors_of_ta(self, ta: str) -> List[str]:
        row = self._u[ta]
        return [x for x in self.course_ids if row[x] > 0]

    @property
    def total_capacity(self) -> int:
        return sum(self._cap.values())

    def with_k(self, k: RationalLike) -> "Instance":
        return Instance(self.courses, self.tas, to_rational(k), self.allow_short)

    def restrict(self, course_ids: Iterable[str], ta_ids: Iterable[str]) -> "Instance":
        """Sub-instance on the given courses and TAs (short instances allowed)."""
        cs, ts = set(course_ids), set(ta_ids)
        courses = tuple(
            Course(x.id, x.capacity, {t: v for t, v in self._v[x.id].items() if t in ts and v})
            for x in self.courses
            if x.id in cs
        )
        tas = tuple(
            TA(
                t.id,
                {x: u for x, u in self._u[t.id].items() if x in cs and u},
                {x: g for x, g in self._g[t.id].items() if x in cs and g},
            )
            for t in self.tas
            if t.id in ts
        )
        return Instance(courses, tas, self.k, allow_short=True)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.course_ids == other.course_ids
            and self.ta_ids == other.ta_ids
            and self.k == other.k
            and self._v == other._v
            and self._u == other._u
            and self._g == other._g
            and self._cap == other._cap
        )

    def __hash__(self):
        return hash((tuple(self.course_ids), tuple(self.ta_ids), self.k))

    def __repr__(self):
        return f"Instance(n={self.n}, m={self.m}, k={self.k})"


def make_instance(
    courses: Sequence[Tuple[str, int, Mapping[str, int]]],
    tas: Sequence[Tuple[str, Mapping[str, int], Mapping[str, RationalLike]]],
    k: RationalLike,
    allow_short: bool = False,
) -> Instance:
    """Convenience constructor from plain tuples."""
    return Instance(
        tuple(Course(cid, cap, dict(vals)) for cid, cap, vals in courses),
        tuple(
            TA(tid, dict(utils), {x: to_rational(g) for x, g in grades.items()})
            for tid, utils, grades in tas
        ),
        to_rational(k),
        allow_short,
    )


@dataclass(frozen=True, eq=False)
class Matching:
    """Partial assignment TA -> course; TAs not listed are unassigned."""

    assignment: Dict[str, Optional[str]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {t: x for t, x in self.assignment.items() if x is not None}
        object.__setattr__(self, "assignment", clean)

    def course_of(self, ta: str) -> Optional[str]:
        return self.assignment.get(ta)

    def roster(self, course: str) -> List[str]:
        return [t for t, x in self.assignment.items() if x == course]

    def items(self):
        return self.assignment.items()

    def key(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(sorted(self.assignment.items()))

    def __eq__(self, other):
        if not isinstance(other, Matching):
            return NotImplemented
        return self.assignment == other.assignment

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        inner = ", ".join(f"{t}->{x}" for t, x in self.key())
        return f"Matching({inner})"


def check_matching(instance: Instance, matching: Matching) -> None:
    """Raise MalformedMatching if the matching names unknown ids."""
    for t, x in matching.items():
        if not instance.has_ta(t):
            raise MalformedMatching(f"unknown TA {t!r} in matching")
        if not instance.has_course(x):
            raise MalformedMatching(f"unknown course {x!r} in matching")


def rosters(instance: Instance, matching: Matching) -> Dict[str, List[str]]:
    out: Dict[str, List[str]] = {x: [] for x in instance.course_ids}
    for t in instance.ta_ids:
        x = matching.course_of(t)
        if x is not None:
            out[x].append(t)
    return out


# ---------------------------------------------------------------------------
# Bipartite graph


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Course/TA graph with an edge wherever the TA's utility is positive."""

    course_nbrs: Dict[str, Tuple[str, ...]]
    ta_nbrs: Dict[str, Tuple[str, ...]]
    components: Tuple[Tuple[Tuple[str, ...], Tuple[str, ...]], ...]

    def degree(self, node: str, side: str = "course") -> int:
        table = self.course_nbrs if side == "course" else self.ta_nbrs
        return len(table[node])

    @property
    def edges(self) -> List[Tuple[str, str]]:
        return [(x, t) for x, ts in self.course_nbrs.items() for t in ts]


def build_graph(instance: Instance) -> BipartiteGraph:
    course_nbrs = {
        x: tuple(t for t in instance.ta_ids if instance.utility(t, x) > 0)
        for x in instance.course_ids
    }
    ta_nbrs = {
        t: tuple(x for x in instance.course_ids if instance.utility(t, x) > 0)
        for t in instance.ta_ids
    }

    seen_c, seen_t = set(), set()
    comps = []

    def flood(start_side, start):
        cs, ts = set(), set()
        stack = [(start_side, start)]
        while stack:
            side, node = stack.pop()
            if side == "c":
                if node in cs:
                    continue
                cs.add(node)
                stack.extend(("t", t) for t in course_nbrs[node])
            else:
                if node in ts:
                    continue
                ts.add(node)
                stack.extend(("c", x) for x in ta_nbrs[node])
        seen_c.update(cs)
        seen_t.update(ts)
        return (
            tuple(x for x in instance.course_ids if x in cs),
            tuple(t for t in instance.ta_ids if t in ts),
        )

    for x in instance.course_ids:
        if x not in seen_c:
            comps.append(flood("c", x))
    for t in instance.ta_ids:
        if t not in seen_t:
            comps.append(flood("t", t))
    return BipartiteGraph(course_nbrs, ta_nbrs, tuple(comps))


# ---------------------------------------------------------------------------
# Verification


def avg_util(instance: Instance, matching: Matching, course: str) -> Fraction:
    roster = matching.roster(course)
    cap = instance.capacity(course)
    if len(roster) != cap:
        raise CapacityMismatch(f"course {course} holds {len(roster)} TAs, capacity {cap}")
    return Fraction(sum(instance.value(course, t) for t in roster), cap)


def envy_pairs(instance: Instance, matching: Matching) -> List[Tuple[str, str]]:
    """All ordered merit-based envy pairs (envier, envied).

    Only assigned TAs can be envied; an unassigned envier's own utility is 0.
    """
    check_matching(instance, matching)
    pairs = []
    for ti in instance.ta_ids:
        own = matching.course_of(ti)
        own_u = instance.utility(ti, own) if own is not None else 0
        for tj in instance.ta_ids:
            if tj == ti:
                continue
            x = matching.course_of(tj)
            if x is None or x == own:
                continue
            if instance.grade(ti, x) >= instance.grade(tj, x) and instance.utility(ti, x) > own_u:
                pairs.append((ti, tj))
    return pairs


@dataclass(frozen=True)
class Violation:
    kind: str  # capacity_mismatch | zero_valued_assignment | unsatisfied_course | envy
    course: Optional[str] = None
    ta: Optional[str] = None
    other: Optional[str] = None
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    feasible: bool
    avg_utils: Dict[str, Fraction]
    envy_pairs: List[Tuple[str, str]]
    is_mefe: bool
    violations: List[Violation]
    threshold: Fraction

    @property
    def satisfied(self) -> bool:
        return all(a >= self.threshold for a in self.avg_utils.values())


def verify(
    instance: Instance, matching: Matching, threshold: Optional[RationalLike] = None
) -> VerificationReport:
    """Check feasibility and every MEFE condition on top of it.

    ``threshold`` overrides ``instance.k`` (used for relaxed guarantees).
    Every violation is collected; nothing is raised for a bad matching
    unless it names unknown ids.
    """
    check_matching(instance, matching)
    k = instance.k if threshold is None else to_rational(threshold)
    violations: List[Violation] = []
    feasible = True
    avgs: Dict[str, Fraction] = {}
    for x, roster in rosters(instance, matching).items():
        cap = instance.capacity(x)
        if len(roster) != cap:
            feasible = False
            violations.append(
                Violation("capacity_mismatch", course=x, detail=f"{len(roster)} of {cap}")
            )
        for t in roster:
            if instance.value(x, t) == 0:
                feasible = False
                violations.append(Violation("zero_valued_assignment", course=x, ta=t))
        avgs[x] = Fraction(sum(instance.value(x, t) for t in roster), cap)
        if avgs[x] < k:
            violations.append(
                Violation("unsatisfied_course", course=x, detail=f"{format_rational(avgs[x])} < {format_rational(k)}")
            )
    pairs = envy_pairs(instance, matching)
    violations.extend(Violation("envy", ta=a, other=b, course=matching.course_of(b)) for a, b in pairs)
    ok = feasible and not pairs and all(a >= k for a in avgs.values())
    return VerificationReport(feasible, avgs, pairs, ok, violations, k)


def is_weakly_stable(instance: Instance, matching: Matching) -> bool:
    """No course/TA pair where the TA strictly prefers the course and strictly
    out-grades somebody assigned there."""
    report = verify(instance, matching)
    if not report.feasible:
        raise InfeasibleMatching("weak stability is only defined for feasible matchings")
    by_course = rosters(instance, matching)
    for t in instance.ta_ids:
        own = matching.course_of(t)
        own_u = instance.utility(t, own) if own is not None else 0
        for x, roster in by_course.items():
            if x == own or instance.utility(t, x) <= own_u:
                continue
            if any(instance.grade(t, x) > instance.grade(s, x) for s in roster):
                return False
    return True
