"""JSON reading and writing for every object the CLI exchanges.

Rationals travel as ``"num/den"`` strings; plain integers are accepted on
input for convenience.  Output is canonical (sorted keys, fixed layout) so
equal objects always serialise to equal bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict

from .core import (
    TA,
    Course,
    Instance,
    InvalidInstance,
    MalformedMatching,
    Matching,
    VerificationReport,
    format_rational,
    to_rational,
)


def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    return {
        "k": format_rational(instance.k),
        "courses": [
            {
                "id": x.id,
                "capacity": x.capacity,
                "valuations": {t: v for t in instance.ta_ids if (v := instance.value(x.id, t))},
            }
            for x in instance.courses
        ],
        "tas": [
            {
                "id": t.id,
                "utilities": {x: u for x in instance.course_ids if (u := instance.utility(t.id, x))},
                "grades": {
                    x: format_rational(g)
                    for x in instance.course_ids
                    if (g := instance.grade(t.id, x))
                },
            }
            for t in instance.tas
        ],
    }


def instance_from_dict(data: Dict[str, Any], allow_short: bool = False) -> Instance:
    if not isinstance(data, dict):
        raise InvalidInstance("instance JSON must be an object")
    try:
        courses = tuple(
            Course(str(c["id"]), c["capacity"], dict(c.get("valuations", {})))
            for c in data.get("courses", [])
        )
        tas = tuple(
            TA(
                str(t["id"]),
                dict(t.get("utilities", {})),
                {x: to_rational(g) for x, g in t.get("grades", {}).items()},
            )
            for t in data.get("tas", [])
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise InvalidInstance(f"malformed instance JSON: {exc}") from None
    return Instance(courses, tas, to_rational(data.get("k", 0)), allow_short)


def matching_to_dict(matching: Matching, instance: Instance | None = None) -> Dict[str, Any]:
    """Serialise a matching; with an instance, unassigned TAs appear as null."""
    if instance is None:
        return {"assignment": dict(sorted(matching.assignment.items()))}
    return {"assignment": {t: matching.course_of(t) for t in instance.ta_ids}}


def matching_from_dict(data: Dict[str, Any]) -> Matching:
    if not isinstance(data, dict) or not isinstance(data.get("assignment"), dict):
        raise MalformedMatching("matching JSON must have an 'assignment' object")
    out = {}
    for t, x in data["assignment"].items():
        if x is not None and not isinstance(x, str):
            raise MalformedMatching(f"course for {t!r} must be a string or null")
        out[str(t)] = x
    return Matching(out)


def report_to_dict(report: VerificationReport) -> Dict[str, Any]:
    return {
        "feasible": report.feasible,
        "is_mefe": report.is_mefe,
        "threshold": format_rational(report.threshold),
        "avg_utils": {x: format_rational(a) for x, a in report.avg_utils.items()},
        "envy_pairs": [list(p) for p in report.envy_pairs],
        "violations": [
            {k: v for k, v in vars(viol).items() if v not in (None, "")}
            for viol in report.violations
        ],
    }


def _default(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_default) + "\n"


def load_instance(path: str, allow_short: bool = False) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInstance(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(data, allow_short)


def load_matching(path: str) -> Matching:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedMatching(f"{path}: not valid JSON ({exc})") from None
    return matching_from_dict(data)
