import json

import pytest

from conftest import trio_instance
from mefe import io as mio
from mefe.core import InvalidInstance, MalformedMatching, Matching


def test_instance_round_trip(trio):
    data = mio.instance_to_dict(trio)
    assert data["k"] == "7/1"
    assert data["tas"][0]["grades"]["c1"] == "9/1"
    assert mio.instance_from_dict(json.loads(mio.dumps(data))) == trio


def test_integer_rationals_accepted():
    inst = mio.instance_from_dict(
        {"k": 1, "courses": [{"id": "x", "capacity": 1, "valuations": {"a": 2}}],
         "tas": [{"id": "a", "utilities": {"x": 1}, "grades": {"x": 3}}]}
    )
    assert inst.grade("a", "x") == 3


def test_bad_rational():
    with pytest.raises(InvalidInstance):
        mio.instance_from_dict({"k": "7/0", "courses": [], "tas": []})


def test_missing_fields():
    with pytest.raises(InvalidInstance):
        mio.instance_from_dict({"courses": [{"capacity": 1}]})


def test_matching_round_trip(trio):
    mu = Matching({"t1": "c1", "t2": None})
    data = mio.matching_to_dict(mu, trio)
    assert data == {"assignment": {"t1": "c1", "t2": None, "t3": None}}
    assert mio.matching_from_dict(data) == mu


def test_matching_bad_shape():
    with pytest.raises(MalformedMatching):
        mio.matching_from_dict({"assignment": {"t1": 3}})
    with pytest.raises(MalformedMatching):
        mio.matching_from_dict([])


def test_dumps_is_canonical(trio):
    assert mio.dumps(mio.instance_to_dict(trio)) == mio.dumps(mio.instance_to_dict(trio_instance()))
