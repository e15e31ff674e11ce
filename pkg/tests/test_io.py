import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablab.io import csv_text, dumps, fmt_float, write_json


@given(x=st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_float_round_trips(x):
    assert float(fmt_float(x)) == x


def test_fmt_float_examples():
    assert fmt_float(1.0) == "1.0"
    assert fmt_float(0.1) == "0.10000000000000001"
    with pytest.raises(ValueError):
        fmt_float(float("nan"))


def test_dumps_types():
    obj = {"a": np.float64(0.5), "b": np.int64(3), "c": [True, None], "d": np.array([1.0, 2.0]),
           "e": float("inf"), "f": np.bool_(False)}
    text = dumps(obj)
    assert json.loads(text) == {"a": 0.5, "b": 3, "c": [True, None], "d": [1.0, 2.0], "e": None, "f": False}
    assert json.loads(dumps(obj, indent=2)) == json.loads(text)
    with pytest.raises(TypeError):
        dumps({"x": object()})


def test_write_json_is_byte_stable(tmp_path):
    obj = {"x": [0.1, 0.2, 1 / 3], "y": {"z": 1e-20}}
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_json(a, obj)
    write_json(b, json.loads(a.read_text()))
    assert a.read_bytes() == b.read_bytes()


def test_csv_text():
    assert csv_text(["n", "x0"], [[0, 0.5], [1, 1 / 3]]) == "n,x0\n0,0.5\n1,0.33333333333333331\n"
