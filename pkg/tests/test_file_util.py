# -*- coding: utf-8 -*-
import json
import math

import numpy as np
import pytest

from tools.cloud import WeightedCloud
from tools.errors import InputError, ParseError
from tools.file_util import dumps, read_cloud, read_json, write_cloud, write_json


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        read_cloud(str(tmp_path / "nope.csv"))
    with pytest.raises(ParseError):
        read_json(str(tmp_path / "nope.json"))


def test_unknown_extension(tmp_path):
    p = tmp_path / "cloud.txt"
    p.write_text("0,0\n")
    with pytest.raises(ParseError):
        read_cloud(str(p))


def test_csv_with_header_and_weights(tmp_path):
    p = tmp_path / "cloud.csv"
    p.write_text("x1,x2,w\n0,0,0.5\n1,0,1.5\n")
    c = read_cloud(str(p), k=1)
    assert len(c) == 2
    assert c.weights.tolist() == [0.5, 1.5]


def test_csv_without_weights_uses_mass_hint(tmp_path):
    p = tmp_path / "cloud.csv"
    p.write_text("0,0\n1,0\n2,0\n3,0\n")
    c = read_cloud(str(p), k=1, total_mass_hint=2.0)
    assert c.total_mass == pytest.approx(2.0)
    assert np.allclose(c.weights, 0.5)


def test_csv_reports_row_of_bad_value(tmp_path):
    p = tmp_path / "cloud.csv"
    p.write_text("x1,x2\n0,0\n1,abc\n")
    with pytest.raises(ParseError) as e:
        read_cloud(str(p), k=1)
    assert e.value.row == 3


def test_csv_ragged_rows(tmp_path):
    p = tmp_path / "cloud.csv"
    p.write_text("0,0\n1,0,3\n")
    with pytest.raises(ParseError) as e:
        read_cloud(str(p), k=1)
    assert e.value.row == 2


def test_csv_nonpositive_weight(tmp_path):
    p = tmp_path / "cloud.csv"
    p.write_text("x,y,weight\n0,0,1\n1,0,-2\n")
    with pytest.raises(ParseError):
        read_cloud(str(p), k=1)


def test_json_cloud_keeps_k_and_boundary(tmp_path):
    p = tmp_path / "cloud.json"
    p.write_text(json.dumps({"points": [[0, 0, 0], [1, 0, 0]], "k": 2, "boundary_distance": [0.5, 0.25]}))
    c = read_cloud(str(p))
    assert c.k == 2
    assert c.boundary_distance.tolist() == [0.5, 0.25]


def test_json_syntax_error_has_line(tmp_path):
    p = tmp_path / "cloud.json"
    p.write_text('{\n"points": [[0, 0],\n}')
    with pytest.raises(ParseError) as e:
        read_cloud(str(p))
    assert e.value.row is not None


def test_dimension_mismatch_is_input_error(tmp_path):
    p = tmp_path / "cloud.csv"
    p.write_text("0,0\n1,0\n")
    with pytest.raises(InputError):
        read_cloud(str(p), k=2)


def test_write_then_read_csv(tmp_path, circle_cloud):
    p = tmp_path / "circle.csv"
    write_cloud(str(p), circle_cloud)
    back = read_cloud(str(p), k=1)
    assert np.array_equal(back.points, circle_cloud.points)
    assert np.array_equal(back.weights, circle_cloud.weights)


def test_dumps_is_sorted_and_nulls_non_finite():
    text = dumps({"b": math.inf, "a": np.float64(1.5), "c": [np.nan, np.int64(2)], "d": np.bool_(True)})
    assert json.loads(text) == {"a": 1.5, "b": None, "c": [None, 2], "d": True}
    assert text.index('"a"') < text.index('"b"')


def test_write_json_is_byte_stable(tmp_path):
    payload = {"z": [1.0, 2.0], "a": {"y": 1, "x": 2}}
    p1, p2 = tmp_path / "a.json", tmp_path / "sub" / "b.json"
    write_json(str(p1), payload)
    write_json(str(p2), dict(reversed(list(payload.items()))))
    assert p1.read_bytes() == p2.read_bytes()
