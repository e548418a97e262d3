import json

import numpy as np
import pytest

from framekit.core import ToleranceConfig, fixture, random_frame
from framekit.duals import canonical_dual
from framekit.errors import IoError, NotAFrame, ParseError
from framekit.io import (
    Report,
    canonical_json,
    frame_to_dict,
    inputs_digest,
    parse_frame_file,
    parse_pair_file,
    read_coefficient_csv,
    write_coefficient_csv,
    write_frame_file,
    write_pair_file,
    write_report,
)


def dump(tmp_path, obj, name="f.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return p


def test_parse_fixture(tmp_path, E2):
    p = dump(tmp_path, {"dim": 2, "field": "real", "vectors": [[1, 0], [0, 1]]})
    assert parse_frame_file(p) == E2


def test_parse_complex_pairs(tmp_path):
    p = dump(tmp_path, {"dim": 1, "vectors": [[[0.5, -2.0]]], "tol": {"rank_tol": 1e-9, "eq_tol": 1e-7}})
    F = parse_frame_file(p)
    assert F.matrix[0, 0] == 0.5 - 2j
    assert F.tol == ToleranceConfig(1e-9, 1e-7)


def test_parse_dim_mismatch_names_vector(tmp_path):
    p = dump(tmp_path, {"dim": 2, "vectors": [[1, 0], [0, 1], [1, 2, 3]]})
    with pytest.raises(ParseError) as exc:
        parse_frame_file(p)
    assert exc.value.field == "vectors[2]"
    assert "vector 2" in str(exc.value)


def test_parse_rank_deficient(tmp_path):
    with pytest.raises(NotAFrame):
        parse_frame_file(dump(tmp_path, {"dim": 2, "vectors": [[1, 0], [2, 0]]}))


@pytest.mark.parametrize("text", ['{"dim": 1, "vectors": [[NaN]]}', '{"dim": 1, "vectors": [[[1, Infinity]]]}'])
def test_parse_rejects_nonfinite(tmp_path, text):
    with pytest.raises(ParseError):
        parse_frame_file(dump(tmp_path, text))


@pytest.mark.parametrize(
    "obj",
    [
        [],
        {"vectors": [[1]]},
        {"dim": 0, "vectors": [[1]]},
        {"dim": 1, "vectors": []},
        {"dim": 1, "vectors": [["a"]]},
        {"dim": 1, "vectors": [[[1, 2, 3]]]},
        {"dim": 1, "field": "quaternion", "vectors": [[1]]},
        {"dim": 1, "field": "real", "vectors": [[[1, 1]]]},
        {"dim": 1, "vectors": [[1]], "tol": {"rank_tol": -1}},
        {"dim": 1, "vectors": [[True]]},
    ],
)
def test_parse_errors(tmp_path, obj):
    with pytest.raises(ParseError):
        parse_frame_file(dump(tmp_path, obj))


def test_parse_syntax_error_line(tmp_path):
    with pytest.raises(ParseError) as exc:
        parse_frame_file(dump(tmp_path, '{"dim": 2,\n "vectors": [\n oops]}'))
    assert exc.value.line == 3


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        parse_frame_file(tmp_path / "missing.json")


def test_round_trip(tmp_path):
    for seed in range(20):
        F = random_frame(3, 5, seed=seed, field="real" if seed % 2 else "complex")
        write_frame_file(F, tmp_path / "f.json")
        assert parse_frame_file(tmp_path / "f.json") == F


def test_real_frames_use_bare_floats(U3):
    d = frame_to_dict(U3)
    assert d["field"] == "real" and d["vectors"][2] == [1.0, 1.0]


def test_pair_round_trip(tmp_path, U3_pair):
    write_pair_file(U3_pair, tmp_path / "p.json")
    assert parse_pair_file(tmp_path / "p.json") == U3_pair


def test_pair_from_frame(tmp_path, U3, U3_pair):
    write_frame_file(U3, tmp_path / "u.json")
    assert parse_pair_file(tmp_path / "u.json") == U3_pair


def test_pair_not_dual(tmp_path, U3):
    d = {"primary": frame_to_dict(U3), "dual": frame_to_dict(U3)}
    with pytest.raises(ParseError):
        parse_pair_file(dump(tmp_path, d))


def test_csv_round_trip(tmp_path):
    a = np.array([1 + 2j, np.nan, -0.25])
    b = np.array([0.1, 0.2, 0.3 - 1e-300j])
    write_coefficient_csv(tmp_path / "c.csv", {"x": a, "y": b})
    got = read_coefficient_csv(tmp_path / "c.csv", 3)
    assert list(got) == ["x", "y"]
    np.testing.assert_array_equal(got["y"], b)
    assert np.isnan(got["x"][1]) and got["x"][0] == a[0]


def test_csv_errors(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("s,1,1.0\n")
    with pytest.raises(ParseError):
        read_coefficient_csv(p)
    p.write_text("s,4,1,0\n")
    with pytest.raises(ParseError):
        read_coefficient_csv(p, 3)
    p.write_text("s,1,1,0\ns,1,2,0\n")
    with pytest.raises(ParseError):
        read_coefficient_csv(p)


def test_canonical_json_complex_and_sorted():
    text = canonical_json({"b": 1 + 2j, "a": np.float64(0.1), "c": {}})
    assert json.loads(text) == {"a": 0.1, "b": [1.0, 2.0], "c": {}}
    assert text.index('"a"') < text.index('"b"')


def test_write_report(tmp_path):
    r = Report("mrc", "abc", {}, {"total_ms": 1.0})
    write_report(r, tmp_path / "r.json")
    d = json.loads((tmp_path / "r.json").read_text())
    assert d["verdicts"] == {} and d["command"] == "mrc"
    r2 = Report("mrc", "abc", {}, {"total_ms": 2.0})
    assert r.verdict_json() == r2.verdict_json()


def test_inputs_digest(tmp_path):
    (tmp_path / "a").write_text("x")
    (tmp_path / "b").write_text("y")
    d1 = inputs_digest([tmp_path / "a", tmp_path / "b"])
    assert d1 != inputs_digest([tmp_path / "b", tmp_path / "a"])
    assert d1 == inputs_digest([tmp_path / "a", tmp_path / "b"])
