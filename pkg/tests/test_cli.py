import json
import subprocess
import sys

import numpy as np
import pytest

from framekit.cli import main, run_command


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in ("E2", "M3", "U3"):
        p = tmp_path / f"{name}.json"
        assert main(["gen", "--fixture", name, "--out", str(p)]) == 0
        out[name] = str(p)
    out["dir"] = tmp_path
    return out


def verdicts(argv, capsys, code=0):
    rc, report = run_command(argv)
    assert rc == code
    capsys.readouterr()
    return report.to_dict()["verdicts"] if report else None


def test_mrc_negative_verdict(files, capsys):
    v = verdicts(["mrc", "--frame", files["E2"], "--erase", "1"], capsys)
    assert v["satisfied"] is False and v["erased"] == [1]


def test_mrc_sweep_and_dual(files, capsys):
    v = verdicts(["mrc", "--frame", files["U3"], "--size", "2"], capsys)
    assert [s["erased"] for s in v["sweep"]] == [[1, 2], [1, 3], [2, 3]]
    v = verdicts(["mrc", "--frame", files["M3"], "--erase", "1", "--dual"], capsys)
    assert v["satisfied"] is True


def test_bridge_u3(files, capsys):
    v = verdicts(["bridge", "--pair", files["U3"], "--erase", "3"], capsys)
    assert v["delta"] == [1]
    assert v["coefficients"][0][0][0] == pytest.approx(2)


def test_bridge_no_bridge_is_verdict(files, capsys):
    v = verdicts(["bridge", "--pair", files["E2"], "--erase", "2"], capsys)
    assert v["bridge_exists"] is False


def test_bridge_recovers_csv(files, capsys):
    csv = files["dir"] / "c.csv"
    # <f, g_i> for f = (1, 2) and the canonical dual of U3, third entry lost
    csv.write_text("signal_id,index,re,im\ns,1,0,0\ns,2,1,0\n")
    v = verdicts(["bridge", "--pair", files["U3"], "--erase", "3", "--coeffs", str(csv)], capsys)
    np.testing.assert_allclose(np.array(v["recovered"]["s"])[:, 0], [1, 2], atol=1e-12)


def test_missing_file_exit_2(files, capsys):
    assert main(["mrc", "--frame", str(files["dir"] / "missing.json"), "--erase", "1"]) == 2


def test_usage_exit_1(files, capsys):
    assert main([]) == 1
    assert main(["mrc", "--frame", files["E2"], "--erase", "zero"]) == 1
    assert main(["nope"]) == 1
    assert main(["simulate", "--pair", files["M3"], "--signals", "x", "--model", "gauss"]) in (1, 2)


def test_input_error_exit_2(files, capsys):
    assert main(["mrc", "--frame", files["E2"], "--erase", "5"]) == 2
    bad = files["dir"] / "bad.json"
    bad.write_text('{"dim": 2, "vectors": [[1, 0], [2, 0]]}')
    assert main(["analyze", "--frame", str(bad)]) == 2


def test_robustness_and_gamma(files, capsys):
    v = verdicts(["robustness", "--frame", files["U3"], "--m", "2"], capsys)
    assert v["robust"] is False and v["failing_subset"] == [1, 2]
    v = verdicts(["gamma", "--frame", files["M3"], "--m", "1"], capsys)
    assert v["range_equals_null"]["equal"] and v["columns"]["independent"]
    np.testing.assert_allclose(np.array(v["gamma"])[0, :, 0], [1, 1, 1], atol=1e-12)
    v = verdicts(["excess", "--frame", files["M3"]], capsys)
    assert v == {"sup_excess": 1, "uniform_excess": 1}


def test_analyze(files, capsys):
    v = verdicts(["analyze", "--frame", files["U3"]], capsys)
    assert v["frame_bounds"]["lower"] == pytest.approx(1)
    assert v["spark"] == 3 and v["tight"] is False


def test_dual_writes_pair(files, capsys):
    out = files["dir"] / "pair.json"
    v = verdicts(["dual", "--frame", files["U3"], "--perturb", "--seed", "1", "--pair-out", str(out)], capsys)
    assert v["is_dual"]
    assert "primary" in json.loads(out.read_text())


def test_dilate_and_certify(files, capsys, tmp_path):
    out = tmp_path / "dil.json"
    assert main(["dilate", "--frame", files["M3"], "--out", str(out)]) == 0
    v = json.loads(out.read_text())["verdicts"]
    assert v["big_dim"] == 3 and {"P", "onb", "embedding"} <= set(v)
    v = verdicts(["certify-1-erasure", "--frame", files["E2"]], capsys)
    assert v["present"] is False and v["robust_1_erasure"] is False
    v = verdicts(["certify-1-erasure", "--frame", files["U3"]], capsys)
    assert v["present"] and v["complement_witness"]


def test_simulate_deterministic(files, capsys, tmp_path):
    sig = tmp_path / "s.csv"
    rows = ["signal_id,index,re,im"]
    rng = np.random.default_rng(0)
    for k in range(20):
        for i, x in enumerate(rng.standard_normal(2), start=1):
            rows.append(f"sig{k},{i},{float(x)!r},0.0")
    sig.write_text("\n".join(rows) + "\n")
    argv = ["simulate", "--pair", files["M3"], "--signals", str(sig), "--model", "random:0.3", "--seed", "9"]
    a = verdicts(argv, capsys)
    b = verdicts(argv, capsys)
    assert a == b and a["summary"]["signals"] == 20
    v = verdicts(argv[:-4] + ["--model", "burst:1:1"], capsys)
    assert all(r["erased"] == [1] and r["status"] == "recovered" for r in v["records"])


def test_seed_env_override(files, capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("FRAMEKIT_SEED", "4")
    main(["gen", "--dim", "2", "--count", "3", "--seed", "1", "--out", str(tmp_path / "a.json")])
    monkeypatch.delenv("FRAMEKIT_SEED")
    main(["gen", "--dim", "2", "--count", "3", "--seed", "4", "--out", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


def test_report_fields(files, capsys):
    rc, report = run_command(["excess", "--frame", files["E2"]])
    d = report.to_dict()
    assert set(d) == {"command", "inputs_digest", "verdicts", "timings"}
    assert d["command"] == "excess" and len(d["inputs_digest"]) == 64


def test_verify_all_subset(capsys):
    v = verdicts(["verify-all", "--only", "round-trip,gamma-nullspace", "--quiet"], capsys)
    assert v["all_passed"] and set(v["suites"]) == {"round-trip", "gamma-nullspace"}
    assert main(["verify-all", "--only", "bogus"]) == 1


def test_console_script(files):
    out = subprocess.run(
        [sys.executable, "-m", "framekit.cli", "mrc", "--frame", files["M3"], "--erase", "1"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["verdicts"]["satisfied"] is True
