import json
import math

import pytest

from dirac_entropy.cli import ExperimentConfig, dumps, main, table_csv

LN43 = math.log(4 / 3)


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_formula_two_intervals(capsys):
    code, out, _ = _run(capsys, "formula", "--i1", "0,1", "--i2", "2,3")
    rec = json.loads(out)
    assert code == 0
    assert rec["value"] == pytest.approx(LN43 / 6, rel=1e-14)
    assert rec["formula_id"] == "two_interval" and rec["provenance"]


def test_formula_sets(capsys):
    code, out, _ = _run(capsys, "formula", "--sets", "0,1|2,3", "--f", "halpha:2")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(LN43 / 8, rel=1e-14)


def test_output_is_deterministic(capsys):
    args = ("formula", "--sets", "0,1;6,7|3,4", "--f", "halpha:0.5")
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args)
    assert a == b
    assert list(json.loads(a)) == sorted(json.loads(a))


@pytest.mark.parametrize("argv,code,cls", [
    (["formula", "--i1", "0;1", "--i2", "2,3"], 2, "GEOMETRY"),
    (["formula", "--i1", "0,2", "--i2", "1,3"], 2, "GEOMETRY"),
    (["formula", "--i1", "0,1", "--i2", "2,3", "--f", "cosh:2"], 2, None),
    (["spectrum", "--set", "0,1", "--k", "1e6"], 3, "RESOURCE"),
    (["suite", "--only", "no-such-criterion"], 2, "ARGUMENT"),
    (["formula", "--bogus"], 2, "ARGUMENT"),
])
def test_error_exit_codes(capsys, argv, code, cls):
    got, out, err = _run(capsys, *argv)
    assert got == code and out == ""
    rec = json.loads(err.strip().splitlines()[-1])
    assert rec["exit_code"] == code and rec["message"]
    if cls:
        assert rec["error_class"] == cls


def test_spectrum_csv(capsys, tmp_path):
    code, out, _ = _run(capsys, "spectrum", "--set", "0,1", "--k", "40")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# dirac-entropy/spectrum v1")
    assert lines[1] == "index,eigenvalue"
    vals = [float(r.split(",")[1]) for r in lines[2:]]
    assert sum(vals) == pytest.approx(20 / math.pi, abs=1e-9)


def test_herglotz_table(capsys):
    code, out, _ = _run(capsys, "herglotz", "--alpha", "0.5,1", "--t", "0.5,0.9")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "# dirac-entropy/herglotz v1"
    assert len(lines) == 2 + 4


def test_config_roundtrip_and_run(capsys, tmp_path):
    _, dumped, _ = _run(capsys, "--dump-config", "polytrace", "--i1", "0,1", "--i2", "2,3", "--m", "3")
    cfg = ExperimentConfig.from_text(dumped)
    assert cfg.command == "polytrace" and cfg.options["m"] == "3"
    path = tmp_path / "exp.cfg"
    path.write_text("# three letters\n" + dumped)
    _, direct, _ = _run(capsys, "polytrace", "--i1", "0,1", "--i2", "2,3", "--m", "3")
    code, via_run, _ = _run(capsys, "run", str(path))
    assert code == 0 and via_run == direct
    code, via_cfg, _ = _run(capsys, "--config", str(path), "polytrace")
    assert code == 0 and via_cfg == direct
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("command = polytrace\nnodez = 3\n")
    code, _, err = _run(capsys, "run", str(bad))
    assert code == 2 and "nodez" in err
    wrong = tmp_path / "wrong.cfg"
    wrong.write_text("command = formula\n")
    assert _run(capsys, "--config", str(wrong), "polytrace", "--i1", "0,1", "--i2", "2,3")[0] == 2
    assert "closed-only" in ExperimentConfig("intersect", {"closed-only": True}).to_text()


def test_suite_subset(capsys):
    code, out, _ = _run(capsys, "suite", "--only", "U-closed,2")
    assert code == 0
    assert [ln.split()[1] for ln in out.splitlines()] == ["U-closed", "U-monomial"]
    assert all(ln.startswith("[PASS]") for ln in out.splitlines())
    code, out, _ = _run(capsys, "suite", "--only", "HS-closed", "--format", "json")
    rec = json.loads(out)
    assert code == 0 and rec["failed"] == [] and rec["results"][0]["passed"]


def test_suite_failure_exit(capsys, monkeypatch):
    from dirac_entropy import suite
    import dataclasses
    forced = dataclasses.replace(suite.BY_ID["U-closed"], func=lambda: (False, {"forced": True}))
    monkeypatch.setitem(suite.BY_ID, "U-closed", forced)
    code, out, err = _run(capsys, "suite", "--only", "U-closed")
    assert code == 1 and "[FAIL] U-closed" in out and "U-closed" in err


def test_mutualinfo_small_and_translation(capsys):
    base = ["mutualinfo", "--kmin", "30", "--kmax", "40", "--samples", "3", "--format", "csv"]
    _, a, err = _run(capsys, *base, "--i1", "0,1", "--i2", "2,3")
    _, b, _ = _run(capsys, *base, "--i1", "7,8", "--i2", "9,10")
    ra = [float(r.split(",")[1]) for r in a.splitlines()[2:]]
    rb = [float(r.split(",")[1]) for r in b.splitlines()[2:]]
    assert len(ra) == 3 and max(abs(x - y) for x, y in zip(ra, rb)) < 1e-9
    assert "target" in err


def test_mutualinfo_single_sample_warns(capsys):
    code, out, err = _run(capsys, "mutualinfo", "--i1", "0,1", "--i2", "2,3",
                          "--kmin", "30", "--kmax", "30", "--samples", "1")
    assert code == 0 and "warning" in err
    assert json.loads(out)["estimate"]["error_bar"] == 0.0


def test_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("DIRAC_ENTROPY_THREADS", "1")
    assert _run(capsys, "schatten", "--i1", "0,1", "--i2", "2,3", "--nodes", "16")[0] == 0
    monkeypatch.setenv("DIRAC_ENTROPY_THREADS", "zero")
    assert _run(capsys, "schatten", "--i1", "0,1", "--i2", "2,3")[0] == 2


def test_other_commands(capsys):
    for argv in (["ucoef", "--f", "monomial:3"], ["polytrace", "--i1", "0,1", "--i2", "2,3"],
                 ["intersect", "--i1", "0,2", "--i2", "1,3", "--closed-only"],
                 ["asymptotics"], ["widom", "--i1", "0,1", "--i2", "2,3", "--eps", "0.1"]):
        code, out, _ = _run(capsys, *argv)
        assert code == 0, argv
        json.loads(out)


def test_helpers():
    assert dumps({"b": float("inf"), "a": 1}) == '{\n  "a": 1,\n  "b": "inf"\n}'
    assert table_csv("x", ["a"], [[0.1]]) == "# dirac-entropy/x v1\na\n0.1\n"
