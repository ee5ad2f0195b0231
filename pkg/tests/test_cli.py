import json
import subprocess
import sys

import pytest

from equivcheck.cli import main


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return str(p)


SMALL = {
    "version": 1,
    "seed": 3,
    "families": {"pn": {"kind": "pointnet", "n": 3}, "c1": {"kind": "conv", "n": 3, "k": 1}},
    "targets": {"p": {"builder": "power_of_sum", "n": 3, "degree": 3},
                "q": {"n": 3, "terms": [["1/2", [2, 0, 0]], ["1/2", [0, 2, 0]], ["1/2", [0, 0, 2]]]}},
    "analyses": [
        {"type": "membership", "target": "p", "family": "c1"},
        {"type": "membership", "target": "q", "family": "pn"},
        {"type": "separation", "family": "pn", "pairs": [[[1, 2, 3], [3, 2, 1]], [["1/2", 0, 0], [0, 0, 1]]],
         "random": 10},
        {"type": "fit", "target": "p", "family": "pn", "widths": [8, 16], "activation": "sigmoid"},
    ],
}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_homdim_examples(capsys):
    assert run(["homdim", "symmetric:4", "natural", "natural"], capsys)[:2] == (0, "2\n")
    assert run(["homdim", "cyclic:6", "natural", "natural"], capsys)[:2] == (0, "6\n")
    code, out, _ = run(["homdim", "symmetric:3", "natural", "regular", "--format", "json"], capsys)
    assert json.loads(out)["dimension"] == 3


def test_certify_normal(capsys):
    code, out, _ = run(["certify-normal", "symmetric:5", "alternating"], capsys)
    assert code == 0 and "granted" in out
    code, out, _ = run(["certify-normal", "symmetric:3", "[[1, 0, 2]]", "--format", "json"], capsys)
    res = json.loads(out)["results"][0]
    assert code == 0 and res["granted"] is False and res["failed_check"] == "normality"


def test_bundled_config_verdicts(tmp_path):
    assert main(["analyze", "strict_inclusions", "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    status = {(r["target"], r["family"]): r["status"]
              for r in report["results"] if r["type"] == "membership"}
    for n in (3, 4, 5):
        assert status[(f"power_sum_{n}", f"c1_{n}")] == "NonMember"
        assert status[(f"power_sum_{n}", f"pointnet_{n}")] == "Member"
    for n in (4, 5):
        assert status[(f"product_{n}", f"pointnet_{n}")] == "NonMember"
    for r in report["results"]:
        if r["type"] == "membership":
            assert set(r) >= {"target", "family", "status", "witness", "degrees_checked"}
            assert "timings" not in r
    assert (tmp_path / "report.txt").read_text().startswith("# strict_inclusions")


def test_reports_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["analyze", cfg, "--out-dir", str(a)]) == 0
    assert main(["analyze", "--config", cfg, "--out-dir", str(b), "--threads", "3"]) == 0
    for name in ("report.json", "report.txt", "fit.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_threads_env_fallback(tmp_path, monkeypatch, capsys):
    cfg = write_cfg(tmp_path, SMALL)
    monkeypatch.setenv("EQUIVCHECK_THREADS", "2")
    code, out2, _ = run(["analyze", cfg, "--format", "json"], capsys)
    monkeypatch.setenv("EQUIVCHECK_THREADS", "1")
    _, out1, _ = run(["analyze", cfg, "--format", "json"], capsys)
    assert code == 0 and out1 == out2
    monkeypatch.setenv("EQUIVCHECK_THREADS", "many")
    assert run(["analyze", cfg], capsys)[0] == 2


def test_seed_override_changes_fit_only(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL)
    _, a, _ = run(["fit", cfg, "--format", "csv"], capsys)
    _, b, _ = run(["fit", cfg, "--format", "csv", "--seed", "4"], capsys)
    assert a.splitlines()[0] == "width,train_rms,test_rms,test_max,seed"
    assert a != b and b.splitlines()[1].endswith(",4")


def test_separation_subcommand(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL)
    code, out, _ = run(["separation", cfg, "--format", "json"], capsys)
    res = json.loads(out)["results"]
    assert code == 0 and [r["type"] for r in res] == ["separation"]
    assert res[0]["pairs"] == 12 and res[0]["orbit_implies_separation"]
    assert res[0]["results"][0]["separation_equivalent"] is True
    assert res[0]["results"][1]["separation_equivalent"] is False


def test_empty_analyses(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"version": 1, "analyses": []})
    code, out, _ = run(["analyze", cfg, "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["results"] == []


@pytest.mark.parametrize("bad", [
    "{not json",
    {"analyses": []},
    {"version": 2},
    {"version": 1, "analyses": [{"type": "membership", "target": "p", "family": "nope"}],
     "targets": {"p": {"builder": "power_of_sum", "n": 3, "degree": 3}}},
    {"version": 1, "targets": {"p": {"n": 2, "terms": [[0.5, [1, 1]]]}}},
    {"version": 1, "families": {"f": {"kind": "custom", "group": {"kind": "symmetric", "n": 2},
                                      "matrices": [[[0, 1], [0, 0]]]}}},
    {"version": 1, "analyses": [{"type": "bogus"}]},
])
def test_config_errors_exit_2(tmp_path, capsys, bad):
    cfg = write_cfg(tmp_path, bad)
    code, _, err = run(["analyze", cfg], capsys)
    assert code == 2 and "config error" in err


def test_missing_config_exit_2(capsys):
    assert run(["analyze", "/no/such/file.json"], capsys)[0] == 2


def test_analysis_error_exit_3_with_partial_report(tmp_path, capsys):
    cfg = dict(SMALL)
    cfg["targets"] = dict(SMALL["targets"], x1={"n": 3, "terms": [[1, [1, 0, 0]]]})
    cfg["analyses"] = [SMALL["analyses"][0], {"type": "membership", "target": "x1", "family": "pn"}]
    path = write_cfg(tmp_path, cfg)
    out_dir = tmp_path / "out"
    code, _, err = run(["analyze", path, "--out-dir", str(out_dir)], capsys)
    assert code == 3 and "NotInvariant" in err
    report = json.loads((out_dir / "report.json").read_text())
    assert report["results"][0]["status"] == "NonMember"
    assert "error" in report["results"][1]


def test_timings_opt_in(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"version": 1, "targets": SMALL["targets"], "families": SMALL["families"],
                               "analyses": [SMALL["analyses"][0]]})
    _, out, _ = run(["analyze", cfg, "--format", "json", "--timings"], capsys)
    assert "seconds" in json.loads(out)["results"][0]["timings"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "equivcheck", "homdim", "cyclic:6", "natural", "natural"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "6\n"
