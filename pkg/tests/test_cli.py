import csv
import json
import subprocess
import sys

import pytest

from fredpair.cli import main

Z3 = [{"degree": 3, "matrix": [[1, 0]]}]


def run(tmp_path, name, cfg, *flags):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / name
    code = main([cfg["kind"], "--config", str(path), "--out", str(out), *flags])
    report = out / "report.json"
    return code, (json.loads(report.read_text()) if report.exists() else None)


def test_symbol_index_report(tmp_path):
    code, rep = run(tmp_path, "z3", {"kind": "symbol-index", "payload": {"symbol": Z3},
                                     "window": 16}, "--csv")
    assert code == 0
    assert rep["result"]["index"] == 3 and rep["result"]["stabilized"] is True
    assert rep["config"] == {"kind": "symbol-index", "payload": {"symbol": Z3}, "window": 16,
                             "tol": 1e-8, "backend": "float", "seed": 0}
    with (tmp_path / "z3" / "winding.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["theta", "re_det", "im_det", "unwrapped_phase"]
    assert len(rows) == 1026


def test_chain_report(tmp_path):
    code, rep = run(tmp_path, "cp1", {"kind": "chain", "payload": {"preset": "cp1"},
                                      "window": 12})
    assert code == 0 and rep["result"]["total"] == 1


def test_calibrated_chain(tmp_path):
    cfg = {"kind": "chain", "payload": {"preset": "cp1", "cuts": [1, -2], "calibrated": True},
           "window": 12}
    code, rep = run(tmp_path, "cal", cfg)
    assert code == 0 and rep["result"]["total"] == 1
    assert rep["result"]["calibration"] == {"sign": -1, "a": 1, "b": 1}


@pytest.mark.parametrize("cfg", [
    {"kind": "chain", "payload": {"preset": "cp1"}, "colour": 1},
    {"kind": "chain", "payload": {"preset": "cp1", "extra": 2}},
    {"kind": "chain", "payload": {}},
    {"kind": "chain", "payload": {"preset": "cp1"}, "window": -3},
    {"kind": "pair", "payload": {"ambient": 2, "u": [[1, 0, 0]], "v": []}},
])
def test_malformed_config_exits_one_without_report(tmp_path, cfg):
    code, rep = run(tmp_path, "bad", cfg)
    assert code == 1 and rep is None


def test_kind_mismatch(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"kind": "pair"}))
    assert main(["chain", "--config", str(path)]) == 1


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_reports_are_deterministic_and_round_trip(tmp_path):
    cfg = {"kind": "surface", "payload": {"domain": {"kind": "bounded", "circles": [
        {"center": [0, 0], "radius": 2, "role": "outgoing", "cut": 1},
        {"center": [-0.8, 0], "radius": 0.3, "role": "incoming", "cut": 0},
        {"center": [0.8, 0], "radius": 0.3, "role": "incoming", "cut": 0}]}}, "window": 16}
    _, a = run(tmp_path, "a", cfg)
    _, b = run(tmp_path, "b", cfg)
    _, c = run(tmp_path, "c", a["config"])
    for r in (a, b, c):
        r.pop("timestamp")
    assert a == b == c
    assert a["result"]["computed"] == a["result"]["predicted"] == 1


def test_pair_rational(tmp_path):
    cfg = {"kind": "pair", "backend": "rational", "payload": {
        "ambient": 3, "u": [[1, 0, 0], [0, 1, 0]], "v": [[0, 1, 0], ["1/2", 0, [1, 1]]]}}
    code, rep = run(tmp_path, "p", cfg)
    assert code == 0
    assert (rep["result"]["alpha"], rep["result"]["beta"]) == (1, 0)


def test_bordism_domain_and_graph(tmp_path):
    cfg = {"kind": "bordism", "payload": {"domain": {"kind": "exterior", "circles": [
        {"center": [0, 0], "radius": 1, "role": "outgoing", "cut": 0}]}}, "window": 8}
    code, rep = run(tmp_path, "cap", cfg)
    assert code == 0 and rep["result"]["pair"]["index"] == 1
    cfg = {"kind": "bordism", "payload": {"symbol": Z3}, "window": 12}
    code, rep = run(tmp_path, "graph", cfg)
    assert code == 0 and rep["result"]["graph_pair_index"] == 3


def test_route_disagreement_exits_two(tmp_path):
    cfg = {"kind": "symbol-index", "payload": {"symbol": Z3}, "window": 16}
    code, rep = run(tmp_path, "sab", cfg, "--tol", "1")
    assert code == 2
    assert rep["status"] in ("route disagreement", "rank-gap failure")


def test_verify_subset(tmp_path, capsys):
    assert main(["verify", "--only", "5,7,8", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["result"]["passed"] == 3


def test_verify_sabotage_exits_two(capsys):
    assert main(["verify", "--only", "7", "--tol", "1"]) == 2
    assert "rank-gap failure" in capsys.readouterr().out


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("FREDPAIR_THREADS", "many")
    assert main(["chain", "--window", "8"]) == 1


def test_threads_do_not_change_results(tmp_path, monkeypatch):
    monkeypatch.setenv("FREDPAIR_THREADS", "3")
    assert main(["verify", "--only", "9", "--out", str(tmp_path)]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fredpair", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.1.0"
