import json
import math

import pytest

from symcone.cli import main


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_capacity_hyperboloid_stdout(capsys):
    code, out, err = run_cli(capsys, ["capacity", "--hyperboloid",
                                      "--a", "1.0", "--b", "1.0"])
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert set(doc) == {"config", "version", "result"}
    assert doc["result"]["exact"] is True
    assert doc["result"]["lo"] == "3.1415926535897931"
    assert doc["result"]["hi"] == doc["result"]["lo"]
    assert doc["config"]["command"] == "capacity"


def test_capacity_needs_an_input(capsys):
    code, out, err = run_cli(capsys, ["capacity"])
    assert code == 2
    assert "symcone:" in err


def test_invalid_geometry_is_exit_2(capsys):
    code, _, err = run_cli(capsys, ["capacity", "--hyperboloid", "--a", "-1"])
    assert code == 2 and "symcone:" in err
    code, _, err = run_cli(capsys, ["capacity", "--hyperboloid",
                                    "--k", "2", "--n", "2"])
    assert code == 2  # no capacity at full index


def test_unknown_config_key_is_exit_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"bogus": 1}', encoding="utf-8")
    code, _, err = run_cli(capsys, ["capacity", "--hyperboloid",
                                    "--config", str(cfg)])
    assert code == 2 and "unknown config keys" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"a": 2.0}', encoding="utf-8")
    code, out, _ = run_cli(capsys, ["capacity", "--hyperboloid",
                                    "--config", str(cfg)])
    assert code == 0
    assert json.loads(out)["result"]["lo"] == f"{math.pi * 4.0:.17g}"
    # explicit flag outranks the file
    code, out, _ = run_cli(capsys, ["capacity", "--hyperboloid",
                                    "--config", str(cfg), "--a", "3.0"])
    assert json.loads(out)["result"]["lo"] == f"{math.pi * 9.0:.17g}"


def test_output_is_byte_deterministic(tmp_path, capsys):
    # identical resolved configs (including the output path) must produce
    # byte-identical documents
    p = tmp_path / "run.json"
    blobs = []
    for _ in range(2):
        code, _, _ = run_cli(capsys, ["spectrum", "--labels", "40",
                                      "--out", str(p)])
        assert code == 0
        blobs.append(p.read_bytes())
    assert blobs[0] == blobs[1]
    doc = json.loads(blobs[0])
    assert doc["result"]["labels_scanned"] == 40
    assert doc["result"]["partial"] is False


def test_no_bare_floats_in_envelope(capsys):
    code, out, _ = run_cli(capsys, ["spectrum", "--labels", "40"])
    assert code == 0

    def walk(node):
        assert not isinstance(node, float)
        if isinstance(node, dict):
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)

    walk(json.loads(out))


def test_spectrum_csv_table(tmp_path, capsys):
    csv_path = tmp_path / "spec.csv"
    code, _, _ = run_cli(capsys, ["spectrum", "--labels", "40",
                                  "--csv", str(csv_path)])
    assert code == 0
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    preamble = [ln for ln in lines if ln.startswith("# ")]
    assert len(preamble) == 2
    header_idx = len(preamble)
    assert lines[header_idx] == "group,index_or_label,action,bound_flag"
    body = lines[header_idx + 1:]
    first = body[0].split(",")
    assert first[0] == "i" and first[1] == "1" and first[3] == "exact"
    assert float(first[2]) == pytest.approx(math.pi, rel=1e-15)
    groups = {row.split(",")[0] for row in body}
    assert groups == {"i", "ii"}
    flags = {row.split(",")[3] for row in body if row.startswith("ii")}
    assert flags == {"ok"}


def test_spectrum_budget_writes_partial_and_exits_3(tmp_path, capsys):
    out_path = tmp_path / "partial.json"
    code, _, err = run_cli(capsys, ["spectrum", "--labels", "40",
                                    "--budget", "15", "--out", str(out_path)])
    assert code == 3
    assert "budget" in err
    doc = json.loads(out_path.read_text(encoding="utf-8"))
    assert doc["result"]["partial"] is True
    assert doc["result"]["labels_scanned"] == 15


def test_sandwich_clean_run(capsys):
    code, out, err = run_cli(capsys, [
        "sandwich", "--expr", "1 * bump(rho; 1, 3)",
        "--M", "1.0", "--m", "0.5", "--rho0", "0.1", "--rho1", "3.0",
        "--samples", "20000"])
    assert code == 0 and err == ""
    res = json.loads(out)["result"]
    assert res["audit"]["violations"] == 0
    assert float(res["inner"]["a"]) ** 2 == pytest.approx(0.125, rel=1e-12)
    assert float(res["outer"]["a"]) ** 2 == pytest.approx(4.0, rel=1e-12)


def test_sandwich_metadata_must_be_complete(capsys):
    code, _, err = run_cli(capsys, ["sandwich", "--expr",
                                    "1 * bump(rho; 1, 3)", "--M", "1.0"])
    assert code == 2 and "support metadata" in err


def test_sandwich_rejects_nonpositive_floor(capsys):
    code, _, err = run_cli(capsys, [
        "sandwich", "--expr", "1 * bump(rho; 1, 3)",
        "--M", "1.0", "--m", "0.0", "--rho0", "0.1", "--rho1", "3.0"])
    assert code == 2 and "not in g+" in err


def test_bad_expression_is_exit_2(capsys):
    code, _, err = run_cli(capsys, ["capacity", "--expr", "bump(rho; 3, 1)"])
    assert code == 2 and "symcone:" in err


def test_squeeze_sweep_small(capsys):
    code, out, _ = run_cli(capsys, ["squeeze", "--candidates", "1",
                                    "--samples", "500", "--s", "1.5"])
    assert code == 0
    res = json.loads(out)["result"]
    assert res["verdict"] == "IMPOSSIBLE"
    th = {k: float(v) for k, v in res["theoretical"].items()}
    assert th["s2w_lo"] == pytest.approx(2.25 * math.pi, rel=1e-12)
    assert th["s2w_lo"] > th["w_hi"]
    assert all(c["escapes"] for c in res["candidates"])


def test_squeeze_below_unit_scale_is_vacuous(capsys):
    code, out, _ = run_cli(capsys, ["squeeze", "--candidates", "1",
                                    "--samples", "200", "--s", "0.5"])
    assert code == 0
    assert json.loads(out)["result"]["verdict"] == "VACUOUS"


def test_smoothing_audit_passes(capsys):
    code, out, err = run_cli(capsys, ["smoothing-audit", "--points", "150",
                                      "--seed", "31"])
    assert code == 0 and err == ""
    checks = json.loads(out)["result"]["checks"]
    assert checks["identity_ball_pass"] is True
    assert checks["agreement_pass"] is True
    assert checks["symplecticity_pass"] is True


def test_smoothing_audit_failure_is_exit_4(capsys):
    # A violent generator breaks the fixed-step agreement checks; the
    # report is still written and the exit code flags the failure.
    code, out, err = run_cli(capsys, ["smoothing-audit", "--points", "100",
                                      "--seed", "3", "--amplitude", "1.0"])
    assert code == 4
    assert "smoothing audit failed" in err
    checks = json.loads(out)["result"]["checks"]
    assert not (checks["agreement_pass"] and checks["symplecticity_pass"])


def test_metric_scaling_headline(capsys):
    code, out, err = run_cli(capsys, ["metric", "--family", "scaling",
                                      "--s", "2.0", "--grid", "2000",
                                      "--pool", "2"])
    assert code == 0 and err == ""
    res = json.loads(out)["result"]
    assert res["antisymmetry_ok"] is True
    d = res["headline"]["distance"]
    assert float(d["lo"]) == pytest.approx(math.log(2.0), rel=1e-14)
    assert float(d["hi"]) == pytest.approx(math.log(2.0), rel=1e-14)
    assert all(v["ok"] for v in res["dw_bound"].values())
    assert [sorted(c) for c in res["classes"]] == [["f"], ["2f"]]
