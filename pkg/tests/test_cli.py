import io
import json
import subprocess
import sys
from contextlib import redirect_stdout

import pytest

from avoidance.cli import main

WORKED_EXAMPLE = "1 3 B 2 3 3 B 3 B 1 B 2 B 1 3"


def run_cli(args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


@pytest.fixture
def seq_file(tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text(WORKED_EXAMPLE + "\n")
    return str(path)


def test_bound_prints_value():
    code, out = run_cli(["bound", "--n", "21"])
    assert code == 0
    assert out == "18\n"


def test_bound_domain_error_exit_2(capsys):
    assert main(["bound", "--n", "2"]) == 2
    assert "error:" in capsys.readouterr().err


def test_usage_error_exit_2():
    assert main(["bound"]) == 2
    assert main(["no-such-command"]) == 2


def test_bound_json_embeds_meta():
    code, out = run_cli(["bound", "--n", "21", "--format", "json"])
    report = json.loads(out)
    assert report["tool"] == "avoidance"
    assert report["version"]
    assert report["command"] == "bound"
    assert report["args"]["n"] == 21
    assert report["value"] == 18
    assert "seed" in report


def test_weights_json(seq_file):
    code, out = run_cli(["weights", "--k", "3", "--in", seq_file, "--format", "json"])
    assert code == 0
    report = json.loads(out)
    assert report["total"] == "3/1"
    assert report["blanks"] == 5
    assert report["output"]["3"] == "11/6"


def test_weights_rejects_bad_sequence(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("1 4\n")
    assert main(["weights", "--k", "3", "--in", str(path)]) == 2


def test_reduce_round_trips(seq_file, tmp_path):
    out_path = tmp_path / "cert.txt"
    code, _ = run_cli(["reduce", "--k", "3", "--in", seq_file, "--out", str(out_path)])
    assert code == 0
    from avoidance.lemma import certificate_from_text, check_certificate

    cert = certificate_from_text(out_path.read_text())
    assert check_certificate(cert).ok
    assert cert.initial.text() == WORKED_EXAMPLE


def test_verify_lemma_json():
    code, out = run_cli(
        ["verify-lemma", "--k", "2", "--max-len", "5", "--format", "json", "--jobs", "1"]
    )
    assert code == 0
    report = json.loads(out)
    assert report["ok"] is True
    assert report["counterexamples"] == []
    assert report["checked"] == 3 + 8 + 21 + 55 + 144


def test_maxp_text():
    code, out = run_cli(["maxp", "--k", "2"])
    assert code == 0
    assert 0.365 < float(out) < 0.366


def test_taylor_uses_T_as_term_count():
    code, out = run_cli(["taylor", "--p", "0.5", "--T", "200"])
    assert code == 0
    import math

    assert float(out) == pytest.approx(0.25 * math.log(2), abs=1e-12)


def test_simulate_and_check_trace_ok(tmp_path):
    trace = tmp_path / "trace.txt"
    code, _ = run_cli(
        ["simulate", "trivial-k1", "--p", "0.3", "--T", "50", "--seed", "4", "--out", str(trace)]
    )
    assert code == 0
    header = trace.read_text().splitlines()[0]
    assert header == "50 1"
    code, out = run_cli(["check-trace", "--in", str(trace)])
    assert code == 0
    assert out == "OK\n"


def test_check_trace_flags_independent(tmp_path):
    trace = tmp_path / "ind.txt"
    run_cli(
        ["simulate", "independent", "--k", "2", "--p", "0.4", "--T", "2000",
         "--seed", "1", "--out", str(trace)]
    )
    code, out = run_cli(["check-trace", "--in", str(trace), "--format", "json"])
    assert code == 1
    report = json.loads(out)
    assert report["ok"] is False
    assert report["violation_count"] > 0
    assert report["counts"].get("simultaneous", 0) > 0


def test_stats_round_robin_fails_faithfulness(tmp_path):
    trace = tmp_path / "rr.txt"
    run_cli(["simulate", "round-robin", "--k", "2", "--T", "10000", "--seed", "0",
             "--out", str(trace)])
    code, out = run_cli(["stats", "--in", str(trace), "--p", "0.5", "--format", "json"])
    assert code == 1
    report = json.loads(out)
    assert report["faithful"] is False


def test_stats_faithful_source(tmp_path):
    trace = tmp_path / "ok.txt"
    run_cli(["simulate", "trivial-k1", "--p", "0.3", "--T", "20000", "--seed", "8",
             "--out", str(trace)])
    code, out = run_cli(["stats", "--in", str(trace), "--p", "0.3", "--format", "json"])
    assert code == 0
    report = json.loads(out)
    assert report["faithful"] is True
    assert report["encodable"] is True
    # exact identity: weight_rate_total * T == integer total
    num, den = map(int, report["weight_rate_total"].split("/"))
    assert (num * report["T"]) % den == 0


def test_stats_rejects_walker_trace(tmp_path):
    trace = tmp_path / "walk.txt"
    run_cli(["simulate", "walkers", "--n", "5", "--k", "2", "--T", "20", "--seed", "0",
             "--out", str(trace)])
    assert main(["stats", "--in", str(trace), "--p", "0.2"]) == 2


def test_weights_reads_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("1 B 1\n"))
    code, out = run_cli(["weights", "--k", "1", "--in", "-"])
    assert code == 0
    assert "total 1/1" in out


def test_lp_build_writes_mps(tmp_path):
    out_path = tmp_path / "inst.mps"
    code, _ = run_cli(
        ["lp-build", "--k", "2", "--p", "1/8", "--m", "2", "--out", str(out_path)]
    )
    assert code == 0
    text = out_path.read_text()
    assert text.startswith("NAME window_lp_k2_m2")
    assert text.rstrip().endswith("ENDATA")


def test_lp_scan_csv_and_exit_code():
    code, out = run_cli(
        ["lp-scan", "--k", "2", "--m", "1", "--grid", "0.1,0.5,0.51", "--format", "csv"]
    )
    assert code == 1
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "p,status,gap,residual,analytic_maxp_verdict,trivial_verdict"
    # CSV renders rationals as decimals with 12 significant digits
    assert lines[1].startswith("0.1,feasible")
    assert lines[3].startswith("0.51,infeasible")


def test_lp_scan_all_feasible_exit_0():
    code, _ = run_cli(["lp-scan", "--k", "1", "--m", "2", "--grid", "0.2,0.8"])
    assert code == 0


def test_byte_identical_reruns():
    invocations = [
        ["simulate", "waves", "--n", "5", "--k", "1", "--T", "500", "--seed", "33"],
        ["verify-lemma", "--k", "2", "--max-len", "5", "--format", "json", "--jobs", "1"],
        ["lp-scan", "--k", "2", "--m", "1", "--grid", "0.3,0.51", "--format", "csv"],
        ["bound", "--n", "100", "--format", "json"],
    ]
    for args in invocations:
        code_a, out_a = run_cli(args)
        code_b, out_b = run_cli(args)
        assert code_a == code_b
        assert out_a == out_b, args


def test_module_entry_point(seq_file):
    proc = subprocess.run(
        [sys.executable, "-m", "avoidance", "bound", "--n", "21"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "18\n"
