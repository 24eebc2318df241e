import json

import pytest

from randfs.cli import EXIT_OK, EXIT_RESOURCE, EXIT_VALIDATION, run


def run_to(tmp_path, name, argv):
    path = tmp_path / name
    assert run(argv + ["--out", str(path)]) == EXIT_OK
    return path.read_bytes()


def header(text: bytes) -> dict:
    first = text.decode().splitlines()[0]
    assert first.startswith("# ")
    return json.loads(first[2:])


def test_probes_csv(tmp_path, capsys):
    out = run_to(tmp_path, "p.csv", ["probes", "--kind", "fs", "-L", "2", "-p", "0.5",
                                     "--j-count", "100000", "--seed", "1"])
    lines = out.decode().splitlines()
    assert header(out)["config"]["seed"] == 1 and header(out)["schema_version"] == 1
    assert lines[1].split(",") == ["experiment", "params", "point", "lo", "hi", "trials"]
    point, lo, hi = map(float, lines[2].split(",")[2:5])
    assert lo <= 0.125 <= hi and abs(point - 0.125) < 0.005
    assert "P(E_j)" in capsys.readouterr().out


def test_probes_single_model(tmp_path):
    out = run_to(tmp_path, "p.json", ["probes", "-L", "2", "-p", "0.5", "--j-count", "2000",
                                      "--single-model", "--format", "json"])
    doc = json.loads(out)
    assert doc["result"]["disjoint"] is True
    assert abs(doc["result"]["count"] - 250) <= 45


def test_clt_outputs(tmp_path):
    out = run_to(tmp_path, "c.csv", ["clt", "--family", "linear", "-k", "200", "-p", "0.5",
                                     "-M", "2000", "--seed", "1"])
    h = header(out)
    assert h["diagnostics"]["diagnostics"]["j_k"] == 200
    rows = out.decode().splitlines()[1:]
    assert rows[0] == "full,trimmed" and len(rows) == 2001
    doc = json.loads(run_to(tmp_path, "c.json", ["clt", "-k", "9", "--family", "doubly-exponential",
                                                 "-p", "0.5", "-M", "2000", "--format", "json"]))
    assert doc["result"]["diagnostics"]["label_dominated"] is True


def test_second_moment_exact(tmp_path):
    doc = json.loads(run_to(tmp_path, "s.json", ["second-moment", "-N", "4", "-p", "0.5", "--exact"]))
    assert doc["result"]["pz_holds"] is True
    assert doc["result"]["exact_EX"] == "15/8"


def test_other_subcommands(tmp_path):
    for argv in (["sample", "-p", "0.3", "-N", "1000"],
                 ["sample", "-p", "0.3", "-N", "50", "--members", "--format", "csv"],
                 ["quadruples", "-N", "6", "-p", "0.5", "--trials", "500"],
                 ["second-moment", "-N", "6", "-p", "0.5", "--mc-trials", "200"],
                 ["color", "-N", "200", "-L", "3"],
                 ["color", "-N", "12", "--scan", "--strict", "--format", "csv"],
                 ["threshold", "-L", "1", "-N", "50", "--trials", "200", "--tol", "0.01"]):
        data = run_to(tmp_path, "o", argv)
        assert data


@pytest.mark.parametrize("argv", [
    ["probes", "-L", "2", "-p", "0.5", "--j-count", "20000", "--seed", "3"],
    ["quadruples", "-N", "5", "-p", "0.4", "--trials", "3000", "--seed", "3"],
    ["clt", "-k", "50", "-p", "0.5", "-M", "3000", "--seed", "3"],
])
def test_byte_identical_across_runs_and_workers(tmp_path, argv):
    a = run_to(tmp_path, "a", argv + ["--workers", "1"])
    b = run_to(tmp_path, "b", argv + ["--workers", "1"])
    c = run_to(tmp_path, "c", argv + ["--workers", "4"])
    assert a == b == c


def test_default_seed_is_fixed(tmp_path):
    a = run_to(tmp_path, "a", ["sample", "-p", "0.5", "-N", "100"])
    b = run_to(tmp_path, "b", ["sample", "-p", "0.5", "-N", "100"])
    assert a == b and json.loads(a)["config"]["seed"] == 20240601


def test_timing_is_opt_in(tmp_path):
    plain = run_to(tmp_path, "a", ["probes", "-L", "1", "-p", "0.5", "--j-count", "100"])
    timed = run_to(tmp_path, "b", ["probes", "-L", "1", "-p", "0.5", "--j-count", "100", "--timing"])
    assert b"wall_time" not in plain and b"wall_time" in timed


def test_stdout_when_no_out(capsys):
    assert run(["sample", "-p", "0.5", "-N", "10"]) == EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["result"]["N"] == 10
    assert captured.err.startswith("sample:")


@pytest.mark.parametrize("argv", [
    ["nope"],
    ["probes", "-L", "2", "-p", "1.5"],
    ["probes", "-L", "2", "-p", "0.5", "--bogus-flag"],
    ["second-moment", "-N", "9", "-p", "0.5", "--exact"],
    ["color", "-N", "40", "--scan"],
    ["threshold", "-L", "5", "-N", "100"],
    [],
])
def test_validation_errors_exit_1(argv, capsys):
    assert run(argv) == EXIT_VALIDATION
    assert capsys.readouterr().err


def test_resource_error_exit_2(monkeypatch, capsys):
    monkeypatch.setenv("RANDFS_MEMORY_BUDGET", "64")
    assert run(["sample", "-p", "0.5", "-N", "100000"]) == EXIT_RESOURCE
    assert "memory budget" in capsys.readouterr().err


def test_help_exits_0(capsys):
    assert run(["--help"]) == EXIT_OK
