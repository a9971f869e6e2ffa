import csv
import json
import subprocess
import sys

import jsonschema
import pytest

from zernike import data_path
from zernike.cli import EXIT_IDENTITY, EXIT_OK, EXIT_USAGE, Report, main, write_atomic

SCHEMA = json.loads(data_path("run_report.schema.json").read_text())


def run(args, tmp_path, expect):
    report = tmp_path / "report.json"
    code = main(["--json", str(report), "--quiet", *args])
    assert code == expect
    data = json.loads(report.read_text())
    jsonschema.validate(data, SCHEMA)
    assert data["exit_code"] == code
    return data


def test_verify_classical_n4(tmp_path):
    data = run(["verify", "classical", "--N", "4"], tmp_path, EXIT_OK)
    assert data["result"]["residual_zero"] is True
    assert data["result"]["higgs_order"] == 7
    names = {c["name"] for c in data["checks"]}
    assert {"{H,C}=0", "{H,I}=0"} <= names
    assert all(c["status"] == "pass" for c in data["checks"])


def test_verify_numeric_gamma(tmp_path):
    data = run(["verify", "classical", "--N", "2", "--gamma", "1/2,-3"], tmp_path, EXIT_OK)
    assert data["spec"]["gamma"] == ["1/2", "-3"]


def test_verify_quantum_n4(tmp_path):
    data = run(["verify", "quantum", "--N", "4"], tmp_path, EXIT_OK)
    assert len(data["checks"]) == 7


@pytest.mark.parametrize("args", [
    ["verify", "classical", "--N", "0"],
    ["verify", "quantum", "--N", "5"],
    ["verify", "classical", "--N", "2", "--gamma", "0.5,1"],
    ["spectrum", "--N", "4", "--params", "1,2"],
])
def test_usage_errors(tmp_path, args):
    data = run(args, tmp_path, EXIT_USAGE)
    assert data["error"]


def test_argparse_errors_map_to_64(capsys):
    assert main(["verify"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["--seed", "-1", "verify", "classical", "--N", "1"]) == EXIT_USAGE


def test_flags_after_subcommand(tmp_path):
    report = tmp_path / "r.json"
    assert main(["solve-ansatz", "--N", "1", "--quiet", "--json", str(report), "--seed", "7"]) == 0
    assert json.loads(report.read_text())["seed"] == 7


def test_solve_ansatz_text(capsys):
    assert main(["solve-ansatz", "--N", "1", "--case", "upper", "--integral-only"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "P2^2 + g1*Q2*P2"


def test_solve_ansatz_fixture(tmp_path):
    out = tmp_path / "I4.txt"
    data = run(["solve-ansatz", "--N", "4", "--out", str(out)], tmp_path, EXIT_OK)
    assert out.read_text() == data_path("classical_I4.txt").read_text()
    assert data["result"]["residual_is_zero"] is True
    assert data["result"]["q_polynomials"]["Q^(1,2)"] == "-q2^3"


def test_solve_ansatz_truncation(tmp_path):
    from zernike.poly import parse_phase

    n3 = run(["solve-ansatz", "--N", "3"], tmp_path, EXIT_OK)["result"]["integral"]
    n4 = run(["solve-ansatz", "--N", "4"], tmp_path, EXIT_OK)["result"]["integral"]
    assert parse_phase(n4).truncate_params(["g4"]) == parse_phase(n3)


def test_spectrum_zernike_levels(tmp_path):
    table = tmp_path / "levels.csv"
    data = run(["spectrum", "--N", "4", "--params=-2,-1,0,0", "--n-max", "4", "--csv", str(table)],
               tmp_path, EXIT_OK)
    types = {t["label"]: t for t in data["result"]["types"]}
    assert types["I"]["first_k_levels"] == ["0", "3", "8", "15", "24"]
    assert types["II"]["first_k_levels"] == ["0", "3", "8", "15", "24"]
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["n", "E_I", "E_II"]
    assert rows[-1] == ["4", "24", "24"]


def test_spectrum_symbolic(tmp_path):
    data = run(["spectrum", "--N", "4"], tmp_path, EXIT_OK)
    types = {t["label"]: t for t in data["result"]["types"]}
    assert set(types) == {"I", "II"}
    assert types["I"]["energy_polynomial"] == "-n^4*nu - mu*n^3 - alpha*n^2 - beta*n"
    assert types["I"]["u"] == "-(1/2)*n"


def test_spectrum_single_level(tmp_path):
    data = run(["spectrum", "--N", "4", "--params=-2,-1,0,0", "--n-max", "0"], tmp_path, EXIT_OK)
    assert all(len(t["first_k_levels"]) == 1 for t in data["result"]["types"])


def _config(tmp_path, **cfg):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_simulate_free_motion(tmp_path):
    cfg = _config(tmp_path, N=1, gamma=["0"], initial_state=[0.1, 0.2, 0.3, -0.4], t_end=1,
                  dt=0.001, output_every=100)
    data = run(["simulate", cfg], tmp_path, EXIT_OK)
    assert data["result"]["drift_H"] == 0.0
    rows = list(csv.reader(open(tmp_path / "run.csv")))
    assert rows[0] == ["t", "q1", "q2", "p1", "p2", "H", "C", "I_N"]
    assert len(rows) == 12
    summary = json.loads((tmp_path / "run.summary.json").read_text())
    assert set(summary) >= {"drift_H", "drift_C", "drift_I", "closed", "period"}


def test_simulate_polar_closed(tmp_path):
    cfg = _config(tmp_path, chart="polar", N=2, gamma=["2*i", "0"],
                  initial_state=[0.5, 0.0, 0.0, 0.2], t_end=5, dt=0.001,
                  integrator="explicit-rk4", output_every=50)
    data = run(["simulate", cfg], tmp_path, EXIT_OK)
    assert data["result"]["closed"] is True
    assert abs(data["result"]["period"] - 3.141592653589793) < 1e-4
    header = next(csv.reader(open(tmp_path / "run.csv")))
    assert header == ["t", "rho", "phi", "p_rho", "p_phi", "H", "C"]


def test_simulate_complex_gamma_refused(tmp_path, capsys):
    cfg = _config(tmp_path, N=2, gamma=["2*i", "0"], initial_state=[0.5, 0, 0, 0.2], t_end=1,
                  dt=0.001)
    data = run(["simulate", cfg], tmp_path, EXIT_USAGE)
    assert "real" in data["error"]
    assert not (tmp_path / "run.csv").exists()


def test_simulate_drift_gate(tmp_path):
    cfg = _config(tmp_path, N=2, gamma=["1/10", "1/100"], initial_state=[0.3, 0.1, 0.2, -0.1],
                  t_end=1, dt=0.01, drift_tolerance=1e-30, output_every=10)
    data = run(["simulate", cfg], tmp_path, EXIT_IDENTITY)
    failed = [c for c in data["checks"] if c["status"] == "fail"]
    assert failed and all("residual_text" in c for c in failed)


def test_simulate_bad_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    run(["simulate", str(path)], tmp_path, EXIT_USAGE)
    run(["simulate", str(tmp_path / "missing.json")], tmp_path, EXIT_USAGE)
    run(["simulate", _config(tmp_path, t_end=1)], tmp_path, EXIT_USAGE)


def test_failed_check_carries_residual():
    rep = Report("verify", 0)
    rep.check("x", False)
    assert rep.checks[0]["residual_text"]
    jsonschema.validate(rep.as_dict(2), SCHEMA)


def test_write_atomic_replaces(tmp_path):
    p = tmp_path / "sub" / "f.txt"
    write_atomic(p, "a")
    write_atomic(p, "b")
    assert p.read_text() == "b"
    assert [x.name for x in p.parent.iterdir()] == ["f.txt"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "zernike", "solve-ansatz", "--N", "1",
                          "--integral-only"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "p2^2 + g1*q2*p2"
