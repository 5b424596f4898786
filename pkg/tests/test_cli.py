import csv
import dataclasses
import io
import json
import subprocess
import sys

import pytest

from ellbeta.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_FAIL, EXIT_OK, RunConfig, cmd_identities, main
from ellbeta.identities import REGISTRY


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_identities_pass_and_echo_config(capsys):
    code, out, _ = run(capsys, "identities", "--family", "special", "--samples", "5", "--seed", "3")
    assert code == EXIT_OK
    lines = [json.loads(x) for x in out.splitlines()]
    cfg = lines[0]["config"]
    assert cfg["mode"] == "identities" and cfg["seed"] == 3 and cfg["samples"] == 5
    assert cfg["identities"] == [i for i, s in REGISTRY.items() if s.group == "special"]
    assert all(r["passed"] for r in lines[1:])
    assert {"identity_id", "samples", "max_residual", "tolerance", "passed", "seed", "worst_point"} <= set(lines[1])


def test_identities_rerun_is_byte_identical(capsys):
    argv = ("identities", "--family", "certificate", "--samples", "4", "--seed", "11")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_tight_tolerance_fails_with_worst_point(capsys):
    code, out, _ = run(capsys, "identities", "--family", "special", "--samples", "3", "--tol", "1e-30")
    assert code == EXIT_FAIL
    reports = [json.loads(x) for x in out.splitlines()[1:]]
    failed = [r for r in reports if not r["passed"]]
    assert failed
    # pass/fail follows the override, whatever the residual
    assert all(r["passed"] == (r["max_residual"] <= 1e-30) for r in reports)
    assert all(r["worst_point"] for r in failed)


def test_corrupted_identity_fails(capsys):
    # perturb one side of a true identity by one part in a thousand
    good = REGISTRY["theta_quasiperiod"]

    def corrupted(rng):
        point, pairs = good.check(rng)
        return point, [(lhs * (1 + 1e-3), rhs) for lhs, rhs in pairs]

    reg = {"theta_quasiperiod": dataclasses.replace(good, check=corrupted)}
    code = cmd_identities(RunConfig("identities", samples=5), registry=reg)
    rep = json.loads(capsys.readouterr().out.splitlines()[1])
    assert code == EXIT_FAIL
    assert rep["max_residual"] > 1e-4 and "z" in rep["worst_point"]


def test_integral_report(capsys):
    code, out, _ = run(capsys, "integral", "--family", "univariate", "--seed", "2")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["passed"] and rep["rel_err"] < 1e-8
    assert len(rep["config"]["params"]["t"]) == 5
    assert rep["config"]["bases"] == {"q": [0.3, 0.0], "p": [0.2, 0.0]}
    for key in ("lhs", "rhs", "points_per_dim", "converged", "err_estimate", "wall_time_s", "tolerance"):
        assert key in rep


def test_integral_domain_violation(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "univariate", "params": {"t": [0.3] * 5}}))
    code, out, _ = run(capsys, "integral", "--config", str(cfg))
    rep = json.loads(out)
    assert code == EXIT_DOMAIN
    assert not rep["passed"] and any(v.startswith("|pq| < |A|") for v in rep["violations"])


def test_unconverged_integral_is_a_numerical_failure(capsys):
    code, out, _ = run(capsys, "integral", "--family", "cn", "--n", "2", "--grid", "64")
    rep = json.loads(out)
    assert code == EXIT_FAIL
    assert not rep["converged"]


@pytest.mark.parametrize("argv", [
    ("integral", "--family", "nope"),
    ("integral", "--config", "/nonexistent.json"),
    ("bogus",),
    ("identities", "--samples", "0"),
    ("identities", "--family", "no_such_group"),
])
def test_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_CONFIG


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"familly": "cn"}))
    assert run(capsys, "integral", "--config", str(cfg))[0] == EXIT_CONFIG


def test_telescope(capsys):
    code, out, _ = run(capsys, "telescope", "--family", "univariate", "--seed", "1")
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["passed"]


def test_telescope_domain_report(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "univariate", "bases": {"q": 0.3, "p": 0.2},
                               "params": {"t": [0.6, 0.65, 0.7, 0.55, 0.62]}}))
    code, out, _ = run(capsys, "telescope", "--config", str(cfg))
    rep = json.loads(out)
    assert code == EXIT_DOMAIN
    assert rep["violations"] and not rep["passed"]


def test_sweep_csv(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "univariate", "params": {"t": [0.6, 0.65, 0.7, 0.55, 0.62]},
                               "sweep": {"values": [0.6, 0.7, 1.05, 0.8]}}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == EXIT_OK
    lines = out.splitlines()
    assert json.loads(lines[0][2:])["config"]["sweep"]["values"][2] == [1.05, 0.0]
    assert lines[-1].startswith("# spread ")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:-1]))))
    assert [r["skipped"] for r in rows] == ["0", "0", "1", "0"]
    assert rows[2]["violations"].startswith("|t_1| < 1")
    assert all(float(r["rel_err"]) < 1e-8 for r in rows if r["skipped"] == "0")


def test_report_to_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "integral", "--out", str(out))
    assert code == EXIT_OK and stdout == ""
    assert json.loads(out.read_text())["passed"]


@pytest.mark.slow
def test_golden_refuses_conflicting_overwrite(tmp_path, capsys):
    from ellbeta.golden import DEFAULT_FIXTURE, checksum

    doc = json.loads(DEFAULT_FIXTURE.read_text())
    for rec in doc["records"]:
        if rec["name"] == "qpoch":
            rec["im"] += 1e-6
            rec["sha256"] = checksum(rec)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "golden", "--out", str(path))
    assert code == EXIT_FAIL and "--force" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ellbeta", "identities", "--family", "theta", "--samples", "2"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0, res.stderr
