import csv
import io
import json
from fractions import Fraction

import pytest

from hctree.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_critical():
    assert json.loads(run("critical", "--k", "2")[1]) == {"k": 2, "lambda_cr": 4.0}
    assert json.loads(run("critical", "--k", "3")[1])["lambda_cr"] == 1.6875


def test_critical_usage_error():
    with pytest.raises(SystemExit) as info:
        run("critical", "--k", "1")
    assert info.value.code == 2


@pytest.mark.parametrize("norm, regime", [
    ("4.2", "supercritical_contractive"), ("3.0", "subcritical"), ("5.0", "supercritical_noncontractive")])
def test_fixpoints(norm, regime):
    code, text = run("fixpoints", "--k", "2", "--norm", norm)
    data = json.loads(text)
    assert code == 0
    assert list(data) == ["k", "norm", "xi", "alpha_star", "beta_star", "theta", "holder", "regime"]
    assert data["regime"] == regime
    if norm == "4.2":
        assert data["theta"] == pytest.approx(0.949, abs=5e-4)


def test_fixpoints_from_activity():
    data = json.loads(run("fixpoints", "--k", "2", "--activity", "geom:c=1.05,q=0.5")[1])
    assert data["norm"] == pytest.approx(2.1)


def test_orbit():
    data = json.loads(run("orbit", "--k", "2", "--norm", "4.2", "--alpha0", "0.3")[1])
    assert data["kind"] == "even_to_beta_star_odd_to_alpha_star"


def test_bg_root_digit_grammar():
    a = json.loads(run("bg-root", "--k", "2", "--norm", "4.2", "--t", "5/16")[1])
    b = json.loads(run("bg-root", "--k", "2", "--norm", "4.2", "--t", "d:0101")[1])
    assert a["t"] == b["t"] == "5/16"
    assert a["z0"] == b["z0"]
    assert list(a) == ["t", "z0", "depth_used", "error_bound"]


def test_bg_scan_csv():
    code, text = run("bg-scan", "--k", "2", "--norm", "4.2", "--grid", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0
    assert [r["t"] for r in rows] == ["0", "1/2", "1"]
    z = [float(r["z0"]) for r in rows]
    assert z[0] > z[1] > z[2]
    fp = json.loads(run("fixpoints", "--k", "2", "--norm", "4.2")[1])
    assert z[0] == pytest.approx(fp["beta_star"], abs=1e-9)
    assert z[2] == pytest.approx(fp["alpha_star"], abs=1e-9)
    assert all(Fraction(r["t"]) is not None for r in rows)


def test_bg_scan_regime_error(capsys):
    code, _ = run("bg-scan", "--k", "2", "--norm", "5.0", "--grid", "3")
    assert code == 1
    assert "RegimeError" in capsys.readouterr().err


def test_marginal_methods_agree():
    args = ["marginal", "--k", "2", "--activity", "finite:1=2.1,-1=2.1", "--t", "1/2", "--vertex", "1"]
    closed = json.loads(run(*args)[1])
    brute = json.loads(run(*args, "--method", "brute")[1])
    assert list(closed) == ["target", "support", "p"]
    assert closed["support"] == brute["support"] == [-1, 0, 1]
    assert closed["p"] == pytest.approx(brute["p"], abs=1e-10)


def test_sample_json_lines():
    code, text = run("sample", "--k", "2", "--activity", "finite:1=2.1,-1=2.1", "--t", "1/3",
                     "--count", "3", "--depth", "2", "--seed", "9")
    lines = [json.loads(line) for line in text.splitlines()]
    assert [d["seed"] for d in lines] == [9, 10, 11]
    for d in lines:
        assert list(d) == ["seed", "spins"]
        spins = d["spins"]
        assert len(spins) == 7
        for key, s in spins.items():
            if key and s != 0:
                assert spins[key[:-1]] == 0
    again = run("sample", "--k", "2", "--activity", "finite:1=2.1,-1=2.1", "--t", "1/3",
                "--count", "3", "--depth", "2", "--seed", "9")[1]
    assert again == text


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"k": 2, "norm": 4.2, "grid": 5, "format": "csv"}))
    text = run("bg-scan", "--config", str(cfg))[1]
    assert len(text.splitlines()) == 6
    text = run("bg-scan", "--config", str(cfg), "--grid", "3")[1]
    assert len(text.splitlines()) == 4


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"k": 2, "colour": "red"}))
    with pytest.raises(SystemExit):
        run("critical", "--config", str(cfg))


def test_verify_dynamics_passes():
    code, text = run("verify", "dynamics")
    assert code == 0
    assert "FAIL" not in text


def test_verify_fault_injection():
    code, text = run("verify", "dynamics", "--inject-fault", "theta")
    assert code == 1
    assert "first failure: theta" in text


@pytest.mark.parametrize("suite", ["bg", "gibbs"])
def test_verify_fault_injection_reports_instead_of_crashing(suite):
    code, text = run("verify", suite, "--inject-fault", "theta")
    assert code == 1
    assert f"first failure: {suite} suite: RegimeError" in text


def test_verify_unknown_suite():
    with pytest.raises(SystemExit) as info:
        run("verify", "everything")
    assert info.value.code == 2
