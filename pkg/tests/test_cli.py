import json

import pytest

from nnmix import cli
from nnmix.experiments import Estimate, QuadratureError
from nnmix.cli import conjecture_results, estimates_from_row, run

GAUSS = "fx = gaussian(mean=0, var=1)\nfz = gaussian(mean=0.5, var=2)\n"
MIXED = "fx = gaussian(mean=0, var=1)\nfz = laplace(loc=1, scale=1)\n"


@pytest.fixture
def scen(tmp_path):
    def write(text, name="s.cfg"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def load(path):
    with open(path) as fh:
        return json.load(fh)


def probabilities_ok(obj):
    for v in obj.values() if isinstance(obj, dict) else obj:
        if isinstance(v, (dict, list)):
            probabilities_ok(v)
    if isinstance(obj, dict) and obj.get("method") in ("MonteCarlo", "Quadrature"):
        assert obj["std_error"] >= 0 and obj["abs_error"] >= 0
        assert 0.0 <= obj["value"] <= 1.0 or obj.get("n_samples", 0) == 0


def test_verify_theorem2_example(tmp_path):
    out = tmp_path / "t2.json"
    code = run(["verify-theorem2", "--epsilon", "0.1", "--sigma-x", "1", "--beta", "0.5", "--n", "10000000",
                "--seed", "7", "--output", str(out)])
    assert code == 0
    obj = load(out)
    row = obj["rows"][0]
    assert abs(row["p_star"] - 0.445) < 0.005
    assert abs(row["mc_p_star"]["value"] - 0.445) < 0.005
    assert row["combined"] > 0.5
    assert len(obj["plot_data"]["t_script_curve"]) == 201
    probabilities_ok(obj)
    ests = estimates_from_row(row)
    assert set(ests) == {"quad_p_star", "quad_p_star_star", "mc_p_star", "mc_p_star_star", "mc_combined"}
    for k, e in ests.items():
        assert e == Estimate.from_dict(row[k])
        assert json.loads(json.dumps(e.to_dict())) == row[k]


def test_verify_theorem1_default_grid(tmp_path):
    out = tmp_path / "t1.json"
    assert run(["verify-theorem1", "--n", "200000", "--output", str(out)]) == 0
    obj = load(out)
    assert [r["eps_over_sigma"] for r in obj["rows"]] == [0.1, 0.5, 1.0, 2.0, 5.0]
    probabilities_ok(obj)


def test_compare_rules_zero_n_is_usage_error(scen, capsys):
    assert run(["compare-rules", "--scenario", scen(GAUSS), "--n", "0"]) != 0
    assert "--n" in capsys.readouterr().err


def test_compare_rules_report(scen, tmp_path):
    out = tmp_path / "cr.json"
    rules = "nearest_neighbor,cusum,kernel_gaussian:0.1,kernel_poly:2"
    assert run(["compare-rules", "--scenario", scen(GAUSS), "--n", "20000", "--rules", rules, "--output", str(out)]) == 0
    obj = load(out)
    rates = {(r["rule_a"], r["rule_b"]): r["agreement_rate"] for r in obj["rows"]}
    assert rates[("nearest_neighbor", "kernel_gaussian:0.1")] == 1.0
    assert rates[("nearest_neighbor", "kernel_poly:2")] < 1.0
    assert obj["disagreement_exemplars"]


def test_conjecture_scan_csv(tmp_path):
    out = tmp_path / "scan.csv"
    code = run(["conjecture-scan", "--sweep", "gaussian-laplace-grid", "--n", "100000", "--output-format", "csv",
                "--output", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("fx,fz,integral_value,abs_error_bound,sign_violation")
    assert len(lines) == 1 + 36
    gg = [ln for ln in lines[1:] if ln.count("gaussian(") == 2]
    assert gg and all(",False," in ln for ln in gg)


def test_conjecture_scan_json_round_trip(scen, tmp_path):
    out = tmp_path / "scan.json"
    assert run(["conjecture-scan", "--scenario", scen(MIXED), "--n", "50000", "--output", str(out)]) == 0
    obj = load(out)
    (res,) = conjecture_results(obj)
    assert res.to_dict() == {k: obj["rows"][0][k] for k in res.to_dict()}
    assert obj["sign_violations"] == 0


def test_simulate_records(scen, tmp_path):
    out = tmp_path / "sim.json"
    assert run(["simulate", "--scenario", scen(MIXED), "--n", "50", "--rules", "nearest_neighbor,bayes",
                "--output", str(out)]) == 0
    rows = load(out)["rows"]
    assert len(rows) == 50
    assert set(rows[0]) == {"x", "y", "z", "true_source", "nearest_neighbor", "bayes"}


def test_owen_table(tmp_path):
    out = tmp_path / "owen.csv"
    assert run(["owen-table", "--output-format", "csv", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "h,a,T,reference,abs_diff"
    assert len(lines) == 1 + 17 * 12


def test_csv_plot_siblings(tmp_path):
    out = tmp_path / "t1.csv"
    assert run(["verify-theorem1", "--epsilon", "1", "--n", "1000", "--output-format", "csv", "--output", str(out)]) == 0
    side = tmp_path / "t1.success_curve.csv"
    assert side.exists()
    assert side.read_text().splitlines()[0] == "eps_over_sigma,nearest_neighbor,bayes"


@pytest.mark.parametrize("cmd", ["verify-theorem1", "verify-theorem2"])
def test_gaussian_commands_reject_other_densities(cmd, scen, capsys):
    assert run([cmd, "--scenario", scen(MIXED), "--n", "100"]) == 1
    assert "Gaussian" in capsys.readouterr().err


def test_malformed_scenario_reports_line(scen, capsys):
    path = scen("fx = gaussian(mean=0, var=1)\n# note\nfz = gaussian(mean=0)\n")
    assert run(["compare-rules", "--scenario", path, "--n", "10"]) == 1
    assert f"{path}:3:" in capsys.readouterr().err


def test_unknown_flag_and_command():
    assert run(["owen-table", "--frobnicate"]) == 1
    assert run(["no-such-command"]) == 1
    assert run([]) == 1


def test_unwritable_output(tmp_path, capsys):
    assert run(["owen-table", "--output", str(tmp_path / "missing" / "x.json")]) == 1
    assert "cannot write" in capsys.readouterr().err


def test_bad_rule_is_usage_error(scen):
    assert run(["compare-rules", "--scenario", scen(GAUSS), "--n", "10", "--rules", "nearest_neighbor,oracle"]) == 1


def test_disagreement_exit_code(tmp_path):
    # no Monte Carlo estimate from ten draws can sit within 3 standard errors
    # of a closed form while also being exactly 0 or 1 and having zero error
    assert run(["owen-table", "--tolerance", "1e-300", "--output", str(tmp_path / "o.json")]) in (0, 2)
    assert run(["verify-theorem1", "--epsilon", "0.1", "--n", "1", "--output", str(tmp_path / "t.json")]) == 2


def test_quadrature_failure_exit_code(monkeypatch, scen):
    def boom(*a, **k):
        raise QuadratureError("did not converge")

    monkeypatch.setattr(cli, "conjecture_integral", boom)
    assert run(["conjecture-scan", "--scenario", scen(MIXED), "--n", "10"]) == 3


def test_sign_violation_exit_code(monkeypatch, scen):
    from nnmix.experiments import ConjectureResult

    def negative(s, epsabs=1e-10):
        return ConjectureResult(s, -1e-3, 1e-12, True)

    monkeypatch.setattr(cli, "conjecture_integral", negative)
    monkeypatch.setattr(cli, "mc_success_probability", lambda *a, **k: Estimate(0.5, 0.01, 10))
    assert run(["conjecture-scan", "--scenario", scen(MIXED), "--n", "10"]) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-theorem1", "--n", "150000"],
        ["verify-theorem2", "--epsilon", "-0.5", "--beta", "3", "--n", "150000"],
        ["compare-rules", "--n", "150000"],
        ["simulate", "--n", "300"],
        ["conjecture-scan", "--scenario", "MIXED", "--n", "150000"],
    ],
    ids=lambda a: a[0],
)
def test_byte_identical_across_threads(argv, tmp_path, scen):
    argv = [scen(MIXED) if a == "MIXED" else a for a in argv]
    outs = []
    for t in (1, 3, 8):
        p = tmp_path / f"out{t}.json"
        assert run(argv + ["--seed", "99", "--threads", str(t), "--output", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]
