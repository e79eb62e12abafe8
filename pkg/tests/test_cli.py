import json

import pytest

from percolab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_writes_header(tmp_path, capsys):
    out = tmp_path / "g.txt"
    code, stdout, _ = run(capsys, "gen", "--family", "cycle:8", "--out", str(out))
    assert code == 0
    assert "n=8, m=8" in stdout
    text = out.read_text().splitlines()
    assert text[0] == "8 8"  # header is literally the first line
    assert any(l.startswith("# seed=") for l in text)


def test_gen_roundtrip_through_metrics(tmp_path, capsys):
    out = tmp_path / "g.txt"
    run(capsys, "gen", "--family", "hypercube:3", "--out", str(out))
    code, stdout, _ = run(capsys, "metrics", "--graph", str(out), "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert payload["n"] == 8 and payload["m"] == 12 and payload["girth"] == 4


def test_oracle_prints_connected_probability(tmp_path, capsys):
    k3 = tmp_path / "k3.txt"
    run(capsys, "gen", "--family", "complete:3", "--out", str(k3))
    code, stdout, _ = run(capsys, "oracle", "--graph", str(k3), "--p", "0.5")
    assert code == 0
    assert "P(connected)=0.5" in stdout


def test_bounds_min_omega(capsys):
    code, stdout, _ = run(capsys, "bounds", "--min-omega", "b=1,delta=3,x=0.25")
    assert code == 0
    value = float(stdout.strip().split("=")[1])
    assert value == pytest.approx(0.9575, abs=2e-4)


def test_bounds_requires_request(capsys):
    code, _, err = run(capsys, "bounds")
    assert code == 3
    assert "precondition" in err


def test_graph_source_exclusivity(capsys):
    code, _, err = run(capsys, "metrics")
    assert code == 3 and "exactly one graph source" in err
    code, _, err = run(capsys, "metrics", "--family", "cycle:5", "--graph", "x.txt")
    assert code == 3


def test_exit_codes_for_guards(tmp_path, capsys):
    big = tmp_path / "big.txt"
    run(capsys, "gen", "--family", "complete:8", "--out", str(big))
    code, _, err = run(capsys, "oracle", "--graph", str(big), "--p", "0.5")
    assert code == 4 and "size guard" in err
    code, _, err = run(capsys, "cheeger", "--family", "hypercube:4", "--work-limit", "5")
    assert code == 4
    code, _, err = run(capsys, "percolate", "--family", "cycle:5", "--p", "1.5")
    assert code == 3
    code, _, err = run(capsys, "metrics", "--graph", str(tmp_path / "missing.txt"))
    assert code == 3


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--bogus"])
    assert exc.value.code == 2


def test_seed_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PERCOLAB_SEED", "123")
    code, out1, _ = run(capsys, "percolate", "--family", "cycle:50", "--p", "0.5")
    assert code == 0 and "seed=123" in out1
    # explicit flag wins over the environment
    code, out2, _ = run(capsys, "percolate", "--family", "cycle:50", "--p", "0.5",
                        "--seed", "9")
    assert "seed=9" in out2


def test_sweep_and_canonical_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    canon = tmp_path / "canon.csv"
    code, stdout, _ = run(capsys, "sweep", "--family", "path:3", "--trials", "16",
                          "--thresholds", "2", "--seed", "4", "--out", str(out),
                          "--grid", "5", "--canonical-out", str(canon), "--threads", "1")
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "m,L1_mean,L2_mean,count_ge_2_mean"
    assert rows[1] == "0,1,1,0"
    crows = [l for l in canon.read_text().splitlines() if not l.startswith("#")]
    assert crows[0] == "p,L1_frac,L1_frac_se,L2_frac,P_two_large,P_two_large_se"
    # byte-identical rerun
    out2 = tmp_path / "sweep2.csv"
    run(capsys, "sweep", "--family", "path:3", "--trials", "16", "--thresholds", "2",
        "--seed", "4", "--out", str(out2), "--grid", "5", "--threads", "2")
    assert out.read_bytes() == out2.read_bytes()


def test_pivotal_csv(tmp_path, capsys):
    out = tmp_path / "piv.csv"
    code, stdout, _ = run(capsys, "pivotal", "--family", "path:3", "--p-list", "0.5",
                          "--upsets", "large:3", "--exact", "--out", str(out))
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "k,p,upset,estimate,se,bound"
    k, p, upset, est, se, bound = rows[1].split(",")
    assert upset == "large_s3"
    assert float(est) == pytest.approx(0.5, abs=1e-12)
    assert float(est) <= float(bound)


def test_experiment_json_schema(tmp_path, capsys):
    out = tmp_path / "rep.json"
    csv = tmp_path / "rep.csv"
    code, stdout, _ = run(capsys, "experiment", "--recipe", "counterexample",
                          "--kind", "cycle", "--n", "16", "--trials", "500",
                          "--seed", "3", "--out", str(out), "--csv", str(csv))
    assert code == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"id", "config", "points", "summary", "seed", "runtime_s"}
    assert payload["config"]["kind"] == "cycle"
    assert csv.read_text().startswith("# experiment=counterexample_demo")


def test_experiment_reruns_identical_but_runtime(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run(capsys, "experiment", "--recipe", "uniqueness", "--families", "complete:6",
            "--c", "0.34", "--exact", "--grid", "11", "--trials", "0",
            "--seed", "6", "--out", str(path))
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da.pop("runtime_s"), db.pop("runtime_s")
    assert da == db


def test_experiment_missing_families(tmp_path, capsys):
    code, _, err = run(capsys, "experiment", "--recipe", "threshold",
                       "--out", str(tmp_path / "x.json"))
    assert code == 3 and "needs --families" in err


def test_cheeger_cli(capsys):
    code, stdout, _ = run(capsys, "cheeger", "--family", "cycle:6", "--json")
    assert code == 0
    payload = json.loads(stdout)
    assert payload["value"] == pytest.approx(2 / 3)
    assert payload["witness"] == [0, 1, 2]
    code, stdout, _ = run(capsys, "cheeger", "--family", "cycle:40", "--method", "upper",
                          "--budget", "2000")
    assert code == 0 and "value=0.1" in stdout
