import json
import math

import pytest

from wignerlab._io import csv_text, fmt
from wignerlab.harness import cli
from wignerlab.harness.config import ConfigError, EtaClampWarning, from_dict, load_config
from wignerlab.harness.runner import aggregate, run_experiment


def raw_config(tmp_path, **over):
    raw = {
        "experiment": "semicircle-sweep",
        "n": 2,
        "trials": 1,
        "kappa": 0.5,
        "eta_spec": {"c": 1.0, "a": 0.0},
        "dist": {"off_diag": "gaussian", "diag": "gaussian"},
        "seed": 1,
        "out_dir": str(tmp_path / "out"),
    }
    raw.update(over)
    return raw


def test_config_validation(tmp_path):
    raw = raw_config(tmp_path)
    for key in ("experiment", "n", "seed", "out_dir", "eta_spec"):
        bad = dict(raw)
        del bad[key]
        with pytest.raises(ConfigError):
            from_dict(bad)
    for field, value in [("experiment", "nope"), ("kappa", 2.5), ("trials", 0), ("seed", -1), ("extra", 1)]:
        with pytest.raises(ConfigError):
            from_dict(dict(raw, **{field: value}))
    with pytest.raises(ConfigError):
        from_dict(dict(raw, eta_spec={"c": 0.0, "a": 0.0}))
    with pytest.raises(ConfigError):
        from_dict(dict(raw, dist={"off_diag": "cauchy", "diag": "gaussian"}))


def test_eta_spec_and_log8_preset(tmp_path):
    cfg = from_dict(raw_config(tmp_path, n=100, eta_spec={"c": 20, "a": 0}))
    assert cfg.eta == pytest.approx(0.2)
    cfg = from_dict(raw_config(tmp_path, n=100, eta_spec={"c": 1, "a": 1}))
    assert cfg.eta == pytest.approx(math.log(100) / 100)
    preset = from_dict(raw_config(tmp_path, n=2000, eta_spec="paper"))
    assert preset.eta_spec == {"c": 1.0, "a": 8.0}
    with pytest.warns(EtaClampWarning):
        assert preset.eta == 1.0


def test_hash_ignores_threads_and_out_dir(tmp_path):
    a = from_dict(raw_config(tmp_path, threads=1))
    b = from_dict(raw_config(tmp_path, threads=4, out_dir="/elsewhere"))
    c = from_dict(raw_config(tmp_path, seed=2))
    assert a.hash() == b.hash() != c.hash()


def test_load_config_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(raw_config(tmp_path)))
    assert load_config(path).n == 2
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


def test_smallest_run(tmp_path):
    cfg = from_dict(raw_config(tmp_path))
    report = run_experiment(cfg)
    assert len(report.records) == 1
    out = tmp_path / "out"
    assert (out / "report.json").exists() and (out / "grid.csv").exists()
    header = (out / "grid.csv").read_text().splitlines()[0]
    assert header == "E,eta,re_m,im_m,re_msc,im_msc,abs_dev"
    doc = json.loads((out / "report.json").read_text())
    assert set(doc) == {"science", "metadata"}
    assert doc["science"]["config_hash"] == cfg.hash()


def test_rerun_byte_identical_science(tmp_path):
    raw = raw_config(tmp_path, n=40, trials=4, eta_spec={"c": 8, "a": 0})
    r1 = run_experiment(from_dict(dict(raw, threads=1)))
    r2 = run_experiment(from_dict(dict(raw, threads=3)))
    assert r1.science_json() == r2.science_json()
    assert [r["trial"] for r in r1.records] == [0, 1, 2, 3]


@pytest.mark.parametrize(
    "experiment,extra",
    [
        ("counting", {}),
        ("bootstrap", {}),
        ("delocalization", {"params": {"lower_tail": {"m": 4, "delta": 0.3, "draws": 1000}}}),
        ("xk-concentration", {"params": {"spot_energies": 2}}),
        ("identity-suite", {"n": 8}),
        ("projection-lemma", {"dist": {"off_diag": "rademacher", "diag": "gaussian"}, "params": {"m": 5, "draws": 2000, "tail": {"delta": 0.5, "draws": 1000}}}),
        ("khintchine", {"n": 8, "dist": {"off_diag": "rademacher", "diag": "gaussian"}, "params": {"draws": 20000}}),
    ],
)
def test_every_experiment_runs_and_aggregates(tmp_path, experiment, extra):
    raw = raw_config(tmp_path, experiment=experiment, n=extra.pop("n", 30), trials=4, eta_spec={"c": 6, "a": 0}, **extra)
    cfg = from_dict(raw)
    full = run_experiment(cfg, write=False)
    lo = run_experiment(cfg, trial_range=(0, 2), write=False)
    hi = run_experiment(cfg, trial_range=(2, 4), write=False)
    whole = aggregate([full])
    assert whole["aggregate"] == full.science["aggregate"]
    assert aggregate([lo, hi]) == whole
    assert aggregate([hi, lo]) == whole
    assert aggregate([full, lo]) == whole


def test_aggregate_rejects_mixed(tmp_path):
    a = run_experiment(from_dict(raw_config(tmp_path)), write=False)
    b = run_experiment(from_dict(raw_config(tmp_path, experiment="counting")), write=False)
    with pytest.raises(ValueError):
        aggregate([a, b])
    with pytest.raises(ValueError):
        aggregate([])


def test_unwritable_out_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        run_experiment(from_dict(raw_config(tmp_path, out_dir=str(blocker / "sub"))))


def test_csv_format():
    assert fmt(0.1 + 0.2) == "0.3" and fmt(3) == "3" and fmt(True) == "1"
    assert fmt(1.23456789012345e-20) == "1.23456789012e-20"
    text = csv_text("a,b", [[1, 2.5], [3, float("nan")]])
    assert text == "a,b\n1,2.5\n3,nan\n"


def test_cli(tmp_path, capsys):
    assert cli.main(["list"]) == 0
    assert "identity-suite" in capsys.readouterr().out
    path = tmp_path / "c.json"
    path.write_text(json.dumps(raw_config(tmp_path, experiment="identity-suite", n=4, trials=2)))
    assert cli.main(["run", "--config", str(path), "--out", str(tmp_path / "o1"), "--seed", "5", "--threads", "2"]) == 0
    doc = json.loads((tmp_path / "o1" / "report.json").read_text())
    assert doc["science"]["config"]["seed"] == 5
    # a threshold nobody can meet gives exit code 2
    strict = raw_config(tmp_path, experiment="identity-suite", n=4, trials=1, params={"thresholds": {"resolvent_diff": -1}})
    path.write_text(json.dumps(strict))
    assert cli.main(["run", "--config", str(path)]) == 2
    path.write_text(json.dumps(dict(strict, experiment="bogus")))
    assert cli.main(["run", "--config", str(path)]) == 1
    assert cli.main(["run", "--config", str(tmp_path / "missing.json")]) == 1


def test_cli_check(tmp_path):
    assert cli.main(["check", "--out", str(tmp_path / "chk")]) == 0
