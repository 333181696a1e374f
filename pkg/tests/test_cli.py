import csv
import json

import numpy as np
import pytest

from tomolab.cli import main, read_csv, rows_to_csv, MalformedCSV
from tomolab.experiments import ConfigError, ExperimentConfig, fit_loglog, run_experiment


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def _small_sweep(tmp_path, **extra):
    cfg = {"experiment": "rate-sweep", "d": 4, "n-grid": [256, 512, 1024, 2048], "trials": 8,
           "seed": 11, "output": str(tmp_path / "out.csv")}
    cfg.update(extra)
    return _write(tmp_path / "cfg.json", cfg)


@pytest.mark.parametrize("power", [-0.5, -1.0, 0.0])
def test_fit_exact_power_laws(power):
    x = np.array([2.0**k for k in range(10, 17)])
    fit = fit_loglog(x, 3.0 * x**power)
    assert abs(fit.slope - power) <= 1e-12
    assert fit.ci_low <= fit.slope <= fit.ci_high


def test_rate_sweep_rows_and_summary(tmp_path, capsys):
    code = main(["run", "--config", _small_sweep(tmp_path)])
    assert code in (0, 2)
    with open(tmp_path / "out.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    per_trial = [r for r in rows if r["metric"] == "op_error"]
    assert len(per_trial) == 4 * 8
    assert [(int(r["trial"]), int(r["n"])) for r in per_trial] == sorted(
        (int(r["trial"]), int(r["n"])) for r in per_trial)
    assert any(r["metric"] == "slope" and r["pass"] in ("true", "false") for r in rows)
    assert any(r["metric"] == "fitted_C" for r in rows)
    assert main(["summarize", str(tmp_path / "out.csv")]) in (0, 2)
    assert "slope" in capsys.readouterr().out


def test_csv_uses_crlf_and_17_digits(tmp_path):
    main(["run", "--config", _small_sweep(tmp_path)])
    raw = (tmp_path / "out.csv").read_bytes()
    assert raw.count(b"\r\n") == raw.count(b"\n")
    rows = read_csv(str(tmp_path / "out.csv"))
    assert rows_to_csv(rows).encode() == raw


def test_determinism_across_runs_and_threads(tmp_path, monkeypatch):
    cfg = _small_sweep(tmp_path)
    main(["run", "--config", cfg])
    first = (tmp_path / "out.csv").read_bytes()
    main(["run", "--config", cfg, "--threads", "3"])
    assert (tmp_path / "out.csv").read_bytes() == first
    monkeypatch.setenv("TOMOLAB_THREADS", "2")
    main(["run", "--config", cfg])
    assert (tmp_path / "out.csv").read_bytes() == first
    main(["run", "--config", cfg, "--seed", "12"])
    assert (tmp_path / "out.csv").read_bytes() != first


@pytest.mark.parametrize("bad, field", [
    ({"experiment": "nope"}, "experiment"),
    ({"experiment": "rate-sweep", "n-grid": [10, 5]}, "n_grid"),
    ({"experiment": "rate-sweep", "trials": 0}, "trials"),
    ({"experiment": "rate-sweep", "seed": -1}, "seed"),
    ({"experiment": "rate-sweep", "colour": 1}, "colour"),
])
def test_bad_config_exits_1_naming_field(tmp_path, capsys, bad, field):
    code = main(["run", "--config", _write(tmp_path / "c.json", bad)])
    assert code == 1
    assert field in capsys.readouterr().err


def test_usage_errors(tmp_path, monkeypatch):
    assert main([]) == 1
    assert main(["run"]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1
    monkeypatch.setenv("TOMOLAB_THREADS", "many")
    assert main(["run", "--config", _small_sweep(tmp_path)]) == 1


def test_summarize_malformed(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["summarize", str(bad)]) == 1
    with pytest.raises(MalformedCSV):
        read_csv(str(bad))


def test_check_failure_exits_2(tmp_path):
    cfg = {"experiment": "fidelity-toolkit", "trials": 200, "output": str(tmp_path / "f.csv")}
    # the literal sqrt(2 (1 - F)) upper bound fails for the unnormalized trace norm
    assert main(["run", "--config", _write(tmp_path / "f.json", cfg)]) == 2


def test_config_from_dict_validation():
    cfg = ExperimentConfig.from_dict({"experiment": "tilt", "d": [4, 8], "mc_samples": 10})
    assert cfg.dims() == [4, 8]
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"d": 3})


def test_small_runs_of_every_experiment():
    for name in ("moment-check", "unbiasedness", "tilt", "volume-ratio", "certificates"):
        cfg = ExperimentConfig.from_dict({"experiment": name, "d": [2, 3], "mc_samples": 1000, "trials": 5,
                                          "n": 50, "k_max": 2})
        rows = run_experiment(cfg, threads=2)
        assert rows and all(np.isfinite(r.estimate) for r in rows)
