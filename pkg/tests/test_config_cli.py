import json
import math
from pathlib import Path

import numpy as np
import pytest

from quadosc.cli import main
from quadosc.config import (
    RunConfig,
    parse_config,
    parse_initial,
    require_underdamped,
)
from quadosc.errors import ConfigError

MINIMAL = """
[model]
name = model1
"""

FULL = """
# comment line
[model]
name = model2
omega0 = 1.5
lambda = 0.4

[grid]
x_min = -15
x_max = 15
n = 1024

[initial]
spec = gaussian:x0=1,p0=0.5,s=0.8

[run]
times = 0.25,0.5
outputs = artifacts
seed = 7
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.model == "model1"
    assert cfg.grid == (-20.0, 20.0, 2048)
    assert cfg.omega0 == 1.0 and cfg.lam == 0.6
    assert cfg.seed == 12345


def test_full_config_round_trip():
    cfg = parse_config(FULL)
    assert cfg.model == "model2"
    assert cfg.grid == (-15.0, 15.0, 1024)
    assert cfg.times == (0.25, 0.5)
    assert cfg.initial_params() == {"x0": 1.0, "p0": 0.5, "s": 0.8}


def test_all_errors_reported_together():
    bad = """
[model]
name = modelx
omega0 = -2
[grid]
n = 1000
[run]
seed = -1
"""
    with pytest.raises(ConfigError) as err:
        parse_config(bad)
    messages = err.value.errors
    assert len(messages) == 4
    assert any("omega0" in m for m in messages)
    assert any("power of two" in m for m in messages)
    assert any("seed" in m for m in messages)
    assert any("not recognized" in m for m in messages)


def test_malformed_number_reports_line():
    bad = "[model]\nname = model1\nomega0 = fast\n"
    with pytest.raises(ConfigError, match="line 3"):
        parse_config(bad)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("[model]\nname = model1\ncolour = red\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config("[misc]\nfoo = 1\n")


def test_underdamped_guard():
    cfg = RunConfig(omega0=1.0, lam=1.2)
    with pytest.raises(ConfigError, match="underdamped"):
        require_underdamped(cfg)


def test_parse_initial_errors():
    with pytest.raises(ConfigError, match="unknown initial"):
        parse_initial("plane:k=1")
    with pytest.raises(ConfigError, match="s must be positive"):
        parse_initial("gaussian:s=-1")
    with pytest.raises(ConfigError, match="invalid number"):
        parse_initial("gaussian:x0=a")


# --- CLI -----------------------------------------------------------------------

def _read_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def test_cli_propagate(tmp_path):
    out = tmp_path / "run"
    rc = main(["propagate", "--model", "model1", "--times", "0.5,1.0",
               "--initial", "gaussian:x0=0,p0=0,s=1", "--out", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "wave_001.csv")
    assert header == ["x", "re", "im", "abs2"]
    assert len(rows) == 2048
    sidecar = json.loads((out / "wave_001.json").read_text())
    assert sidecar["t"] == 1.0
    assert sidecar["norm2"] == pytest.approx(math.exp(0.6), rel=1e-3)
    assert sidecar["residual"] < 1e-4


def test_cli_kernel_both_sources(tmp_path):
    out = tmp_path / "k"
    rc = main(["kernel", "--model", "model1", "--times", "1.0", "--out", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "kernel.csv")
    assert header == ["t", "alpha", "beta", "gamma", "pref_re", "pref_im", "source"]
    assert [r[-1] for r in rows] == ["closed", "numeric"]
    closed = np.array([float(v) for v in rows[0][:-1]])
    numeric = np.array([float(v) for v in rows[1][:-1]])
    assert np.max(np.abs(closed - numeric)) < 1e-7


def test_cli_moments_paths_agree(tmp_path):
    results = {}
    for path in ("closed", "rk4", "wave"):
        out = tmp_path / path
        rc = main(["moments", "--model", "model1", "--times", "0.5,1.0",
                   "--path", path, "--out", str(out)])
        assert rc == 0
        _, rows = _read_csv(out / "moments.csv")
        results[path] = np.array([[float(v) for v in r] for r in rows])
        sidecar = json.loads((out / "moments.json").read_text())
        assert sidecar["columns"]["E"] == "energy-combination"
    assert np.max(np.abs(results["closed"] - results["rk4"])) < 1e-8
    assert np.max(np.abs(results["closed"] - results["wave"])) < 2e-3


def test_cli_mehler_table(tmp_path):
    out = tmp_path / "m"
    rc = main(["mehler", "--model", "shifted", "--t", "1.0",
               "--n-list", "400,4000", "--eps-list", "0.002,0.001",
               "--out", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "mehler.csv")
    assert header == ["N", "eps", "sup_error"]
    assert len(rows) == 4
    # more terms at fixed eps never hurts
    errs = {(float(r[0]), float(r[1])): float(r[2]) for r in rows}
    assert errs[(4000.0, 0.001)] <= errs[(400.0, 0.001)]


def test_cli_eigen_table(tmp_path):
    out = tmp_path / "e"
    rc = main(["eigen", "--nmax", "4", "--out", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "eigen.csv")
    assert header == ["n", "E_n", "norm_defect", "rayleigh_defect"]
    assert len(rows) == 5
    assert float(rows[0][1]) == pytest.approx(0.4, abs=1e-12)
    assert all(float(r[3]) < 1e-6 for r in rows)


def test_cli_custom_model_numeric_only(tmp_path):
    import numpy as np

    from quadosc.models import builtin_model

    t = np.linspace(0.0, 2.0, 201)
    m1 = builtin_model("model1", 1.0, 0.6)
    table = tmp_path / "coeffs.csv"
    rows = ["t,a,b,c,d"]
    rows += [f"{tv},{m1.a(tv)},{m1.b(tv)},{m1.c(tv)},{m1.d(tv)}" for tv in t]
    table.write_text("\n".join(rows) + "\n")

    out = tmp_path / "k"
    rc = main(["kernel", "--model", f"custom:{table}", "--times", "1.0",
               "--out", str(out)])
    assert rc == 0
    _, krows = _read_csv(out / "kernel.csv")
    assert [r[-1] for r in krows] == ["numeric"]
    # the tabulated coefficients reproduce the built-in kernel
    ref = main(["kernel", "--model", "model1", "--times", "1.0",
                "--out", str(tmp_path / "ref")])
    assert ref == 0
    _, rrows = _read_csv(tmp_path / "ref" / "kernel.csv")
    got = np.array([float(v) for v in krows[0][:-1]])
    expect = np.array([float(v) for v in rrows[1][:-1]])
    assert np.max(np.abs(got - expect)) < 1e-6

    out2 = tmp_path / "w"
    rc = main(["propagate", "--model", f"custom:{table}", "--times", "0.5",
               "--out", str(out2)])
    assert rc == 0
    sidecar = json.loads((out2 / "wave_000.json").read_text())
    assert sidecar["norm2"] == pytest.approx(math.exp(0.3), rel=1e-3)


def test_cli_config_error_exit_code(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[model]\nname = model1\nlambda = 2.0\n")
    rc = main(["kernel", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == 2


def test_cli_determinism(tmp_path):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        rc = main(["propagate", "--model", "model2", "--times", "0.7",
                   "--out", str(out), "--seed", "99"])
        assert rc == 0
        outs.append((out / "wave_000.csv").read_bytes()
                    + (out / "wave_000.json").read_bytes())
    assert outs[0] == outs[1]


def test_cli_verify_exit_codes_and_report(tmp_path, monkeypatch, capsys):
    # Restrict to two fast groups; exit code and report shape are what we
    # exercise here (the full suite runs in test_acceptance).
    from quadosc import verify

    full = verify.CHECKS
    subset = tuple(fn for fn in full
                   if fn.__name__ in ("check_norm_laws", "check_moment_dynamics"))
    monkeypatch.setattr(verify, "CHECKS", subset)

    out = tmp_path / "good"
    rc = main(["verify", "--out", str(out), "--seed", "5"])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["overall"] is True
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names)
    assert "runtime" not in json.dumps(report)
    text = capsys.readouterr().out
    assert "PASS c02_norm_growth_model1" in text

    # same seed twice -> byte-identical report
    out2 = tmp_path / "again"
    main(["verify", "--out", str(out2), "--seed", "5"])
    assert (out / "report.json").read_bytes() == (out2 / "report.json").read_bytes()

    # deliberately coarse grid -> failing checks, exit code 1, measured
    # and expected printed for the failures
    cfg = tmp_path / "coarse.cfg"
    cfg.write_text("[grid]\nn = 256\n")
    monkeypatch.setattr(
        verify, "CHECKS",
        tuple(fn for fn in full
              if fn.__name__ == "check_spectrum_factorization"))
    out3 = tmp_path / "bad"
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rc = main(["verify", "--config", str(cfg), "--out", str(out3)])
    assert rc == 1
    text = capsys.readouterr().out
    assert "FAIL" in text and "measured=" in text
