"""End-to-end command-line pipeline on a generated panel."""

import json
from pathlib import Path

import numpy as np
import pytest

from hpar.cli import build_parser, main
from hpar.panel import load_panel

CONFIG = """\
data = "{root}/out/synthetic.csv"
output_dir = "{root}/out"
seed = 11
taus = [0.1, 0.3, 0.5, 0.7, 0.9]
horizons = [1]

[[models]]
name = "full"
target = "y"
regressors = ["y", "x1", "x2", "stress"]
unpenalized = ["y"]

[budget]
points = 8

[forecast]
initial_window = 68

[risk]
model = "full"
horizon = 1

[spillover]
model = "full"
horizons = [1]
sri_column = "stress"
lag_order = 1
window = 12

[synth]
kind = "location_scale"
periods = 90
regressors = 2
"""


def _read_csv(path):
    """Parse one of the CLI's CSV artifacts into (header, list-of-row-dicts)."""
    lines = Path(path).read_text().splitlines()
    assert lines[0].startswith("# columns: ")
    header = lines[1].split(",")
    assert lines[0] == "# columns: " + ",".join(header)
    rows = [dict(zip(header, line.split(","))) for line in lines[2:]]
    return header, rows


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One pass of every subcommand against a synthetic panel."""
    root = tmp_path_factory.mktemp("cli")
    config = root / "run.toml"
    config.write_text(CONFIG.format(root=root))
    for command in ("synth", "fit", "forecast", "risk", "spillover"):
        assert main([command, "--config", str(config)]) == 0
    return root


def test_synth_writes_loadable_panel(pipeline):
    panel = load_panel(pipeline / "out" / "synthetic.csv")
    assert panel.n_periods == 90
    assert list(panel.frame.columns) == ["y", "x1", "x2", "stress"]
    truth = json.loads((pipeline / "out" / "synthetic_truth.json").read_text())
    assert truth["kind"] == "location_scale"
    assert truth["seed"] == 11
    assert truth["slopes"] == [2.5, 2.5, 1.5]


def test_fit_artifacts(pipeline):
    target = pipeline / "out" / "full_h1"
    header, rows = _read_csv(target / "coefficients.csv")
    assert header == ["variable", "q0.1", "q0.3", "q0.5", "q0.7", "q0.9", "ols"]
    assert [r["variable"] for r in rows] == ["intercept", "y", "x1", "x2",
                                            "stress"]
    medians = [float(r["q0.5"]) for r in rows]
    assert all(np.isfinite(medians))

    fit = json.loads((target / "fit.json").read_text())
    betas = np.asarray(fit["betas"])
    assert betas.shape == (5, 5)
    selection = json.loads((target / "selection.json").read_text())
    assert selection["criterion"] == "bic"
    assert selection["chosen_budget"] in selection["budgets"]
    assert len(selection["bic"]) == 8
    assert selection["budgets"][selection["chosen_index"]] == \
        selection["chosen_budget"]


def test_forecast_artifacts(pipeline):
    header, rows = _read_csv(pipeline / "out" / "full_h1" / "forecasts.csv")
    assert header[:2] == ["date", "horizon"]
    assert header[-2:] == ["realized", "out_of_domain"]
    # 90 periods, one lost to the lag, expanding from a 68-row initial window
    assert len(rows) == 89 - 68
    quantiles = np.array([[float(r[f"q{t}"]) for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
                          for r in rows])
    assert np.all(np.diff(quantiles, axis=1) >= -1e-8)

    score_header, score_rows = _read_csv(pipeline / "out" / "scores.csv")
    assert score_header == ["model", "horizon", "n_forecasts", "qwcrps_uniform",
                            "qwcrps_centre", "qwcrps_left", "qwcrps_right"]
    assert score_rows[0]["model"] == "full"
    assert int(score_rows[0]["n_forecasts"]) == len(rows)
    assert float(score_rows[0]["qwcrps_uniform"]) > 0.0


def test_risk_artifacts(pipeline):
    header, rows = _read_csv(pipeline / "out" / "full_h1" / "risk.csv")
    assert header == ["date", "U", "S", "left", "right", "ES", "EL"]
    assert len(rows) == 89
    for row in rows:
        u, s = float(row["U"]), float(row["S"])
        left, right = float(row["left"]), float(row["right"])
        # repr() serialization round-trips exactly, so the identities survive
        assert left + right == u
        assert abs(s) <= 1.0
        assert float(row["ES"]) <= float(row["EL"])


def test_spillover_artifacts(pipeline):
    out = pipeline / "out" / "spillover"
    names = ["ES", "EL", "stress"]

    header, rows = _read_csv(out / "fevd_h1.csv")
    assert header == ["variable"] + names + ["from_others"]
    for i, row in enumerate(rows):
        shares = [float(row[n]) for n in names]
        assert np.isclose(sum(shares), 100.0, atol=1e-8)
        off_diagonal = sum(shares) - shares[i]
        assert np.isclose(float(row["from_others"]), off_diagonal, atol=1e-8)

    header, rows = _read_csv(out / "directional_h1.csv")
    for row in rows:
        assert np.isclose(float(row["net"]),
                          float(row["to_others"]) - float(row["from_others"]))

    _, summary = _read_csv(out / "summary.csv")
    total = float(summary[0]["total_index"])
    assert 0.0 <= total <= 100.0
    assert int(summary[0]["lag_order"]) == 1

    header, rows = _read_csv(out / "rolling_h1.csv")
    assert header[:2] == ["date", "total"]
    assert "net_ES_to_EL" in header and "net_EL_to_stress" in header
    assert len(rows) == 89 - 12 + 1
    totals = [float(r["total"]) for r in rows if r["total"] != ""]
    assert totals and all(0.0 <= t <= 100.0 for t in totals)

    header, rows = _read_csv(out / "irf_h1.csv")
    assert header == ["shock", "horizon"] + names
    assert len(rows) == 3 * 13  # three shocks, horizons 0..12

    _, rows = _read_csv(out / "net_pairwise.csv")
    assert [r["pair"] for r in rows] == ["net_ES_to_stress", "net_EL_to_stress"]


def test_fit_rerun_is_byte_identical_across_jobs(pipeline):
    config = pipeline / "run.toml"
    second = pipeline / "out2"
    assert main(["fit", "--config", str(config), "--out", str(second),
                 "--jobs", "2"]) == 0
    for name in ("fit.json", "selection.json", "coefficients.csv"):
        first = (pipeline / "out" / "full_h1" / name).read_bytes()
        assert (second / "full_h1" / name).read_bytes() == first


def test_seed_override_changes_synthetic_data(pipeline):
    config = pipeline / "run.toml"
    reseeded = pipeline / "out_seed"
    assert main(["synth", "--config", str(config), "--out", str(reseeded),
                 "--seed", "7"]) == 0
    original = (pipeline / "out" / "synthetic.csv").read_bytes()
    assert (reseeded / "synthetic.csv").read_bytes() != original
    truth = json.loads((reseeded / "synthetic_truth.json").read_text())
    assert truth["seed"] == 7


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert main(["fit", "--config", str(tmp_path / "absent.toml")]) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("data = [unclosed")
    assert main(["synth", "--config", str(bad)]) == 2
    assert "invalid TOML" in capsys.readouterr().err


def test_missing_data_file_exits_2(tmp_path, capsys):
    config = tmp_path / "run.toml"
    config.write_text("""
data = "%s/nowhere.csv"

[[models]]
name = "m"
target = "y"
regressors = ["x"]
""" % tmp_path)
    assert main(["fit", "--config", str(config)]) == 2
    assert "error:" in capsys.readouterr().err


def test_estimation_failure_exits_1(pipeline, capsys):
    """A VAR lag order the sample cannot support is a runtime failure."""
    config = pipeline / "deep_lag.toml"
    text = CONFIG.format(root=pipeline).replace("lag_order = 1",
                                                "lag_order = 40")
    config.write_text(text.replace("points = 8", "points = 3"))
    assert main(["spillover", "--config", str(config),
                 "--out", str(pipeline / "out_fail")]) == 1
    assert "too few" in capsys.readouterr().err


def test_argparse_rejects_bad_invocations():
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["frobnicate", "--config", "x.toml"])
    with pytest.raises(SystemExit):
        main(["fit"])  # --config is required
    args = build_parser().parse_args(["synth", "--config", "c.toml",
                                      "--seed", "3", "--jobs", "2"])
    assert args.command == "synth" and args.seed == 3 and args.jobs == 2
