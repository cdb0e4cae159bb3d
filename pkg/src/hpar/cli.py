"""Command-line pipeline: fit, forecast, risk, spillover, synth.

Each subcommand reads one TOML configuration (see :mod:`hpar.config`) and
writes a deterministic output tree: identical (configuration, seed) pairs
produce byte-identical files regardless of ``--jobs``.  CSV files open with a
``# columns:`` schema comment; floats are serialized with their shortest
round-trip representation.  Exit codes: 0 on success, 2 for configuration or
data validation problems, 1 for runtime estimation failures.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config
from .forecast import ScoreReport, expanding_forecast
from .lasso import compute_weights, default_budget_grid, grid_search
from .lp import LpSolverError
from .panel import (DateOrderError, ModelSpec, PanelFormatError, ScalingError,
                    build_design, format_quarter, load_panel, save_panel,
                    transform)
from .quantreg import EPS_SELECT, EstimationError, fit_qr
from .risk import risk_series
from .spillover import (connectedness, fit_var, girf_fevd, impulse_response,
                        rolling_spillover, select_lag)
from .synth import location_scale_panel, regime_switch_var


def _fmt(value):
    """One deterministic CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return "" if np.isnan(f) else repr(f)
    return str(value)


def _write_csv(path, header, rows):
    lines = ["# columns: " + ",".join(header), ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _prepared_panel(cfg):
    if not cfg.data:
        raise ConfigError("this command needs the 'data' key in the configuration")
    panel = load_panel(cfg.data, date_column=cfg.date_column)
    for column, kind in cfg.transforms:
        panel = transform(panel, column, kind)
    return panel


def _require_models(cfg):
    if not cfg.models:
        raise ConfigError("this command needs at least one [[models]] entry")


def _pipeline_fit(panel, entry, horizon, cfg, jobs):
    """Pilot fit, adaptive weights, budget grid, criterion-chosen fit."""
    spec = ModelSpec(name=entry.name, target=entry.target,
                     regressors=entry.regressors,
                     unpenalized=entry.unpenalized, horizon=horizon)
    design = build_design(panel, spec)
    weights = compute_weights(fit_qr(design, cfg.taus))
    grid = default_budget_grid(design, weights, cfg.taus,
                               n_points=cfg.budget.points,
                               t_min=cfg.budget.t_min)
    selection = grid_search(design, weights, grid, taus=cfg.taus,
                            criterion=cfg.criterion, jobs=jobs)
    return design, selection


def _model_dir(out_dir, entry, horizon):
    path = Path(out_dir) / f"{entry.name}_h{horizon}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _quantile_headers(taus):
    return [f"q{tau:g}" for tau in taus]


def cmd_fit(cfg, jobs):
    """Fit every configured model at every horizon; write fits and tables."""
    _require_models(cfg)
    panel = _prepared_panel(cfg)
    for entry in cfg.models:
        for horizon in cfg.horizons:
            design, selection = _pipeline_fit(panel, entry, horizon, cfg, jobs)
            target_dir = _model_dir(cfg.output_dir, entry, horizon)
            _write_json(target_dir / "fit.json", selection.fit.to_dict())
            _write_json(target_dir / "selection.json", selection.to_dict())
            ols, *_ = np.linalg.lstsq(design.x, design.y, rcond=None)
            betas = selection.fit.betas.copy()
            slopes = betas[:, 1:]
            slopes[np.abs(slopes) <= EPS_SELECT] = 0.0
            header = ["variable"] + _quantile_headers(cfg.taus) + ["ols"]
            rows = []
            for j, name in enumerate(["intercept"] + design.columns):
                rows.append([name] + [betas[q, j] for q in range(len(cfg.taus))]
                            + [ols[j]])
            _write_csv(target_dir / "coefficients.csv", header, rows)
            print(f"fit: {target_dir} (budget {selection.chosen_budget:.6g}, "
                  f"{int(selection.fit.selection_mask.sum())} selected slopes)")
    return 0


def cmd_forecast(cfg, jobs):
    """Expanding-window forecasts and qwCRPS score table for every model."""
    _require_models(cfg)
    panel = _prepared_panel(cfg)
    score_rows = []
    for entry in cfg.models:
        for horizon in cfg.horizons:
            spec = ModelSpec(name=entry.name, target=entry.target,
                             regressors=entry.regressors,
                             unpenalized=entry.unpenalized, horizon=horizon)
            records = expanding_forecast(
                panel, spec, taus=cfg.taus, n_budgets=cfg.budget.points,
                t_min=cfg.budget.t_min,
                initial_size=cfg.forecast.initial_window,
                criterion=cfg.criterion, jobs=jobs)
            target_dir = _model_dir(cfg.output_dir, entry, horizon)
            header = (["date", "horizon"] + _quantile_headers(cfg.taus)
                      + ["realized", "out_of_domain"])
            rows = [[format_quarter(r.date), r.horizon, *r.quantiles,
                     r.realized, r.out_of_domain] for r in records]
            _write_csv(target_dir / "forecasts.csv", header, rows)
            report = ScoreReport.from_records(records, cfg.taus, name=entry.name)
            score_rows.append([report.name, horizon, report.n_records,
                               report.crps["uniform"], report.crps["centre"],
                               report.crps["left"], report.crps["right"]])
            print(f"forecast: {target_dir} ({report.n_records} records, "
                  f"uniform qwCRPS {report.crps['uniform']:.4f})")
    _write_csv(Path(cfg.output_dir) / "scores.csv",
               ["model", "horizon", "n_forecasts", "qwcrps_uniform",
                "qwcrps_centre", "qwcrps_left", "qwcrps_right"], score_rows)
    return 0


def _risk_for(panel, entry, horizon, cfg, jobs):
    design, selection = _pipeline_fit(panel, entry, horizon, cfg, jobs)
    fitted = selection.fit.fitted(design.x)
    series = risk_series(design.target_dates, cfg.taus, fitted,
                         es_alpha=cfg.risk.lower_alpha,
                         el_alpha=cfg.risk.upper_alpha)
    return design, selection, series


def cmd_risk(cfg, jobs):
    """In-sample risk measures for the configured risk model."""
    _require_models(cfg)
    panel = _prepared_panel(cfg)
    entry = cfg.model_named(cfg.risk.model) if cfg.risk.model else cfg.models[0]
    horizon = cfg.risk.horizon
    _, _, series = _risk_for(panel, entry, horizon, cfg, jobs)
    target_dir = _model_dir(cfg.output_dir, entry, horizon)
    rows = [[format_quarter(d), series.u[i], series.s[i], series.left[i],
             series.right[i], series.es[i], series.el[i]]
            for i, d in enumerate(series.dates)]
    _write_csv(target_dir / "risk.csv",
               ["date", "U", "S", "left", "right", "ES", "EL"], rows)
    print(f"risk: {target_dir / 'risk.csv'} ({len(series)} dates)")
    return 0


def _join_sri(panel, series, sri_column):
    if sri_column not in panel.frame.columns:
        raise ConfigError(f"spillover.sri_column {sri_column!r} is not in the panel")
    sri = panel.frame[sri_column].reindex(series.dates).to_numpy(dtype=float)
    bad = [format_quarter(d) for d, v in zip(series.dates, sri) if np.isnan(v)]
    if bad:
        raise ConfigError(
            f"column {sri_column!r} has no value at risk dates: {bad}")
    return sri


def cmd_spillover(cfg, jobs):
    """Spillover system between tail-risk series and the stress column."""
    _require_models(cfg)
    panel = _prepared_panel(cfg)
    if cfg.spillover.model:
        entry = cfg.model_named(cfg.spillover.model)
    elif cfg.risk.model:
        entry = cfg.model_named(cfg.risk.model)
    else:
        entry = cfg.models[0]
    sp = cfg.spillover
    out_dir = Path(cfg.output_dir) / "spillover"
    out_dir.mkdir(parents=True, exist_ok=True)
    pair_rows = {}
    summary_rows = []
    for horizon in sp.horizons:
        _, _, series = _risk_for(panel, entry, horizon, cfg, jobs)
        sri = _join_sri(panel, series, sp.sri_column)
        names = ["ES", "EL", sp.sri_column]
        data = np.column_stack([series.es, series.el, sri])
        if sp.select_lag:
            p = select_lag(data, names=names, p_max=sp.max_lag,
                           criterion=cfg.criterion)
        else:
            p = sp.lag_order
        model = fit_var(data, names=names, p=p)
        fevd = girf_fevd(model, sp.fevd_horizon, sp.sigma_scaling)
        report = connectedness(fevd)

        _write_csv(out_dir / f"fevd_h{horizon}.csv",
                   ["variable"] + names + ["from_others"],
                   [[names[i], *report.table[i], report.received[i]]
                    for i in range(len(names))])
        _write_csv(out_dir / f"directional_h{horizon}.csv",
                   ["variable", "to_others", "from_others", "net"],
                   [[names[i], report.transmitted[i], report.received[i],
                     report.net[i]] for i in range(len(names))])
        _write_csv(out_dir / f"pairwise_h{horizon}.csv",
                   ["variable"] + names,
                   [[names[i], *report.pairwise[i]] for i in range(len(names))])

        rolling = rolling_spillover(data, names=names, window=sp.window, p=p,
                                    horizon=sp.fevd_horizon,
                                    dates=list(series.dates),
                                    include_sigma_jj_scaling=sp.sigma_scaling)
        pair_columns = [(a, b) for ai, a in enumerate(names)
                        for b in names[ai + 1:]]
        header = (["date", "total"] + [f"to_{n}" for n in names]
                  + [f"from_{n}" for n in names]
                  + [f"net_{a}_to_{b}" for a, b in pair_columns])
        rows = []
        for date, rep in zip(rolling.end_dates, rolling.reports):
            if rep is None:
                rows.append([format_quarter(date)] + [None] * (len(header) - 1))
                continue
            rows.append([format_quarter(date), rep.total, *rep.transmitted,
                         *rep.received,
                         *[rep.net_pairwise(a, b) for a, b in pair_columns]])
        _write_csv(out_dir / f"rolling_h{horizon}.csv", header, rows)

        irf_rows = []
        for shock in names:
            responses = impulse_response(model, shock, sp.irf_horizon)
            for h in range(responses.shape[0]):
                irf_rows.append([shock, h, *responses[h]])
        _write_csv(out_dir / f"irf_h{horizon}.csv",
                   ["shock", "horizon"] + names, irf_rows)

        for tail in ("ES", "EL"):
            pair_rows.setdefault(f"net_{tail}_to_{sp.sri_column}", {})[horizon] = \
                report.net_pairwise(tail, sp.sri_column)
        summary_rows.append([horizon, p, sp.fevd_horizon, report.total])
        print(f"spillover: h={horizon} lag={p} total index {report.total:.2f}")

    _write_csv(out_dir / "net_pairwise.csv",
               ["pair"] + [f"h{h}" for h in sp.horizons],
               [[label, *[values[h] for h in sp.horizons]]
                for label, values in pair_rows.items()])
    _write_csv(out_dir / "summary.csv",
               ["horizon", "lag_order", "fevd_horizon", "total_index"],
               summary_rows)
    return 0


def cmd_synth(cfg, jobs):
    """Generate a synthetic panel plus a JSON record of the true process."""
    del jobs
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    st = cfg.synth
    if st.kind == "location_scale":
        panel, truth = location_scale_panel(st.periods, cfg.seed,
                                            n_regressors=st.regressors,
                                            shape=st.shape)
    else:
        panel, truth = regime_switch_var(st.periods, cfg.seed,
                                         n_series=st.series, diag=st.diag,
                                         cross=st.cross)
    save_panel(panel, out_dir / "synthetic.csv", date_column=cfg.date_column)
    doc = {"kind": st.kind, "seed": cfg.seed, **truth.to_dict()}
    _write_json(out_dir / "synthetic_truth.json", doc)
    print(f"synth: {out_dir / 'synthetic.csv'} ({panel.n_periods} periods, "
          f"kind {st.kind})")
    return 0


_COMMANDS = {
    "fit": cmd_fit,
    "forecast": cmd_forecast,
    "risk": cmd_risk,
    "spillover": cmd_spillover,
    "synth": cmd_synth,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hpar",
        description="Quantile-based house-price-at-risk pipeline")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in _COMMANDS.items():
        cmd = sub.add_parser(name, help=func.__doc__.splitlines()[0])
        cmd.add_argument("--config", required=True, help="TOML run configuration")
        cmd.add_argument("--out", default=None, help="override output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override seed")
        cmd.add_argument("--jobs", type=int, default=None,
                         help="worker processes for grid/window evaluation")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.output_dir = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        jobs = args.jobs if args.jobs is not None else cfg.jobs
        return _COMMANDS[args.command](cfg, jobs)
    except (EstimationError, LpSolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except np.linalg.LinAlgError as exc:
        print(f"error: linear algebra failure: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, PanelFormatError, DateOrderError, ScalingError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
