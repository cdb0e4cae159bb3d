"""TOML run configuration for the command-line pipeline.

One file describes a whole run: the input panel, transform directives, model
specifications, and the knobs of each pipeline stage.  Loading is strict --
unknown keys and type mismatches raise :class:`ConfigError` naming the
offending key, which the CLI maps to the validation exit code.
"""

import sys
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .panel import TRANSFORM_LAGS
from .quantreg import DEFAULT_TAUS


class ConfigError(ValueError):
    """A configuration file is malformed, incomplete, or inconsistent."""


@dataclass
class ModelEntry:
    name: str
    target: str
    regressors: list
    unpenalized: tuple = ()


@dataclass
class BudgetSettings:
    points: int = 50
    t_min: float = 1e-3


@dataclass
class ForecastSettings:
    initial_window: int = 50


@dataclass
class RiskSettings:
    model: str = ""
    horizon: int = 1
    lower_alpha: float = 0.05
    upper_alpha: float = 0.95


@dataclass
class SpilloverSettings:
    model: str = ""
    horizons: list = field(default_factory=lambda: [1])
    sri_column: str = "stress"
    lag_order: int = 1
    select_lag: bool = False
    max_lag: int = 4
    fevd_horizon: int = 12
    irf_horizon: int = 12
    window: int = 10
    sigma_scaling: bool = True


@dataclass
class SynthSettings:
    kind: str = "location_scale"
    periods: int = 160
    regressors: int = 2
    shape: float = 0.0
    series: int = 2
    diag: float = 0.2
    cross: float = 0.45


@dataclass
class RunConfig:
    """Validated contents of one run-configuration file."""

    data: str = ""
    date_column: str = "date"
    output_dir: str = "out"
    seed: int = 0
    jobs: int = 1
    criterion: str = "bic"
    taus: np.ndarray = field(default_factory=lambda: DEFAULT_TAUS.copy())
    horizons: list = field(default_factory=lambda: [1])
    transforms: list = field(default_factory=list)
    models: list = field(default_factory=list)
    budget: BudgetSettings = field(default_factory=BudgetSettings)
    forecast: ForecastSettings = field(default_factory=ForecastSettings)
    risk: RiskSettings = field(default_factory=RiskSettings)
    spillover: SpilloverSettings = field(default_factory=SpilloverSettings)
    synth: SynthSettings = field(default_factory=SynthSettings)

    def model_named(self, name):
        for entry in self.models:
            if entry.name == name:
                return entry
        raise ConfigError(f"no model named {name!r} in configuration")


def _take(table, key, kind, default=None, required=False, context=""):
    where = f"{context}.{key}" if context else key
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {where!r}")
        return default
    value = table.pop(key)
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(
            f"key {where!r} has type {type(value).__name__}, expected "
            f"{getattr(kind, '__name__', kind)}")
    return value


def _reject_unknown(table, context):
    if table:
        key = sorted(table)[0]
        where = f"{context}.{key}" if context else key
        raise ConfigError(f"unknown configuration key {where!r}")


def _parse_models(raw):
    models = []
    for i, entry in enumerate(raw):
        ctx = f"models[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{ctx} must be a table")
        entry = dict(entry)
        name = _take(entry, "name", str, required=True, context=ctx)
        target = _take(entry, "target", str, required=True, context=ctx)
        regressors = _take(entry, "regressors", list, required=True, context=ctx)
        unpenalized = _take(entry, "unpenalized", list, default=[], context=ctx)
        _reject_unknown(entry, ctx)
        models.append(ModelEntry(name=name, target=target,
                                 regressors=list(regressors),
                                 unpenalized=tuple(unpenalized)))
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate model names: {sorted(names)}")
    return models


def _parse_transforms(raw):
    out = []
    for i, entry in enumerate(raw):
        ctx = f"transforms[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{ctx} must be a table")
        entry = dict(entry)
        column = _take(entry, "column", str, required=True, context=ctx)
        kind = _take(entry, "kind", str, required=True, context=ctx)
        _reject_unknown(entry, ctx)
        if kind not in TRANSFORM_LAGS:
            raise ConfigError(
                f"{ctx}.kind is {kind!r}; expected one of {sorted(TRANSFORM_LAGS)}")
        out.append((column, kind))
    return out


def load_config(path):
    """Parse and validate a TOML run configuration."""
    try:
        with open(path, "rb") as fh:
            doc = _toml.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {path}")
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}")
    cfg = RunConfig()
    doc = dict(doc)
    cfg.data = _take(doc, "data", str, default="")
    cfg.date_column = _take(doc, "date_column", str, default="date")
    cfg.output_dir = _take(doc, "output_dir", str, default="out")
    cfg.seed = int(_take(doc, "seed", int, default=0))
    cfg.jobs = int(_take(doc, "jobs", int, default=1))
    cfg.criterion = _take(doc, "criterion", str, default="bic")
    if cfg.criterion not in ("bic", "aic"):
        raise ConfigError(f"criterion must be 'bic' or 'aic', got {cfg.criterion!r}")
    taus = _take(doc, "taus", list, default=None)
    if taus is not None:
        try:
            cfg.taus = np.asarray([float(t) for t in taus], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("taus must be a list of numbers")
        if np.any(cfg.taus <= 0) or np.any(cfg.taus >= 1) or np.any(np.diff(cfg.taus) <= 0):
            raise ConfigError("taus must be strictly increasing inside (0, 1)")
    horizons = _take(doc, "horizons", list, default=[1])
    if not horizons or not all(isinstance(h, int) and h >= 1 for h in horizons):
        raise ConfigError("horizons must be a non-empty list of integers >= 1")
    cfg.horizons = list(horizons)
    cfg.transforms = _parse_transforms(_take(doc, "transforms", list, default=[]))
    cfg.models = _parse_models(_take(doc, "models", list, default=[]))

    budget = dict(_take(doc, "budget", dict, default={}))
    cfg.budget = BudgetSettings(
        points=int(_take(budget, "points", int, default=50, context="budget")),
        t_min=float(_take(budget, "min", float, default=1e-3, context="budget")))
    _reject_unknown(budget, "budget")
    if cfg.budget.points < 1 or cfg.budget.t_min <= 0:
        raise ConfigError("budget.points must be >= 1 and budget.min > 0")

    fc = dict(_take(doc, "forecast", dict, default={}))
    cfg.forecast = ForecastSettings(
        initial_window=int(_take(fc, "initial_window", int, default=50,
                                 context="forecast")))
    _reject_unknown(fc, "forecast")
    if cfg.forecast.initial_window < 2:
        raise ConfigError("forecast.initial_window must be at least 2")

    risk = dict(_take(doc, "risk", dict, default={}))
    cfg.risk = RiskSettings(
        model=_take(risk, "model", str, default="", context="risk"),
        horizon=int(_take(risk, "horizon", int, default=1, context="risk")),
        lower_alpha=float(_take(risk, "lower_alpha", float, default=0.05,
                                context="risk")),
        upper_alpha=float(_take(risk, "upper_alpha", float, default=0.95,
                                context="risk")))
    _reject_unknown(risk, "risk")
    for key, alpha in (("lower_alpha", cfg.risk.lower_alpha),
                       ("upper_alpha", cfg.risk.upper_alpha)):
        if not 0.0 < alpha < 1.0:
            raise ConfigError(f"risk.{key} must lie strictly inside (0, 1)")

    sp = dict(_take(doc, "spillover", dict, default={}))
    sp_horizons = _take(sp, "horizons", list, default=None, context="spillover")
    cfg.spillover = SpilloverSettings(
        model=_take(sp, "model", str, default="", context="spillover"),
        horizons=list(sp_horizons) if sp_horizons is not None else list(cfg.horizons),
        sri_column=_take(sp, "sri_column", str, default="stress", context="spillover"),
        lag_order=int(_take(sp, "lag_order", int, default=1, context="spillover")),
        select_lag=bool(_take(sp, "select_lag", bool, default=False,
                              context="spillover")),
        max_lag=int(_take(sp, "max_lag", int, default=4, context="spillover")),
        fevd_horizon=int(_take(sp, "fevd_horizon", int, default=12,
                               context="spillover")),
        irf_horizon=int(_take(sp, "irf_horizon", int, default=12,
                              context="spillover")),
        window=int(_take(sp, "window", int, default=10, context="spillover")),
        sigma_scaling=bool(_take(sp, "sigma_scaling", bool, default=True,
                                 context="spillover")))
    _reject_unknown(sp, "spillover")
    if not all(isinstance(h, int) and h >= 1 for h in cfg.spillover.horizons):
        raise ConfigError("spillover.horizons must be integers >= 1")
    if cfg.spillover.lag_order < 0:
        raise ConfigError("spillover.lag_order must be non-negative")
    if cfg.spillover.fevd_horizon < 1 or cfg.spillover.irf_horizon < 0:
        raise ConfigError("spillover horizons must be positive")
    if cfg.spillover.window < 2:
        raise ConfigError("spillover.window must be at least 2")

    synth = dict(_take(doc, "synth", dict, default={}))
    cfg.synth = SynthSettings(
        kind=_take(synth, "kind", str, default="location_scale", context="synth"),
        periods=int(_take(synth, "periods", int, default=160, context="synth")),
        regressors=int(_take(synth, "regressors", int, default=2, context="synth")),
        shape=float(_take(synth, "shape", float, default=0.0, context="synth")),
        series=int(_take(synth, "series", int, default=2, context="synth")),
        diag=float(_take(synth, "diag", float, default=0.2, context="synth")),
        cross=float(_take(synth, "cross", float, default=0.45, context="synth")))
    _reject_unknown(synth, "synth")
    if cfg.synth.kind not in ("location_scale", "regime_switch"):
        raise ConfigError(
            f"synth.kind must be 'location_scale' or 'regime_switch', "
            f"got {cfg.synth.kind!r}")
    if cfg.synth.periods < 4:
        raise ConfigError("synth.periods is too small")

    _reject_unknown(doc, "")

    # cross-references
    model_names = {m.name for m in cfg.models}
    if cfg.risk.model and cfg.risk.model not in model_names:
        raise ConfigError(f"risk.model {cfg.risk.model!r} is not a configured model")
    if cfg.spillover.model and cfg.spillover.model not in model_names:
        raise ConfigError(
            f"spillover.model {cfg.spillover.model!r} is not a configured model")
    return cfg
