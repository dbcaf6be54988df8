"""Repeated-split experiment harness producing tidy per-run and summary tables."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import baselines, confair, diffair
from .dataset import GroupSpec, infer_schema, load_csv, parse_schema, split
from .density import DensityConfig
from .exceptions import ConfigError, ExperimentError
from .learner import LearnerConfig, train
from .metrics import evaluate
from .synth import SynthConfig, generate

METHODS = ("none", "kam", "confair", "multimodel", "diffair")
SUMMARY_METRICS = ("di", "di_star", "aod", "aod_star", "bal_acc")


@dataclass(frozen=True)
class DataSource:
    """Either a CSV file with its schema or a synthetic generator config."""

    path: str | None = None
    schema: tuple = ()
    group_spec: GroupSpec | None = None
    label_col: str = "label"
    positive_label: str | None = None
    include_group: bool = False
    synth: SynthConfig | None = None

    def load(self):
        if self.synth is not None:
            return generate(self.synth)
        if self.path is None:
            raise ConfigError("data source needs a path or a synth section")
        spec = self.group_spec or GroupSpec("group", {"1"})
        schema = self.schema or infer_schema(self.path, spec.column, self.label_col)
        return load_csv(self.path, schema, spec,
                        positive_label=self.positive_label, include_group=self.include_group)


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataSource = field(default_factory=lambda: DataSource(synth=SynthConfig()))
    methods: tuple = METHODS
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    density: DensityConfig = field(default_factory=DensityConfig)
    target: str = "disparate_impact"
    alpha_grid: tuple = confair.DEFAULT_ALPHA_GRID
    alpha_u: float | None = None
    alpha_w: float | None = None
    repeats: int = 20
    base_seed: int = 0
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown method(s): {sorted(unknown)}")
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")
        if self.base_seed < 0:
            raise ConfigError("seed must be unsigned")
        if self.target not in confair.TARGETS:
            raise ConfigError(f"unknown target {self.target!r}")

    @classmethod
    def from_dict(cls, doc):
        """Build from the JSON config layout documented in the README."""
        doc = dict(doc)
        data = doc.get("data", {})
        if data.get("path") is None:
            # no CSV given: the synthetic generator, defaults unless overridden
            source = DataSource(synth=SynthConfig(**(data.get("synth") or {})))
        else:
            group_col = data.get("group_col", "group")
            minority = data.get("minority_values", ["1"])
            if isinstance(minority, str):
                minority = minority.split(",")
            source = DataSource(
                path=data.get("path"),
                label_col=data.get("label_col", "label"),
                schema=parse_schema(data["schema"]) if isinstance(data.get("schema"), str)
                else tuple(data.get("schema", ())),
                group_spec=GroupSpec(group_col, frozenset(str(v).strip() for v in minority)),
                positive_label=data.get("positive_label"),
                include_group=bool(data.get("include_group", False)),
            )
        conf = doc.get("confair", {})
        kwargs = dict(
            data=source,
            learner=LearnerConfig(**doc.get("learner", {})),
            density=DensityConfig(**doc.get("density", {})),
            target=conf.get("target", "disparate_impact"),
            alpha_grid=tuple(conf.get("alpha_grid", confair.DEFAULT_ALPHA_GRID)),
            alpha_u=conf.get("alpha_u"),
            alpha_w=conf.get("alpha_w"),
            repeats=doc.get("repeats", 20),
            base_seed=doc.get("seed", 0),
            out=doc.get("out"),
        )
        if "methods" in doc:
            kwargs["methods"] = tuple(doc["methods"])
        return cls(**kwargs)


def resolve_confair(cfg, d, splits):
    """Fixed alpha pair from ``cfg`` when given, otherwise tuned on ``splits``."""
    if cfg.alpha_u is not None:
        alpha_w = cfg.alpha_w if cfg.alpha_w is not None else cfg.alpha_u / 2
        return confair.ConfairConfig(cfg.alpha_u, alpha_w, cfg.target, cfg.density)
    return confair.tune_alpha(d, splits, cfg.learner, cfg.density, cfg.alpha_grid, cfg.target)


def run_method(method, d, splits, cfg):
    """Fit ``method`` on one split and return ``(test predictions, metadata)``."""
    te = splits.test
    X_test = d.features[te]
    meta = {"alpha_u": np.nan, "alpha_w": np.nan}
    if method == "none":
        preds = baselines.no_intervention_fit(d, splits, cfg.learner).predict(X_test)
    elif method == "kam":
        w = baselines.kam_weights(d, splits.train)
        preds = train(d, splits.train, w, cfg.learner).predict(X_test)
    elif method == "confair":
        ccfg = resolve_confair(cfg, d, splits)
        preds = confair.confair_fit(d, splits, cfg.learner, ccfg).predict(X_test)
        meta = {"alpha_u": ccfg.alpha_u, "alpha_w": ccfg.alpha_w}
    elif method == "multimodel":
        pair = baselines.multimodel_fit(d, splits, cfg.learner)
        preds = baselines.multimodel_predict(pair, X_test, d.groups[te])
    elif method == "diffair":
        preds = diffair.fit(d, splits, cfg.density, cfg.learner).predict(X_test)
    else:
        raise ConfigError(f"unknown method {method!r}")
    return preds, meta


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    runs: pd.DataFrame
    summary: pd.DataFrame

    def report(self, cfg=None):
        doc = {
            "runs": self.runs.to_dict(orient="records"),
            "summary": self.summary.to_dict(orient="records"),
        }
        if cfg is not None:
            doc["config"] = _config_to_dict(cfg)
        return doc


def _config_to_dict(cfg):
    doc = asdict(cfg)
    # where the files go does not affect the results; keeping it out lets
    # reruns into different directories produce identical reports
    doc.pop("out")
    doc["data"]["group_spec"] = (None if cfg.data.group_spec is None else
                                 {"column": cfg.data.group_spec.column,
                                  "minority_values": sorted(cfg.data.group_spec.minority_values)})
    doc["data"]["schema"] = [[c.name, c.kind] for c in cfg.data.schema]
    return doc


def summarize(runs):
    """Mean and (population) standard deviation of each metric per method."""
    rows = []
    for method, part in runs.groupby("method", sort=False):
        row = {"method": method, "n_runs": len(part)}
        for metric in SUMMARY_METRICS:
            values = part[metric].to_numpy(dtype=np.float64)
            row[f"{metric}_mean"] = float(np.mean(values))
            row[f"{metric}_std"] = float(np.std(values))
        rows.append(row)
    return pd.DataFrame(rows)


def run_experiment(cfg, d=None, log=None):
    """Run every method on ``cfg.repeats`` splits seeded ``base_seed + r``."""
    if d is None:
        try:
            d = cfg.data.load()
        except Exception as exc:
            raise ExperimentError("load", exc) from exc
    records = []
    for method in cfg.methods:
        for r in range(cfg.repeats):
            seed = cfg.base_seed + r
            try:
                splits = split(d, seed)
                preds, meta = run_method(method, d, splits, cfg)
                te = splits.test
                report = evaluate(d.labels[te], preds, d.groups[te],
                                  metadata={"method": method, "repeat": r, "seed": seed, **meta})
            except Exception as exc:
                raise ExperimentError(f"{method}/repeat {r}", exc) from exc
            records.append(report.to_record())
            if log is not None:
                log(f"{method} repeat {r}: DI*={report.di_star:.3f} "
                    f"AOD*={report.aod_star:.3f} BalAcc={report.bal_acc:.3f}")
    runs = pd.DataFrame(records)
    return ExperimentResult(runs, summarize(runs))


def write_outputs(result, out_dir, cfg=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.runs.to_csv(out / "runs.csv", index=False)
    result.summary.to_csv(out / "summary.csv", index=False)
    with open(out / "report.json", "w") as fh:
        json.dump(result.report(cfg), fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return out


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
