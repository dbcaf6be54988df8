"""Command-line interface: ``conformfair <command> [options]``.

Commands
--------
synth       write a synthetic CSV (X1..Xd, group, label)
profile     per (group, label) constraint sets -> constraints.txt
reweigh     ConFair weights -> weighted.csv
train       fit one method on a seeded split -> model JSON
evaluate    score a saved model on the test split of the same seed
experiment  repeated-split comparison -> runs.csv, summary.csv, report.json

Every command reads an optional JSON ``--config`` (layout in the README);
flags given on the command line override its fields.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
import pandas as pd

from . import baselines, confair, conformance, diffair, learner
from .baselines import MultiModelPair
from .dataset import split
from .exceptions import ConfigError, ConformFairError
from .experiment import METHODS, ExperimentConfig, resolve_confair, run_experiment, write_outputs
from .metrics import evaluate
from .synth import SynthConfig, generate_frame


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="conformfair", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="split seed (experiment: base seed)")
    common.add_argument("--out", help="output file (experiment: output directory)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", help="input CSV; the synthetic generator is used when omitted")
    data.add_argument("--schema", help='"name:kind,..." with kinds numerical, categorical, group, label, ignore')
    data.add_argument("--group-col", help="group column (default: group)")
    data.add_argument("--label-col", help="label column when the schema is inferred (default: label)")
    data.add_argument("--minority-values", help="comma-separated group values mapped to the minority")
    data.add_argument("--positive-label", help="label value treated as positive")
    data.add_argument("--density-fraction", type=float, help="share of each cell kept before profiling")

    method = argparse.ArgumentParser(add_help=False)
    method.add_argument("--alpha-u", type=float)
    method.add_argument("--alpha-w", type=float, help="defaults to alpha-u / 2")
    method.add_argument("--alpha-grid", type=_floats, help="comma-separated alpha-u grid for tuning")
    method.add_argument("--target", choices=confair.TARGETS)
    method.add_argument("--learner", choices=("logistic", "stump_ensemble"))

    p = sub.add_parser("synth", parents=[common], help="generate synthetic data")
    for name in ("n_major", "n_minor", "dims"):
        p.add_argument("--" + name.replace("_", "-"), type=int)
    for name in ("separation", "noise_sd", "minority_shift"):
        p.add_argument("--" + name.replace("_", "-"), type=float)
    p.add_argument("--drift-mode", choices=("orthogonal", "aligned"))

    sub.add_parser("profile", parents=[common, data], help="derive per-cell constraint sets")
    sub.add_parser("reweigh", parents=[common, data, method], help="compute ConFair weights")
    p = sub.add_parser("train", parents=[common, data, method], help="train one method")
    p.add_argument("--method", choices=METHODS, default="confair")
    p = sub.add_parser("evaluate", parents=[common, data], help="evaluate a saved model")
    p.add_argument("--model", required=True, help="model JSON written by train")
    p = sub.add_parser("experiment", parents=[common, data, method], help="repeated-split comparison")
    p.add_argument("--method", help="comma-separated subset of " + ",".join(METHODS))
    p.add_argument("--repeats", type=int)
    return parser


# -- config resolution --------------------------------------------------------

def _load_config(args):
    if not getattr(args, "config", None):
        return {}
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _merged_doc(args):
    doc = _load_config(args)
    data = dict(doc.get("data", {}))
    flags = {
        "path": "data", "schema": "schema", "group_col": "group_col", "label_col": "label_col",
        "minority_values": "minority_values", "positive_label": "positive_label",
    }
    for key, attr in flags.items():
        value = getattr(args, attr, None)
        if value is not None:
            data[key] = value
    doc["data"] = data
    if getattr(args, "density_fraction", None) is not None:
        doc["density"] = {**doc.get("density", {}), "fraction": args.density_fraction}
    if getattr(args, "learner", None) is not None:
        doc["learner"] = {**doc.get("learner", {}), "kind": args.learner}
    conf = dict(doc.get("confair", {}))
    for key in ("alpha_u", "alpha_w", "alpha_grid", "target"):
        value = getattr(args, key, None)
        if value is not None:
            conf[key] = value
    doc["confair"] = conf
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    if getattr(args, "repeats", None) is not None:
        doc["repeats"] = args.repeats
    if args.command == "experiment" and args.method:
        doc["methods"] = [m.strip() for m in args.method.split(",") if m.strip()]
    if getattr(args, "out", None) is not None:
        doc["out"] = args.out
    return doc


def resolve_config(args):
    try:
        return ExperimentConfig.from_dict(_merged_doc(args))
    except TypeError as exc:
        raise ConfigError(f"bad config field: {exc}") from None


def _out_path(cfg, default):
    path = Path(cfg.out or default)
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


# -- commands ---------------------------------------------------------------

def cmd_synth(args):
    doc = _load_config(args)
    fields = dict(doc.get("data", {}).get("synth") or {})
    for name in ("n_major", "n_minor", "dims", "separation", "noise_sd", "minority_shift", "drift_mode"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    if args.seed is not None:
        fields["seed"] = args.seed
    try:
        cfg = SynthConfig(**fields)
    except TypeError as exc:
        raise ConfigError(f"bad synth field: {exc}") from None
    path = Path(args.out or doc.get("out") or "synth.csv")
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    generate_frame(cfg).to_csv(path, index=False)
    return f"wrote {cfg.n_major + cfg.n_minor} rows to {path}"


def cmd_profile(args):
    cfg = resolve_config(args)
    d = cfg.data.load()
    profiles = conformance.profile_cells(d, None, cfg.density.fraction)
    path = _out_path(cfg, "constraints.txt")
    path.write_text(conformance.dumps([cs for cs, _ in profiles.values()]) + "\n")
    return f"wrote {len(profiles)} constraint sets to {path}"


def cmd_reweigh(args):
    """Fixed alphas weigh every row; a grid tunes on a seeded split and weighs its training rows."""
    cfg = resolve_config(args)
    d = cfg.data.load()
    if cfg.alpha_u is not None:
        rows = np.arange(d.n)
        ccfg = resolve_confair(cfg, d, None)
    else:
        splits = split(d, cfg.base_seed)
        rows = splits.train
        ccfg = resolve_confair(cfg, d, splits)
    a = confair.assign_weights(d, rows, ccfg)
    frame = d.frame.iloc[rows].copy() if d.frame is not None else pd.DataFrame(d.numeric[rows])
    frame["weight"] = a.weights
    frame["conforming"] = a.conforming.astype(np.int8)
    path = _out_path(cfg, "weighted.csv")
    frame.to_csv(path, index=False)
    return f"wrote {len(frame)} weighted rows to {path} (alpha_u={ccfg.alpha_u}, alpha_w={ccfg.alpha_w})"


def _model_doc(method, d, splits, cfg):
    meta = {}
    if method == "none":
        model = {"learner": learner.model_to_dict(baselines.no_intervention_fit(d, splits, cfg.learner))}
    elif method == "kam":
        w = baselines.kam_weights(d, splits.train)
        model = {"learner": learner.model_to_dict(learner.train(d, splits.train, w, cfg.learner))}
    elif method == "confair":
        ccfg = resolve_confair(cfg, d, splits)
        model = {"learner": learner.model_to_dict(confair.confair_fit(d, splits, cfg.learner, ccfg))}
        meta = {"alpha_u": ccfg.alpha_u, "alpha_w": ccfg.alpha_w}
    elif method == "multimodel":
        pair = baselines.multimodel_fit(d, splits, cfg.learner)
        model = {"f_w": learner.model_to_dict(pair.f_w), "f_u": learner.model_to_dict(pair.f_u)}
    else:
        model = {"diffair": diffair.to_dict(diffair.fit(d, splits, cfg.density, cfg.learner))}
    return {"method": method, "seed": splits.seed, **meta, **model}


def load_model(doc):
    """Return ``predict(features, groups)`` for a document written by ``train``."""
    method = doc["method"]
    if method in ("none", "kam", "confair"):
        m = learner.model_from_dict(doc["learner"])
        return lambda X, g: m.predict(X)
    if method == "multimodel":
        pair = MultiModelPair(learner.model_from_dict(doc["f_w"]), learner.model_from_dict(doc["f_u"]))
        return lambda X, g: baselines.multimodel_predict(pair, X, g)
    if method == "diffair":
        m = diffair.from_dict(doc["diffair"])
        return lambda X, g: m.predict(X)
    raise ConfigError(f"unknown method {method!r} in model file")


def cmd_train(args):
    cfg = resolve_config(args)
    d = cfg.data.load()
    splits = split(d, cfg.base_seed)
    doc = _model_doc(args.method, d, splits, cfg)
    path = _out_path(cfg, "model.json")
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return f"wrote {args.method} model to {path}"


def cmd_evaluate(args):
    cfg = resolve_config(args)
    doc = json.loads(Path(args.model).read_text())
    d = cfg.data.load()
    seed = cfg.base_seed if args.seed is not None else doc.get("seed", cfg.base_seed)
    te = split(d, seed).test
    preds = load_model(doc)(d.features[te], d.groups[te])
    report = evaluate(d.labels[te], preds, d.groups[te], metadata={"method": doc["method"], "seed": seed})
    rec = report.to_record()
    rec["group_rates"] = {g: asdict(r) for g, r in report.group_rates.items()}
    text = json.dumps(rec, indent=2, sort_keys=True)
    if cfg.out:
        _out_path(cfg, "report.json").write_text(text + "\n")
    return text


def cmd_experiment(args):
    cfg = resolve_config(args)
    result = run_experiment(cfg, log=lambda msg: print(msg, file=sys.stderr))
    out = write_outputs(result, cfg.out or "results", cfg)
    return result.summary.to_string(index=False) + f"\n\nwrote runs.csv, summary.csv, report.json to {out}"


COMMANDS = {
    "synth": cmd_synth, "profile": cmd_profile, "reweigh": cmd_reweigh,
    "train": cmd_train, "evaluate": cmd_evaluate, "experiment": cmd_experiment,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        message = COMMANDS[args.command](args)
    except (ConformFairError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if message:
        print(message)
    return 0


if __name__ == "__main__":
    sys.exit(main())
