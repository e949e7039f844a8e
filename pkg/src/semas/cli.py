"""Command-line harness: run / ablate / compare / gen-data.

A JSON config file (--config) overrides any flag it names.  Failures exit
nonzero after printing a machine-readable error record to stderr.
"""

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import datagen
from .errors import ConfigError, SemasError
from .harness import RunConfig, run_ablation_suite, run_experiment
from .reports import emit_ablation, emit_comparison, emit_run


def _parse_seeds(raw: str):
    return tuple(int(s) for s in raw.split(",") if s.strip())


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="profile name (boiler, wind, boiler-small) or CSV path")
    p.add_argument("--seeds", type=_parse_seeds, help="comma-separated, e.g. 42,123,456")
    p.add_argument("--iterations", type=int)
    p.add_argument("--out", dest="out_dir", help="output directory for reports")
    p.add_argument("--workers", type=int, help="parallel seed pipelines")
    p.add_argument("--shift", dest="shift_magnitude", type=float, help="mid-stream feature shift")
    p.add_argument("--config", help="JSON config file; overrides flags")


def _build_config(args: argparse.Namespace, system: str = None) -> RunConfig:
    flag_fields = (
        "dataset",
        "seeds",
        "iterations",
        "out_dir",
        "workers",
        "shift_magnitude",
        "system",
        "ablations",
        "lstm_epochs",
        "rul_epochs",
        "tau_init",
        "cloud_slowdown",
        "fog_instances",
    )
    raw = {}
    for key in flag_fields:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    if system is not None:
        raw["system"] = system
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        raw.update(file_cfg)  # the config file wins over flags
    return RunConfig.from_dict(raw)


def cmd_run(args) -> int:
    cfg = _build_config(args)
    result = run_experiment(cfg)
    summary = result.summary()
    if cfg.out_dir:
        paths = emit_run(result, cfg.out_dir)
        print(json.dumps({"status": "ok", "files": paths}, indent=2, default=str))
    else:
        print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return 0


def cmd_ablate(args) -> int:
    cfg = _build_config(args, system="semas")
    results = run_ablation_suite(cfg)
    if cfg.out_dir:
        paths = emit_ablation(results, cfg.out_dir)
        print(json.dumps({"status": "ok", "files": paths}, indent=2, default=str))
    else:
        from .harness import ablation_table

        print(json.dumps(ablation_table(results), indent=2, default=float))
    return 0


def cmd_compare(args) -> int:
    cfg = _build_config(args)
    results = {}
    for system in ("semas", "baseline1", "baseline2"):
        results[system] = run_experiment(replace(cfg, system=system))
    if cfg.out_dir:
        paths = emit_comparison(results, cfg.out_dir, cfg.dataset)
        print(json.dumps({"status": "ok", "files": paths}, indent=2, default=str))
    else:
        from .reports import comparison_text

        print(comparison_text(results, cfg.dataset))
    return 0


def cmd_gen_data(args) -> int:
    name = args.profile
    if name not in datagen.PROFILES:
        raise ConfigError(f"unknown profile {name!r}; choose from {sorted(datagen.PROFILES)}")
    profile = datagen.PROFILES[name].with_seed(args.seed)
    ds = datagen.generate(profile)
    # record the stratified split indices in the manifest
    labels = ds.labels
    idx_train, idx_test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        k = int(round(profile.split * len(idx)))
        idx_train += idx[:k].tolist()
        idx_test += idx[k:].tolist()
    manifest = {
        "profile": name,
        "seed": args.seed,
        "split": profile.split,
        "train_indices": sorted(idx_train),
        "test_indices": sorted(idx_test),
        "anomaly_prevalence": profile.anomaly_prevalence,
    }
    datagen.save_dataset(ds, args.out, manifest)
    print(json.dumps({"status": "ok", "csv": args.out, "manifest": args.out + ".manifest.json"}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one system over the iteration protocol")
    _add_common(p_run)
    p_run.add_argument("--system", choices=("semas", "baseline1", "baseline2"))
    p_run.add_argument(
        "--ablate",
        dest="ablations",
        type=lambda s: tuple(x for x in s.split(",") if x),
        help="comma list: no_ppo,no_consensus,no_federated,no_response",
    )
    p_run.set_defaults(func=cmd_run)

    p_ab = sub.add_parser("ablate", help="full ablation suite on the adaptive system")
    _add_common(p_ab)
    p_ab.set_defaults(func=cmd_ablate)

    p_cmp = sub.add_parser("compare", help="run all three systems and emit comparison tables")
    _add_common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_gen = sub.add_parser("gen-data", help="generate a synthetic dataset CSV + manifest")
    p_gen.add_argument("--profile", default="boiler")
    p_gen.add_argument("--seed", type=int, default=42)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SemasError as exc:
        print(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
