"""Report emission: CSV/JSON artifacts and comparison-table rendering.

summary.json carries only deterministic quantities so re-running a config
byte-reproduces it; wall-clock latencies go to timing.json and the CSVs.
"""

import csv
import json
import os
from typing import Optional

from .baselines import SEQ_MEMBER_NOTE
from .harness import RunResult, ablation_table
from .metrics import cohen_d, mean_ci, welch_t

_EXCLUDED_METRIC_NOTE = "prediction-horizon coverage omitted: no accepted definition"


def _write_csv(path: str, header_note: str, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {header_note}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def emit_run(result: RunResult, outdir: str, label: Optional[str] = None) -> dict:
    """Write the full artifact set for one system run; returns file paths."""
    os.makedirs(outdir, exist_ok=True)
    label = label or result.config.system
    paths = {}

    cols = [
        "system",
        "seed",
        "iteration",
        "f1",
        "precision",
        "recall",
        "accuracy",
        "roc_auc",
        "delta_f1",
        "latency_ms",
        "policy",
    ]
    rows = []
    for r in result.seed_results():
        for rep in r.reports:
            rows.append(
                [
                    label,
                    r.seed,
                    rep.iteration,
                    rep.f1,
                    rep.precision,
                    rep.recall,
                    rep.accuracy,
                    rep.roc_auc,
                    rep.delta_f1,
                    rep.latency_ms,
                    json.dumps(rep.policy, sort_keys=True, default=float),
                ]
            )
    paths["iterations"] = os.path.join(outdir, f"iterations_{label}.csv")
    _write_csv(paths["iterations"], SEQ_MEMBER_NOTE, cols, rows)

    traj_rows = []
    for r in result.seed_results():
        for entry in r.policy_trajectory:
            traj_rows.append(
                [r.seed]
                + [entry.get(k, "") for k in ("iteration", "w1", "w2", "rho", "tau", "f1")]
            )
    paths["policy"] = os.path.join(outdir, f"policy_{label}.csv")
    _write_csv(
        paths["policy"],
        SEQ_MEMBER_NOTE,
        ["seed", "iteration", "w1", "w2", "rho", "tau", "f1"],
        traj_rows,
    )

    summary = result.summary(include_latency=False)
    summary["footnotes"] = [_EXCLUDED_METRIC_NOTE]
    paths["summary"] = os.path.join(outdir, f"summary_{label}.json")
    with open(paths["summary"], "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=float)

    paths["timing"] = os.path.join(outdir, f"timing_{label}.json")
    with open(paths["timing"], "w") as fh:
        json.dump(result.timing(), fh, indent=2, sort_keys=True)

    for r in result.seed_results():
        if r.rendered_plans:
            p = os.path.join(outdir, f"actions_{label}_seed{r.seed}.txt")
            with open(p, "w") as fh:
                fh.write(f"# {SEQ_MEMBER_NOTE}\n\n")
                fh.write("\n".join(r.rendered_plans))
            paths.setdefault("actions", []).append(p)
    return paths


def comparison_text(results: dict, dataset: str) -> str:
    """Three-system comparison table (text)."""
    lines = [
        f"# {SEQ_MEMBER_NOTE}",
        f"# {_EXCLUDED_METRIC_NOTE}",
        "",
        f"{'System':<12} {'Dataset':<14} {'F1':>8} {'Prec':>8} {'Recall':>8} "
        f"{'ROC-AUC':>8} {'dF1':>9} {'Lat(ms)':>9}",
        "-" * 80,
    ]
    for name, res in results.items():
        s = res.summary()["metrics"]
        lat = [rep.latency_ms for r in res.seed_results() for rep in r.reports]
        mean_lat = sum(lat) / len(lat)
        lines.append(
            f"{name:<12} {dataset:<14} {s['f1']['mean']:>8.4f} {s['precision']['mean']:>8.4f} "
            f"{s['recall']['mean']:>8.4f} {s['roc_auc']['mean']:>8.4f} "
            f"{s['delta_f1']['mean']:>+9.4f} {mean_lat:>9.3f}"
        )
    lines.append("")
    for name, res in results.items():
        s = res.summary()["metrics"]
        lines.append(
            f"{name}: F1 = {s['f1']['mean']:.4f} +- {s['f1']['ci95']:.4f} (95% CI over seeds)"
        )
    return "\n".join(lines) + "\n"


def stats_rows(results: dict) -> list:
    """Welch t / p / Cohen's d for every ordered system pair, on per-seed F1."""
    rows = []
    names = list(results)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            fa = results[a].summary()["metrics"]["f1"]["per_seed"]
            fb = results[b].summary()["metrics"]["f1"]["per_seed"]
            res = welch_t(fa, fb)
            d = cohen_d(fa, fb)
            rows.append(
                {
                    "comparison": f"{a} vs {b}",
                    "delta_f1_mean": float(sum(fa) / len(fa) - sum(fb) / len(fb)),
                    "t": res.t,
                    "dof": res.dof,
                    "p": res.p,
                    "cohen_d": d,
                    "significant": res.p < 0.05,
                }
            )
    return rows


def emit_comparison(results: dict, outdir: str, dataset: str) -> dict:
    os.makedirs(outdir, exist_ok=True)
    paths = {}
    for name, res in results.items():
        emit_run(res, outdir, label=name)
    paths["comparison"] = os.path.join(outdir, "comparison.txt")
    with open(paths["comparison"], "w") as fh:
        fh.write(comparison_text(results, dataset))
    rows = stats_rows(results)
    paths["stats"] = os.path.join(outdir, "stats.csv")
    _write_csv(
        paths["stats"],
        SEQ_MEMBER_NOTE,
        ["comparison", "delta_f1_mean", "t", "dof", "p", "cohen_d", "significant"],
        [[r[k] for k in ("comparison", "delta_f1_mean", "t", "dof", "p", "cohen_d", "significant")] for r in rows],
    )
    return paths


def emit_ablation(results: dict, outdir: str) -> dict:
    os.makedirs(outdir, exist_ok=True)
    paths = {}
    for name, res in results.items():
        emit_run(res, outdir, label=f"ablation_{name}")
    rows = ablation_table(results)
    paths["ablation"] = os.path.join(outdir, "ablation.csv")
    _write_csv(
        paths["ablation"],
        SEQ_MEMBER_NOTE,
        ["configuration", "f1", "impact_pct", "precision"],
        [[r["configuration"], r["f1"], r["impact_pct"], r["precision"]] for r in rows],
    )
    return paths
