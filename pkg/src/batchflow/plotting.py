"""Figure rendering for the report command.

Reads result rows (suite or scaling runs) and writes PNG figures next to an
aggregated CSV.  Kept out of the bench harness on purpose: the harness emits
delimited data only, this module is the presentation layer.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import aggregate_rows, write_aggregate_csv


def render_suite_report(rows, outdir, time_limit_s=None) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    aggregates = aggregate_rows(rows, time_limit_s)
    written = []

    agg_csv = outdir / "summary.csv"
    write_aggregate_csv(aggregates, agg_csv)
    written.append(agg_csv)

    configs = list(dict.fromkeys(a["config"] for a in aggregates))
    backends = list(dict.fromkeys(a["backend"] for a in aggregates))
    by_key = {(a["config"], a["backend"]): a for a in aggregates}

    def grouped_bars(field, title, fname, log=False):
        fig, ax = plt.subplots(figsize=(max(6, 1.6 * len(configs)), 4))
        width = 0.8 / max(1, len(backends))
        for bi, backend in enumerate(backends):
            xs, ys = [], []
            for ci, config in enumerate(configs):
                agg = by_key.get((config, backend))
                if agg is None or agg[field] is None:
                    continue
                val = agg[field]
                if val == float("inf"):
                    continue
                xs.append(ci + bi * width)
                ys.append(val)
            ax.bar(xs, ys, width=width, label=backend)
        ax.set_xticks([i + 0.4 - width / 2 for i in range(len(configs))])
        ax.set_xticklabels(configs, rotation=30, ha="right", fontsize=8)
        ax.set_title(title)
        if log:
            ax.set_yscale("log")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = outdir / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    grouped_bars("mean_time_s", "Mean solve time (timeouts at the limit)", "mean_time.png")
    grouped_bars("num_optimal", "Instances solved to optimality", "num_optimal.png")
    grouped_bars("mean_gap", "Mean relative gap", "mean_gap.png")
    return written


def render_scaling_report(rows, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    ns = [r["n"] for r in rows]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(ns, [max(r["construct_s"], 1e-6) for r in rows], "o-", label="construction")
    ax.loglog(ns, [max(r["solve_s"], 1e-6) for r in rows], "s-", label="solve")
    ax.loglog(ns, [max(r["generate_s"], 1e-6) for r in rows], "^-", label="generation")
    ax.set_xlabel("jobs")
    ax.set_ylabel("seconds")
    ax.set_title("Phase timings vs instance size")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = outdir / "scaling_times.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(ns, [r["flow_variables"] for r in rows], "o-", label="variables")
    ax.semilogx(ns, [r["flow_constraints"] for r in rows], "s-", label="constraints")
    ax.set_xlabel("jobs")
    ax.set_ylabel("count")
    ax.set_title("Flow model size vs instance size")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = outdir / "scaling_model_size.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
