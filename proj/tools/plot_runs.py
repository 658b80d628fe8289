#!/usr/bin/env python3
"""Static plots from bgdbs run directories (optional; needs matplotlib).

    plot_runs.py RUN_DIR [RUN_DIR ...] --out plots/

Recognized inputs in each run directory:
  curve_run*.csv  learning curves          -> learning_curves.png
  trace.jsonl     per-window step records  -> sgi_trace_<dir>.png
  report.csv      condition summaries      -> report_<dir>.png
"""

import argparse
import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_versioned_csv(path, header):
    with open(path, newline="") as f:
        first = f.readline().strip()
        if first != header:
            raise SystemExit(f"{path}: expected '{header}', got '{first}'")
        return list(csv.DictReader(f))


def plot_curves(run_dirs, out):
    fig, ax = plt.subplots(figsize=(7, 4))
    found = False
    for d in run_dirs:
        for path in sorted(Path(d).glob("curve_run*.csv")):
            rows = read_versioned_csv(path, "# bgdbs-curve v1")
            steps = [int(r["steps"]) for r in rows]
            ax.plot(steps, [float(r["return"]) for r in rows], alpha=0.25, lw=0.8)
            ax.plot(steps, [float(r["moving_average"]) for r in rows], label=f"{Path(d).name}/{path.stem}")
            found = True
    if not found:
        plt.close(fig)
        return
    ax.set_xlabel("environment steps")
    ax.set_ylabel("episode return")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out / "learning_curves.png", dpi=120)
    plt.close(fig)


def plot_trace(run_dir, out):
    path = Path(run_dir) / "trace.jsonl"
    if not path.exists():
        return
    rows = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
    x = range(len(rows))
    fig, (a1, a2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    a1.plot(x, [r["r1_raw"] for r in rows], marker=".")
    a1.set_ylabel("S_Gi 1-20 Hz power")
    a2.step(x, [r["frequency_hz"] for r in rows], where="post", label="frequency (Hz)")
    a2.step(x, [r["amplitude"] / 100.0 for r in rows], where="post", label="amplitude / 100")
    a2.set_xlabel("control window")
    a2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out / f"sgi_trace_{Path(run_dir).name}.png", dpi=120)
    plt.close(fig)


def plot_report(run_dir, out):
    path = Path(run_dir) / "report.csv"
    if not path.exists():
        return
    rows = read_versioned_csv(path, "# bgdbs-report v1")
    labels = [r["label"] for r in rows]
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.5))
    for ax, key, title in zip(axes, ["sgi", "vgi", "rms"],
                              ["S_Gi 1-20 Hz power", "V_Gi 13-30 Hz power", "RMS power"]):
        ax.bar(labels, [float(r[f"{key}_mean"]) for r in rows],
               yerr=[float(r[f"{key}_sd"]) for r in rows], capsize=3)
        ax.set_title(title, fontsize=9)
        ax.tick_params(axis="x", labelrotation=30, labelsize=8)
    fig.tight_layout()
    fig.savefig(out / f"report_{Path(run_dir).name}.png", dpi=120)
    plt.close(fig)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("runs", nargs="+", help="run directories written by bgdbs")
    ap.add_argument("--out", default="plots", help="image directory")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    plot_curves(args.runs, out)
    for d in args.runs:
        plot_trace(d, out)
        plot_report(d, out)


if __name__ == "__main__":
    main()
