#!/usr/bin/env python3
"""Render standard figures from a completed run directory.

Reads only the CSV/JSON artifacts written by `blowuplab run` (series.csv,
snapshots.csv, traces.csv, summary.json, diagnostics.json); it never imports
the solver package, so figures can be regenerated from archived results.

Usage:
    python plots/render.py --in RUNDIR --fig {characteristics|profiles|riccati|scaling} --out FILE
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURES = ("characteristics", "profiles", "riccati", "scaling")


def _read_csv(path: Path) -> dict:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    head, body = rows[0], rows[1:]
    cols = {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(head) if h != "label"}
    if "label" in head:
        i = head.index("label")
        cols["label"] = np.array([r[i] for r in body])
    return cols


def _snapshots_by_time(rundir: Path):
    data = _read_csv(rundir / "snapshots.csv")
    times = np.unique(data["t"])
    frames = []
    for t in times:
        sel = data["t"] == t
        frames.append({k: v[sel] for k, v in data.items()})
    return times, frames


def fig_characteristics(rundir: Path, ax):
    """Space-time view: max-S history plus traced characteristic paths."""
    times, frames = _snapshots_by_time(rundir)
    x = frames[0]["x"]
    S = np.vstack([f["S"] for f in frames])
    pc = ax.pcolormesh(x, times, S, shading="nearest", cmap="magma", rasterized=True)
    plt.colorbar(pc, ax=ax, label="S")
    traces = rundir / "traces.csv"
    if traces.exists():
        data = _read_csv(traces)
        for label in np.unique(data["label"]):
            sel = data["label"] == label
            ax.plot(data["x"][sel], data["t"][sel], "w--", lw=1.2, label=str(label))
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title("characteristic paths over S(x, t)")


def fig_profiles(rundir: Path, ax):
    """Snapshots of rho and S at a handful of times."""
    times, frames = _snapshots_by_time(rundir)
    picks = np.unique(np.linspace(0, len(frames) - 1, 5).astype(int))
    for i in picks:
        ax.plot(frames[i]["x"], frames[i]["rho"], lw=1.0, label=f"t={times[i]:.3g}")
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\rho$")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax2 = ax.twinx()
    for i in picks:
        ax2.plot(frames[i]["x"], frames[i]["S"], lw=0.8, ls=":")
    ax2.set_ylabel("S (dotted)")
    ax.set_title("density collapse and invariant growth")


def fig_riccati(rundir: Path, ax):
    """1/max S against t with the affine fit and the comparison-ODE bracket."""
    series = _read_csv(rundir / "series.csv")
    t, s = series["t"], series["s_max"]
    ax.plot(t, 1.0 / s, "k-", lw=1.2, label=r"$1/\max S$")
    diag_path = rundir / "diagnostics.json"
    if diag_path.exists():
        diag = json.loads(diag_path.read_text())
        est = diag.get("blowup", {})
        if "t_extrap" in est:
            tt = np.linspace(t[0], est["t_extrap"], 100)
            ax.plot(tt, est["slope"] * tt + est["intercept"], "r--", lw=1.0,
                    label=f"affine fit, $t_*\\approx{est['t_extrap']:.3g}$")
            ax.axvline(est["t_extrap"], color="r", lw=0.6, alpha=0.6)
        br = diag.get("oracle_bracket")
        if br:
            ax.axvspan(br["t_upper"], br["t_lower"], color="C0", alpha=0.15,
                       label="ODE bracket")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$1/\max S$")
    ax.set_ylim(bottom=0.0)
    ax.legend(fontsize=8)
    ax.set_title("Riccati-type divergence of the invariant peak")


def fig_scaling(rundir: Path, ax):
    """max S against (t* - t): slope -1 on log-log is the Riccati rate."""
    series = _read_csv(rundir / "series.csv")
    t, s = series["t"], series["s_max"]
    diag = json.loads((rundir / "diagnostics.json").read_text())
    est = diag.get("blowup", {})
    t_star = est.get("t_extrap", float(t[-1]) * 1.01)
    sel = (t_star - t > 0) & (s > 2.0 * s[0])
    if not np.any(sel):
        sel = t_star - t > 0
    ax.loglog(t_star - t[sel], s[sel], "k.", ms=3, label=r"$\max S$")
    tau = t_star - t[sel]
    ref = s[sel][-1] * tau[-1] / tau
    ax.loglog(tau, ref, "r--", lw=1.0, label=r"slope $-1$")
    ax.invert_xaxis()
    ax.set_xlabel(r"$t_* - t$")
    ax.set_ylabel(r"$\max S$")
    ax.legend(fontsize=8)
    ax.set_title("growth-rate scaling toward blowup")


RENDERERS = {
    "characteristics": fig_characteristics,
    "profiles": fig_profiles,
    "riccati": fig_riccati,
    "scaling": fig_scaling,
}


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--in", dest="rundir", required=True, help="run directory")
    p.add_argument("--fig", required=True, choices=FIGURES)
    p.add_argument("--out", required=True, help="output image file")
    args = p.parse_args(argv)

    rundir = Path(args.rundir)
    if not (rundir / "series.csv").exists():
        print(f"error: {rundir} is not a completed run directory", file=sys.stderr)
        return 2

    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    RENDERERS[args.fig](rundir, ax)
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
