"""CSV / JSON / SVG output.

CSV files have a header row, comma separators, LF line endings and floats
written with 17 significant digits so that re-reading reproduces the exact
doubles.  JSON uses Python's shortest round-trip float repr.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .abm import Trajectory

__all__ = [
    "fmt",
    "write_csv",
    "read_csv",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_json",
    "read_json",
    "to_jsonable",
    "write_svg_scatter",
]


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [row for row in r]
    return header, rows


def write_trajectory_csv(path, traj: Trajectory) -> None:
    n = traj.states.shape[1]
    header = ["t"] + [f"x{i + 1}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for t, row in zip(traj.times, traj.states):
            fh.write(fmt(t) + "," + ",".join(fmt(v) for v in row) + "\n")


def read_trajectory_csv(path) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Trajectory(data[:, 0].copy(), data[:, 1:].copy())


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def write_svg_scatter(path, x, y, xlabel: str, ylabel: str, title: str = "", line: bool = False, c=None) -> None:
    """Static scatter or line plot as SVG (presentation only)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "fopwc"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if line:
        ax.plot(x, y, lw=0.6)
    else:
        ax.scatter(x, y, s=0.5, c=c, cmap="coolwarm" if c is not None else None)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
