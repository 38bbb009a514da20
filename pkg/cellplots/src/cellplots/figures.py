"""Figure construction from simulator CSV exports.

Every kind reads one CSV produced by the lightcell CLI: the sweep kinds
consume summary.csv written by --sweep, the trajectory kinds consume
slots.csv from a single run. Loading is split from drawing so the curve
data can be checked without rendering anything.
"""

import csv
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402


class PlotInputError(ValueError):
    """Unusable input data; the message names the file and the problem."""


SLOTS_FILE = "slots.csv"
SUMMARY_FILE = "summary.csv"

# kind -> (csv file inside the run directory, columns the kind needs)
KIND_INPUTS = {
    "rate-vs-alpha": (SUMMARY_FILE, ("algo", "axis", "value", "rep", "mean_rate_bps")),
    "esr-vs-theta": (SUMMARY_FILE, ("algo", "axis", "value", "rep", "mean_esr_bps")),
    "bar-sweep": (SUMMARY_FILE, ("algo", "axis", "value", "rep", "mean_esr_bps")),
    "rate-cdf": (SLOTS_FILE, ("t", "user", "rate_bps")),
    "backlog-traces": (SLOTS_FILE, ("t", "user", "F")),
    "esr-convergence": (SLOTS_FILE, ("t", "user", "esr_running_bps")),
    "normalized-backlog": (SLOTS_FILE, ("t", "user", "F")),
}

KINDS = tuple(KIND_INPUTS)


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self):
        if self.kind not in KIND_INPUTS:
            raise PlotInputError(
                f"unknown figure kind {self.kind!r}, expected one of {', '.join(KINDS)}"
            )
        if not self.inputs:
            raise PlotInputError("figure spec needs at least one input CSV")
        for path in self.inputs:
            if not os.path.isfile(path):
                raise PlotInputError(f"input file not found: {path}")


def load_table(path: str, needed: tuple[str, ...]) -> list[dict]:
    """Rows as dicts; raises if a needed column is absent or no data rows."""
    name = os.path.basename(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in needed:
            if col not in header:
                raise PlotInputError(f"{name}: missing column {col!r}")
        rows = list(reader)
    if not rows:
        raise PlotInputError(f"{name}: no rows")
    return rows


# ---------------------------------------------------------------------------
# curve data


def cdf_curve(values) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF: sorted sample points and cumulative fractions."""
    x = np.sort(np.asarray(values, dtype=float))
    y = np.arange(1, x.size + 1) / x.size
    return x, y


def per_user_traces(rows: list[dict], column: str, source: str):
    """(sorted slot numbers, {user: values in slot order}) from slots.csv rows."""
    slots = sorted({int(r["t"]) for r in rows})
    index = {t: i for i, t in enumerate(slots)}
    traces: dict[int, np.ndarray] = {}
    for r in rows:
        j = int(r["user"])
        if j not in traces:
            traces[j] = np.full(len(slots), np.nan)
        traces[j][index[int(r["t"])]] = float(r[column])
    for j, vals in traces.items():
        if np.isnan(vals).any():
            raise PlotInputError(f"{source}: user {j} is missing slots")
    return np.asarray(slots), dict(sorted(traces.items()))


def sweep_series(rows: list[dict], ycol: str, source: str, expect_axis: str | None = None):
    """Per-value rep scatter and rep means for a single-axis sweep summary."""
    axes = {r["axis"] for r in rows}
    if len(axes) != 1:
        raise PlotInputError(f"{source}: mixed sweep axes {sorted(axes)}, expected one")
    axis = axes.pop()
    if expect_axis is not None and axis != expect_axis:
        raise PlotInputError(f"{source}: expected a {expect_axis!r} sweep, found axis {axis!r}")
    points = [(float(r["value"]), float(r[ycol])) for r in rows]
    values = sorted({v for v, _ in points})
    means = [float(np.mean([y for v, y in points if v == value])) for value in values]
    algos = sorted({r["algo"] for r in rows})
    return axis, np.asarray(values), np.asarray(means), points, algos


# ---------------------------------------------------------------------------
# rendering


def _new_axes():
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.grid(True, alpha=0.3)
    return fig, ax


def _scatter_and_mean(ax, points, values, means):
    xs = [v for v, _ in points]
    ys = [y for _, y in points]
    ax.plot(xs, ys, "o", color="#888888", markersize=4, alpha=0.6, label="per repetition")
    ax.plot(values, means, "o-", color="#1f77b4", label="mean over repetitions")
    ax.legend()


def render(spec: FigureSpec) -> str:
    """Draw one figure and write it to spec.output; returns the output path."""
    source = os.path.basename(spec.inputs[0])
    rows = load_table(spec.inputs[0], KIND_INPUTS[spec.kind][1])
    fig, ax = _new_axes()
    try:
        if spec.kind == "rate-vs-alpha":
            _, values, means, points, algos = sweep_series(
                rows, "mean_rate_bps", source, expect_axis="alpha_fixed"
            )
            _scatter_and_mean(ax, points, values, means)
            ax.set_xlabel("power separation factor alpha")
            ax.set_ylabel("mean secrecy rate (bits/s)")
            ax.set_title(f"rate vs power split ({', '.join(algos)})")
        elif spec.kind == "esr-vs-theta":
            _, values, means, points, algos = sweep_series(
                rows, "mean_esr_bps", source, expect_axis="theta"
            )
            _scatter_and_mean(ax, points, values, means)
            ax.set_xscale("log")
            ax.set_xlabel("QoS exponent theta (1 per bits/s)")
            ax.set_ylabel("mean ESR (bits/s)")
            ax.set_title(f"ESR vs delay exponent ({', '.join(algos)})")
        elif spec.kind == "bar-sweep":
            axis, values, means, _, algos = sweep_series(rows, "mean_esr_bps", source)
            ax.bar([str(v) for v in values], means, color="#1f77b4", width=0.6)
            ax.set_xlabel(axis)
            ax.set_ylabel("mean ESR (bits/s)")
            ax.set_title(f"mean ESR by {axis} ({', '.join(algos)})")
        elif spec.kind == "rate-cdf":
            x, y = cdf_curve([float(r["rate_bps"]) for r in rows])
            ax.step(x, y, where="post", color="#1f77b4")
            ax.set_xlabel("per-slot secrecy rate (bits/s)")
            ax.set_ylabel("empirical CDF")
            ax.set_ylim(0.0, 1.02)
            ax.set_title("rate distribution over slots and users")
        elif spec.kind == "backlog-traces":
            slots, traces = per_user_traces(rows, "F", source)
            for j, vals in traces.items():
                ax.plot(slots, vals, label=f"user {j}", linewidth=1.2)
            ax.set_xlabel("slot")
            ax.set_ylabel("virtual queue backlog F")
            ax.set_title("queue backlog per user")
            ax.legend(fontsize=7, ncols=2)
        elif spec.kind == "esr-convergence":
            slots, traces = per_user_traces(rows, "esr_running_bps", source)
            for j, vals in traces.items():
                ax.plot(slots, vals, label=f"user {j}", linewidth=1.2)
            ax.set_xlabel("slot")
            ax.set_ylabel("running ESR (bits/s)")
            ax.set_title("ESR convergence per user")
            ax.legend(fontsize=7, ncols=2)
        else:  # normalized-backlog
            slots, traces = per_user_traces(rows, "F", source)
            denom = np.asarray(slots, dtype=float) + 1.0  # F after slot t spans t+1 slots
            for j, vals in traces.items():
                ax.plot(slots, vals / denom, label=f"user {j}", linewidth=1.2)
            ax.set_xlabel("slot")
            ax.set_ylabel("normalized backlog F(t)/t")
            ax.set_title("normalized queue backlog per user")
            ax.legend(fontsize=7, ncols=2)
        fig.tight_layout()
        fig.savefig(spec.output, dpi=150)
    finally:
        plt.close(fig)
    return spec.output
