"""Figure rendering for sweep results (headless, PNG files only)."""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scenario import ScenarioError

AXIS_LABELS = {
    "distance_m": "distance (m)",
    "squeezing_db": "squeezing (dB)",
    "beta": "reconciliation efficiency",
    "efficiency": "detector efficiency",
    "rain_rate_mm_h": "rain rate (mm/h)",
    "visibility_km": "visibility (km)",
}


def _group_label(band, extra):
    parts = [band]
    parts += ["%s=%g" % (var, val) for var, val in extra]
    return ", ".join(parts)


def sweep_figure(scenario, rows, table_path):
    """Render key rate vs the first sweep axis; returns the PNG path.

    One line per (band, remaining-axis-values) combination; non-positive
    rates are masked so the log-scale plot shows the secure range only.
    """
    if not scenario.sweep:
        raise ScenarioError("plotting needs at least one sweep axis")
    x_axis = scenario.sweep[0]
    extra_vars = [ax.variable for ax in scenario.sweep[1:]]

    groups = {}
    for row in rows:
        band = row.scenario.rsplit("/", 1)[-1]
        key = (band, tuple(zip(extra_vars, row.axes[1:])))
        groups.setdefault(key, []).append((row.axes[0], row.R_bits_s))

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    any_positive = False
    for (band, extra), pts in sorted(groups.items()):
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts], dtype=float)
        ys = np.where(ys > 0.0, ys, np.nan)
        any_positive = any_positive or np.any(np.isfinite(ys))
        ax.plot(xs, ys, label=_group_label(band, extra))
    if x_axis.scale == "log":
        ax.set_xscale("log")
    if any_positive:
        ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS.get(x_axis.variable, x_axis.variable))
    ax.set_ylabel("key rate (bit/s)")
    ax.set_title(scenario.name)
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=8)
    fig.tight_layout()

    png = os.path.splitext(table_path)[0] + ".png"
    fig.savefig(png, dpi=150)
    plt.close(fig)
    return png
