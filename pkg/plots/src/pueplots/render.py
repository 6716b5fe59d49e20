"""Render experiment CSVs into the standard figure styles.

Consumes only the simulator's CSV schema
(``t,mean_regret,std_regret,mean_gain,mean_su_traffic,upper_bound,lower_bound``);
rendering is read-only over the inputs and deterministic given the theme.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import theme  # noqa: E402

KINDS = ("regret_vs_t", "regret_vs_K", "m_sweep", "traffic")

REQUIRED_COLUMNS = ("t", "mean_regret", "std_regret", "mean_gain",
                    "mean_su_traffic", "upper_bound", "lower_bound")

# Overlay kinds draw several CSVs on one checkpoint grid.
_OVERLAY_KINDS = {"regret_vs_t", "m_sweep", "traffic"}


@dataclass
class PlotSpec:
    kind: str
    inputs: list[str]
    labels: list[str]
    output_path: str
    log_x: bool = True
    log_y: bool = False

    def validate(self) -> "PlotSpec":
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; "
                             f"expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if len(self.labels) != len(self.inputs):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs")
        return self


@dataclass
class Series:
    """One CSV loaded as named columns."""

    path: str
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]


@dataclass
class RenderSummary:
    """What ended up in the figure; used by callers and tests."""

    kind: str
    output_path: str
    series_count: int
    labels: list[str]


def load_series(path: str) -> Series:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise ValueError(f"{path}: missing column {column!r}")
        rows = list(reader)
    columns: dict[str, np.ndarray] = {}
    for column in REQUIRED_COLUMNS:
        raw = [row[column] for row in rows]
        if column == "t":
            columns[column] = np.array([int(v) for v in raw])
        elif all(v == "" for v in raw):
            columns[column] = np.full(len(raw), np.nan)
        else:
            columns[column] = np.array([float(v) for v in raw])
    return Series(path=path, columns=columns)


def _check_shared_grid(series: list[Series]) -> None:
    base = series[0].t
    for s in series[1:]:
        if s.t.shape != base.shape or (s.t != base).any():
            raise ValueError(
                f"{s.path}: checkpoint grid differs from {series[0].path}")


def render(spec: PlotSpec) -> RenderSummary:
    """Draw the figure described by ``spec`` and write the image file."""
    spec.validate()
    series = [load_series(p) for p in spec.inputs]
    if spec.kind in _OVERLAY_KINDS:
        _check_shared_grid(series)

    plt.rcParams["svg.hashsalt"] = theme.SVG_HASHSALT
    fig, ax = plt.subplots(figsize=theme.FIGSIZE, dpi=theme.DPI)
    count = 0

    if spec.kind == "regret_vs_t":
        for i, (s, label) in enumerate(zip(series, spec.labels)):
            ax.plot(s.t, s.columns["mean_regret"], color=theme.mean_color(i),
                    linewidth=theme.MEAN_LINEWIDTH, label=label)
            count += 1
        lead = series[0]
        if not np.isnan(lead.columns["upper_bound"]).all():
            ax.plot(lead.t, lead.columns["upper_bound"], label="upper bound",
                    **theme.UPPER_BOUND_STYLE)
            count += 1
        if not np.isnan(lead.columns["lower_bound"]).all():
            ax.plot(lead.t, lead.columns["lower_bound"], label="lower bound",
                    **theme.LOWER_BOUND_STYLE)
            count += 1
        ax.set_xlabel("t (slots)")
        ax.set_ylabel("mean regret")

    elif spec.kind == "regret_vs_K":
        finals = [s.columns["mean_regret"][-1] for s in series]
        ax.plot(range(len(finals)), finals, marker="o",
                color=theme.mean_color(0), linewidth=theme.MEAN_LINEWIDTH,
                label="final mean regret")
        ax.set_xticks(range(len(finals)))
        ax.set_xticklabels(spec.labels)
        ax.set_xlabel("channel count")
        ax.set_ylabel("mean regret at horizon")
        spec.log_x = False
        count = 1

    elif spec.kind == "m_sweep":
        for i, (s, label) in enumerate(zip(series, spec.labels)):
            ax.plot(s.t, s.columns["mean_regret"], color=theme.mean_color(i),
                    linewidth=theme.MEAN_LINEWIDTH, label=label)
            count += 1
        ax.set_xlabel("t (slots)")
        ax.set_ylabel("mean regret")

    else:  # traffic
        for i, (s, label) in enumerate(zip(series, spec.labels)):
            traffic = s.columns["mean_su_traffic"]
            if (np.diff(traffic) < 0).any():
                raise ValueError(
                    f"{s.path}: accumulated traffic must be nondecreasing")
            ax.plot(s.t, traffic, color=theme.mean_color(i),
                    linewidth=theme.MEAN_LINEWIDTH, label=label)
            count += 1
        ax.set_xlabel("t (slots)")
        ax.set_ylabel("accumulated SU traffic")

    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    ax.grid(True, **theme.GRID_KW)
    ax.legend(**theme.LEGEND_KW)
    fig.tight_layout()
    fig.savefig(spec.output_path, metadata=_stable_metadata(spec.output_path))
    plt.close(fig)

    labels = list(spec.labels)
    if spec.kind == "regret_vs_t":
        labels += [line.get_label() for line in ax.lines[len(spec.labels):]]
    return RenderSummary(kind=spec.kind, output_path=spec.output_path,
                         series_count=count, labels=labels)


def _stable_metadata(path: str) -> dict:
    # Strip per-render metadata so re-rendering is byte-stable.
    if path.endswith(".svg"):
        return {"Date": None}
    if path.endswith(".png"):
        return {"Software": "pueplots"}
    return {}
