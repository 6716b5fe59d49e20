"""All figure style constants live here; figures are never hand-edited."""

FIGSIZE = (6.0, 4.0)
DPI = 120

MEAN_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
UPPER_BOUND_STYLE = {"color": "#555555", "linestyle": "--", "linewidth": 1.2}
LOWER_BOUND_STYLE = {"color": "#999999", "linestyle": "--", "linewidth": 1.2}
MEAN_LINEWIDTH = 1.6
GRID_KW = {"alpha": 0.3, "linewidth": 0.5}
LEGEND_KW = {"fontsize": 9, "framealpha": 0.9}

# Fixed salt so SVG element ids (and thus output bytes) are reproducible.
SVG_HASHSALT = "pueplots"


def mean_color(index: int) -> str:
    return MEAN_COLORS[index % len(MEAN_COLORS)]
