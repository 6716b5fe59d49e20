"""Figure rendering over the simulator's experiment CSV schema."""

from .render import KINDS, PlotSpec, RenderSummary, Series, load_series, render

__all__ = ["KINDS", "PlotSpec", "RenderSummary", "Series", "load_series",
           "render"]
