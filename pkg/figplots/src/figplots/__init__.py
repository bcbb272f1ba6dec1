"""Render omm-qcorr sweep CSVs: heatmaps, line cuts and region maps."""

from .core import (KINDS, FigplotsError, PlotJob, build_figure,
                   discrete_categories, load_table, render)

__version__ = "0.1.0"

__all__ = ["KINDS", "FigplotsError", "PlotJob", "build_figure",
           "discrete_categories", "load_table", "render"]
