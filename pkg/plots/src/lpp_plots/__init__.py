"""Batch figure rendering for the simulation CLI's CSV outputs.

This package reads, it never computes: every number in a figure comes out
of a CSV or its JSON sidecar, except the overlay fits that are recomputed
from the plotted points so a stale figure cannot contradict its own data.
"""

from lpp_plots.figures import FigureSpec, render

__all__ = ["FigureSpec", "render"]
