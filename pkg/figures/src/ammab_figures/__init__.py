from .render import CurveData, Panel, PlotSpec, PlotSpecError, load_plot_spec, read_curve, render

__version__ = "0.1.0"
