from .render import (BOOTSTRAP_COLOR, KINDS, MONTE_CARLO_COLOR, PlotJob,
                     PlotSpec, SchemaError, render)

__version__ = "0.1.0"
