"""Benchmark chart rendering, decoupled from the simulation package.

The only contract with the producer is the CSV column layout; nothing
here imports the simulation code.
"""

from oaplots.plotting import (
    DataError,
    PlotSpec,
    RenderResult,
    SchemaError,
    main,
    render,
)

__all__ = [
    "DataError",
    "PlotSpec",
    "RenderResult",
    "SchemaError",
    "main",
    "render",
]
