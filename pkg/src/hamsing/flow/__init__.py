"""Numerical continuation, landing on movable singularities and monodromy."""

from .approach import approach_singularity, estimate_singularity
from .chart import Chart, ChartState, Landing, land_on_singularity, near_samples
from .hunt import SingularityEvent, analyse_blowup, dedupe_events, hunt_singularities, make_chart
from .integrate import (
    DEFAULT_R_SWITCH,
    BlowUpSignal,
    ContinuationTrace,
    continue_along_path,
    read_trace_csv,
    write_trace_csv,
)
from .monodromy import ClosureReport, monodromy_loop
from .paths import Arc, Line, PathSpec, circle, detour_around, line_path, ray
from .puiseux import PuiseuxFit, local_puiseux_fit
from .wtrace import WSummary, w_approach, w_trace

__all__ = [
    "Arc",
    "BlowUpSignal",
    "Chart",
    "ChartState",
    "ClosureReport",
    "ContinuationTrace",
    "DEFAULT_R_SWITCH",
    "Landing",
    "Line",
    "PathSpec",
    "PuiseuxFit",
    "SingularityEvent",
    "WSummary",
    "analyse_blowup",
    "approach_singularity",
    "circle",
    "continue_along_path",
    "dedupe_events",
    "detour_around",
    "estimate_singularity",
    "hunt_singularities",
    "land_on_singularity",
    "line_path",
    "local_puiseux_fit",
    "make_chart",
    "monodromy_loop",
    "near_samples",
    "ray",
    "read_trace_csv",
    "w_approach",
    "w_trace",
    "write_trace_csv",
]
