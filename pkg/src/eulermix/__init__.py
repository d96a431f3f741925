"""Random walks on Eulerian digraphs: mixing, spectral profiles, hitting and exploration times."""

from __future__ import annotations

from .chain import LazyChain, build
from .graph import GOLDEN, EulerianMultigraph, GadgetSpec, gen_two_cycle_gadget, read_graph, validate
from .mixing import threshold_time, thresholds
from .report import ExperimentReport, Verdict

__version__ = "0.1.0"

__all__ = [
    "GOLDEN",
    "EulerianMultigraph",
    "GadgetSpec",
    "LazyChain",
    "ExperimentReport",
    "Verdict",
    "build",
    "gen_two_cycle_gadget",
    "read_graph",
    "threshold_time",
    "thresholds",
    "validate",
]
