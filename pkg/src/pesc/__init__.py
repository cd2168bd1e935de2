"""pesc: deconvolution by alternating projections between measurement
hyperplanes and the epigraph of a convex cost (TV, l1, l2)."""

__version__ = "0.1.0"

from .core import (
    Kernel,
    Lifted,
    NumericError,
    as_image,
    box_kernel,
    convolve_at,
    convolve_full,
    delta_kernel,
    lift,
    lifted_distance,
)
from .costs import CostFunction, L1Norm, L2Norm, TotalVariation, make_cost
from .data_consistency import MeasurementModel, project_row, project_slab, sweep
from .epigraph import (
    EpigraphConfig,
    EpigraphResult,
    project_epigraph,
    project_level_set,
    project_supporting_hyperplane,
)
from .metrics import QualityReport, bsnr, isnr, snr
from .solver import ConvergenceTrace, SolverConfig, deconvolve, trace_to_rows
from .synth import DegradationSpec, calibrate_sigma, degrade

__all__ = [
    "Kernel",
    "Lifted",
    "NumericError",
    "as_image",
    "box_kernel",
    "convolve_at",
    "convolve_full",
    "delta_kernel",
    "lift",
    "lifted_distance",
    "CostFunction",
    "L1Norm",
    "L2Norm",
    "TotalVariation",
    "make_cost",
    "MeasurementModel",
    "project_row",
    "project_slab",
    "sweep",
    "EpigraphConfig",
    "EpigraphResult",
    "project_epigraph",
    "project_level_set",
    "project_supporting_hyperplane",
    "QualityReport",
    "bsnr",
    "isnr",
    "snr",
    "ConvergenceTrace",
    "SolverConfig",
    "deconvolve",
    "trace_to_rows",
    "DegradationSpec",
    "calibrate_sigma",
    "degrade",
]
