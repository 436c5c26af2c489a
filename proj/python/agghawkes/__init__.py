"""Bayesian inference for Hawkes processes from aggregated count data."""

from agghawkes._core import (
    SpatialKernel,
    TemporalKernel,
    Window,
    aggregate,
    ess,
    fit,
    rhat,
    simulate,
)

__all__ = [
    "SpatialKernel",
    "TemporalKernel",
    "Window",
    "aggregate",
    "ess",
    "fit",
    "rhat",
    "simulate",
]
