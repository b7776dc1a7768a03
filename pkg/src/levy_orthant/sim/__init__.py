"""Path simulation and hitting-probability estimators."""

from ._backend import BACKEND
from .core import (
    HitEstimate,
    SimConfig,
    chunk_stream,
    estimate_to_dict,
    sample_increment,
    simulate_hitting_crude,
    simulate_hitting_is,
    tilt_model,
    write_chunk_csv,
)

__all__ = [
    "BACKEND",
    "HitEstimate",
    "SimConfig",
    "chunk_stream",
    "estimate_to_dict",
    "sample_increment",
    "simulate_hitting_crude",
    "simulate_hitting_is",
    "tilt_model",
    "write_chunk_csv",
]
