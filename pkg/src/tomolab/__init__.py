"""Simulation and verification toolkit for sample-optimal state tomography with incoherent measurements."""

from .linalg import (
    bhattacharyya,
    bures_distance,
    chi_squared,
    fidelity,
    infidelity,
    mix_with_identity,
    op_norm,
    psd_clip_normalize,
    sqrt_psd,
    trace_distance,
)
from .states import HardPriorParams, haar_pure, random_state
from .measurement import Transcript, sample_projected_povm, sample_uniform_povm
from .estimators import h_n, h_n_projected
from .adaptive import SimulatedOracle, nonadaptive_baseline, run_adaptive

__version__ = "0.1.0"

__all__ = [
    "HardPriorParams",
    "SimulatedOracle",
    "Transcript",
    "bhattacharyya",
    "bures_distance",
    "chi_squared",
    "fidelity",
    "h_n",
    "h_n_projected",
    "haar_pure",
    "infidelity",
    "mix_with_identity",
    "nonadaptive_baseline",
    "op_norm",
    "psd_clip_normalize",
    "random_state",
    "run_adaptive",
    "sample_projected_povm",
    "sample_uniform_povm",
    "sqrt_psd",
    "trace_distance",
]
