"""Collision-model simulator of environment-induced spontaneous
(anti-)synchronization between two open spin-1/2 systems."""

from .engine import (
    CarriedState,
    InitialStateSpec,
    ModelParams,
    StepChannel,
    StepRecord,
    StepUnitaries,
    Strategy,
    Trajectory,
    build_step_channel,
    build_step_unitaries,
    initial_carried_state,
    run_expectation_series,
    run_trajectory,
    step,
    thermal_state,
)
from .linalg import (
    DensityMatrix,
    NumericalDriftError,
    PositivityError,
    hermitian_eig,
    kron,
    partial_trace,
    psd_sqrt,
    unitary_from_hamiltonian,
    von_neumann_entropy,
)
from .observables import ObservableSelector, concurrence, expectation, mutual_information
from .sweep import SweepAxis, SweepGrid, SweepSpec, classify, run_sweep
from .syncmetrics import (
    PearsonSeries,
    WindowSpec,
    final_sync_value,
    pearson,
    sliding_pearson,
)

__version__ = "0.1.0"

__all__ = [
    "CarriedState",
    "DensityMatrix",
    "InitialStateSpec",
    "ModelParams",
    "NumericalDriftError",
    "ObservableSelector",
    "PearsonSeries",
    "PositivityError",
    "StepChannel",
    "StepRecord",
    "StepUnitaries",
    "Strategy",
    "SweepAxis",
    "SweepGrid",
    "SweepSpec",
    "Trajectory",
    "WindowSpec",
    "build_step_channel",
    "build_step_unitaries",
    "classify",
    "concurrence",
    "expectation",
    "final_sync_value",
    "hermitian_eig",
    "initial_carried_state",
    "kron",
    "mutual_information",
    "partial_trace",
    "pearson",
    "psd_sqrt",
    "run_expectation_series",
    "run_sweep",
    "run_trajectory",
    "sliding_pearson",
    "step",
    "thermal_state",
    "unitary_from_hamiltonian",
    "von_neumann_entropy",
]
