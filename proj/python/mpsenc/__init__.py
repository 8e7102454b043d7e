"""Encode matrix product states into staircase circuits of two-qubit gates."""

from ._core import (
    Error,
    Mps,
    StaircaseCircuit,
    direct_truncation_baseline,
    environment_global,
    equivalent_layer_count,
    infidelity,
    inner,
    ising_ground_state,
    layer_by_layer_encode,
    mean_local_fidelity,
    omega_lower_bound,
    optimize,
    overlap,
    plot_csv,
    random_mps,
    reconstruct_environment,
    run_grid,
    truncate,
    zero_state,
)

__all__ = [
    "Error",
    "Mps",
    "StaircaseCircuit",
    "direct_truncation_baseline",
    "environment_global",
    "equivalent_layer_count",
    "infidelity",
    "inner",
    "ising_ground_state",
    "layer_by_layer_encode",
    "mean_local_fidelity",
    "omega_lower_bound",
    "optimize",
    "overlap",
    "plot_csv",
    "random_mps",
    "reconstruct_environment",
    "run_grid",
    "truncate",
    "zero_state",
]
