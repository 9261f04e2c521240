"""Figures of merit extracted from final states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrator import FinalState, IntegrationOptions, StepUnderflow, integrate
from .model import LEVELS, S, SimulationConfig


def population(rho: np.ndarray, level: str) -> float:
    i = LEVELS[level]
    return float(np.real(rho[i, i]))


def storage_efficiency(rho: np.ndarray) -> float:
    return float(np.real(rho[S, S]))


@dataclass(frozen=True)
class StorageResult:
    P_s: float
    P_g: float
    P_e_max: float
    converged: bool
    trace_dev: float
    runtime: float
    herm_defect: float = 0.0
    min_eig: float = 0.0


def summarize(final: FinalState) -> StorageResult:
    d = final.diagnostics
    traj = final.trajectory
    p_e_max = float(traj.P_e.max()) if traj is not None else population(final.rho_final, "e")
    return StorageResult(
        P_s=storage_efficiency(final.rho_final),
        P_g=population(final.rho_final, "g"),
        P_e_max=p_e_max,
        converged=d.converged,
        trace_dev=d.max_trace_dev,
        runtime=d.runtime,
        herm_defect=d.max_herm_defect,
        min_eig=d.min_eig,
    )


def simulate(config: SimulationConfig, options: IntegrationOptions | None = None) -> StorageResult:
    """Integrate one configuration; failures come back flagged, not raised."""
    try:
        return summarize(integrate(config, options, strict=False))
    except StepUnderflow:
        nan = float("nan")
        return StorageResult(nan, nan, nan, False, nan, 0.0, nan, nan)


def storage_probability(config: SimulationConfig, options: IntegrationOptions | None = None) -> float:
    return simulate(config, options).P_s
