"""Single-photon storage in a single Lambda-type atom coupled to a waveguide."""

from .integrator import IntegrationOptions, NonConvergent, StepUnderflow, integrate
from .model import (
    AtomConfig,
    ConfigError,
    ControlPulse,
    EffectiveCoupling,
    InvalidAtom,
    InvalidPulse,
    Params,
    SimulationConfig,
    Statistics,
    TargetPulse,
    Topology,
    effective_coupling,
    load_config,
    validate_config,
)
from .observables import StorageResult, simulate, storage_efficiency

__all__ = [
    "AtomConfig", "ConfigError", "ControlPulse", "EffectiveCoupling", "IntegrationOptions",
    "InvalidAtom", "InvalidPulse", "NonConvergent", "Params", "SimulationConfig", "Statistics",
    "StepUnderflow", "StorageResult", "TargetPulse", "Topology", "effective_coupling",
    "integrate", "load_config", "simulate", "storage_efficiency", "validate_config",
]
