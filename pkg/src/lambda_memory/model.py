"""Configuration types for a Lambda atom storing a single-photon pulse.

Basis order is (|g>, |e>, |s>). The total excited-state decay rate
``gamma = gamma_eg + gamma_es`` is the frequency unit; times are in 1/gamma.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

G, E, S = 0, 1, 2
LEVELS = {"g": G, "e": E, "s": S}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


class InvalidAtom(ConfigError):
    pass


class InvalidPulse(ConfigError):
    pass


class Topology(str, enum.Enum):
    REGULAR = "regular"
    CHIRAL = "chiral"
    SAGNAC = "sagnac"


class Statistics(str, enum.Enum):
    FOCK = "fock"
    COHERENT = "coherent"


@dataclass(frozen=True)
class AtomConfig:
    gamma_eg: float = 0.5
    gamma_es: float = 0.5
    delta: float = 0.0

    @property
    def gamma(self) -> float:
        return self.gamma_eg + self.gamma_es


@dataclass(frozen=True)
class EffectiveCoupling:
    """Pump prefactor ``kappa`` and the decay rates entering the generator."""

    kappa: float
    gamma_eg_eff: float
    gamma_es_eff: float

    @property
    def gamma_eff(self) -> float:
        return self.gamma_eg_eff + self.gamma_es_eff


@dataclass(frozen=True)
class TargetPulse:
    tau_p: float = 1.0
    t0: float = 0.0
    statistics: Statistics = Statistics.FOCK
    nbar: float = 1.0


@dataclass(frozen=True)
class ControlPulse:
    """Gaussian control on |s><e|; ``a`` and ``b`` are absolute times."""

    omega: float = 0.0
    a: float = 1.0
    b: float = 0.0


def effective_coupling(topology: Topology, atom: AtomConfig) -> EffectiveCoupling:
    topology = Topology(topology)
    if topology is Topology.REGULAR:
        return EffectiveCoupling(math.sqrt(atom.gamma_eg / 2), atom.gamma_eg, atom.gamma_es)
    if topology is Topology.CHIRAL:
        # one propagation direction: pump unchanged, both decay channels halved
        return EffectiveCoupling(
            math.sqrt(atom.gamma_eg / 2), atom.gamma_eg / 2, atom.gamma_es / 2
        )
    # Sagnac: target pulse lives in the even mode only, pump rate doubled
    return EffectiveCoupling(math.sqrt(atom.gamma_eg), atom.gamma_eg, atom.gamma_es)


@dataclass(frozen=True)
class Params:
    """Flat, unresolved parameter set mirroring the key=value config file.

    With ``relative_units`` the control half-width ``a`` and delay ``b`` are
    multiples of ``tau_p``; otherwise absolute. Sweeps and the optimizer
    override fields here and resolve afterwards, so relative control
    parameters follow a swept ``tau_p``.
    """

    gamma_eg: float = 0.5
    gamma_es: float = 0.5
    delta: float = 0.0
    topology: Topology = Topology.REGULAR
    statistics: Statistics = Statistics.FOCK
    nbar: float = 1.0
    tau_p: float = 1.0
    t0: float = 0.0
    omega: float = 0.0
    a: float = 1.0
    b: float = 0.0
    relative_units: bool = True

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _coerce(f.name, getattr(self, f.name)))

    def with_(self, **overrides) -> "Params":
        """Copy with overrides; values may be strings as read from a CLI."""
        for k in overrides:
            if k not in PARAM_KEYS:
                raise ConfigError(f"unknown config key {k!r}")
        return replace(self, **overrides)

    def resolve(self) -> "SimulationConfig":
        return validate_config(self)

    def to_lines(self) -> list[str]:
        out = []
        for k, v in asdict(self).items():
            if isinstance(v, enum.Enum):
                v = v.value
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            out.append(f"{k}={v}")
        return out


PARAM_KEYS = tuple(f.name for f in fields(Params))


def _coerce(key: str, value):
    if key not in PARAM_KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    if isinstance(value, enum.Enum):
        value = value.value
    if key == "topology":
        try:
            return Topology(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"bad topology {value!r}") from None
    if key == "statistics":
        try:
            return Statistics(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"bad statistics {value!r}") from None
    if key == "relative_units":
        if isinstance(value, bool):
            return value
        s = str(value).strip().lower()
        if s in ("true", "1", "yes"):
            return True
        if s in ("false", "0", "no"):
            return False
        raise ConfigError(f"bad boolean {value!r} for relative_units")
    if isinstance(value, bool):
        raise ConfigError(f"bad number {value!r} for {key}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad number {value!r} for {key}") from None


@dataclass(frozen=True)
class SimulationConfig:
    """Validated configuration with derived couplings populated."""

    atom: AtomConfig
    target: TargetPulse
    control: ControlPulse
    topology: Topology
    coupling: EffectiveCoupling = field(init=False)
    params: Params | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coupling", effective_coupling(self.topology, self.atom))

    @property
    def gamma(self) -> float:
        return self.atom.gamma


def validate_config(
    params: Params | None = None,
    *,
    atom: AtomConfig | None = None,
    target: TargetPulse | None = None,
    control: ControlPulse | None = None,
    topology: Topology = Topology.REGULAR,
) -> SimulationConfig:
    """Check invariants and build a :class:`SimulationConfig`.

    Either pass a flat :class:`Params` or the structured pieces (whose
    control ``a``/``b`` are then taken as absolute).
    """
    if params is not None:
        rel = params.tau_p if params.relative_units else 1.0
        atom = AtomConfig(params.gamma_eg, params.gamma_es, params.delta)
        target = TargetPulse(params.tau_p, params.t0, Statistics(params.statistics), params.nbar)
        control = ControlPulse(params.omega, params.a * rel, params.b * rel)
        topology = params.topology
    atom = atom or AtomConfig()
    target = target or TargetPulse()
    control = control or ControlPulse()

    vals = [atom.gamma_eg, atom.gamma_es, atom.delta, target.tau_p, target.t0,
            target.nbar, control.omega, control.a, control.b]
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError("non-finite parameter")
    if atom.gamma_eg < 0 or atom.gamma_es < 0:
        raise InvalidAtom("decay rates must be non-negative")
    if atom.gamma_eg + atom.gamma_es <= 0:
        raise InvalidAtom("total decay rate must be positive")
    if target.tau_p <= 0:
        raise InvalidPulse("tau_p must be positive")
    if target.nbar < 0:
        raise InvalidPulse("nbar must be non-negative")
    if control.a <= 0:
        raise InvalidPulse("control half-width a must be positive")
    if control.omega < 0:
        raise InvalidPulse("control amplitude omega must be non-negative")
    return SimulationConfig(atom, target, control, Topology(topology), params=params)


def parse_config_text(text: str, base: Params | None = None) -> Params:
    """Parse ``key=value`` lines; '#' starts a comment."""
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        overrides[k] = v
    return (base or Params()).with_(**overrides)


def load_config(path: str | Path, base: Params | None = None) -> Params:
    return parse_config_text(Path(path).read_text(), base)
