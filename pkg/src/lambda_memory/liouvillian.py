"""Right-hand sides of the coherent-state and Fock-state master equations.

Everything lives in the frame where |g> and |s> are degenerate at zero
energy (two-photon resonance) and the carrier phases of the photon and the
control are removed; only the common detuning ``delta`` of |e> survives.

The matrix-level functions here are the reference definitions. The
integrator does not call them per step; it uses :func:`build_generator`,
which probes them once to assemble a real-linear generator
``M0 + xi(t) * Mxi + omega_c(t) * Momega`` acting on the flattened state.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .model import AtomConfig, ControlPulse, E, G, S, EffectiveCoupling, SimulationConfig, Statistics
from .pulses import control_envelope, target_envelope


def _op(i: int, j: int) -> np.ndarray:
    m = np.zeros((3, 3), dtype=complex)
    m[i, j] = 1.0
    return m


SIGMA_GE = _op(G, E)
SIGMA_SE = _op(S, E)
PROJ_E = _op(E, E)
GROUND = _op(G, G)
for _m in (SIGMA_GE, SIGMA_SE, PROJ_E, GROUND):
    _m.setflags(write=False)


def comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hamiltonian(delta: float, omega_c: float) -> np.ndarray:
    return delta * PROJ_E + omega_c * (SIGMA_SE + SIGMA_SE.conj().T)


def rotating_hamiltonian(t, atom: AtomConfig, control: ControlPulse, t0: float = 0.0) -> np.ndarray:
    return hamiltonian(atom.delta, float(control_envelope(t, control, t0)))


def lindblad(rho: np.ndarray, h: np.ndarray, eff: EffectiveCoupling) -> np.ndarray:
    """Unitary part plus decay |e> -> |g> and |e> -> |s>.

    Valid for any 3x3 matrix; Hermiticity is not assumed.
    """
    out = -1j * comm(h, rho)
    out += eff.gamma_eg_eff * (SIGMA_GE @ rho @ SIGMA_GE.conj().T)
    out += eff.gamma_es_eff * (SIGMA_SE @ rho @ SIGMA_SE.conj().T)
    out -= 0.5 * eff.gamma_eff * (PROJ_E @ rho + rho @ PROJ_E)
    return out


def apply_L_ac(rho, t, atom: AtomConfig, control: ControlPulse, eff: EffectiveCoupling,
               t0: float = 0.0) -> np.ndarray:
    return lindblad(rho, rotating_hamiltonian(t, atom, control, t0), eff)


def coherent_rhs_values(rho, xi: complex, omega_c: float, delta: float,
                        eff: EffectiveCoupling, nbar: float = 1.0) -> np.ndarray:
    drive = eff.kappa * np.sqrt(nbar) * (xi * SIGMA_GE.conj().T + np.conj(xi) * SIGMA_GE)
    return lindblad(rho, hamiltonian(delta, omega_c), eff) - 1j * comm(drive, rho)


def coherent_rhs(rho, t, config: SimulationConfig) -> np.ndarray:
    xi = complex(target_envelope(t, config.target))
    om = float(control_envelope(t, config.control, config.target.t0))
    return coherent_rhs_values(rho, xi, om, config.atom.delta, config.coupling, config.target.nbar)


@dataclass
class HierarchyState:
    """Physical state ``rho11``, one-to-zero photon coherence ``rho01`` and
    the vacuum-input state ``rho00``."""

    rho11: np.ndarray
    rho01: np.ndarray
    rho00: np.ndarray

    @classmethod
    def ground(cls) -> "HierarchyState":
        return cls(GROUND.copy(), np.zeros((3, 3), complex), GROUND.copy())

    def __add__(self, other):
        return HierarchyState(self.rho11 + other.rho11, self.rho01 + other.rho01,
                              self.rho00 + other.rho00)

    def __mul__(self, c):
        return HierarchyState(c * self.rho11, c * self.rho01, c * self.rho00)

    __rmul__ = __mul__


def fock_rhs_values(state: HierarchyState, xi: complex, omega_c: float, delta: float,
                    eff: EffectiveCoupling) -> HierarchyState:
    h = hamiltonian(delta, omega_c)
    k = eff.kappa
    d00 = lindblad(state.rho00, h, eff)
    d01 = lindblad(state.rho01, h, eff) - 1j * k * np.conj(xi) * comm(SIGMA_GE, state.rho00)
    pump = xi * comm(SIGMA_GE.conj().T, state.rho01) + np.conj(xi) * comm(SIGMA_GE, state.rho01.conj().T)
    d11 = lindblad(state.rho11, h, eff) - 1j * k * pump
    return HierarchyState(d11, d01, d00)


def fock_rhs(state: HierarchyState, t, config: SimulationConfig) -> HierarchyState:
    xi = complex(target_envelope(t, config.target))
    om = float(control_envelope(t, config.control, config.target.t0))
    return fock_rhs_values(state, xi, om, config.atom.delta, config.coupling)


# -- flattened real representation ------------------------------------------

def pack(blocks) -> np.ndarray:
    z = np.concatenate([np.asarray(b, dtype=complex).ravel() for b in blocks])
    return np.concatenate([z.real, z.imag])


def unpack(y: np.ndarray) -> list[np.ndarray]:
    """Inverse of :func:`pack`; works on a trailing axis of length 18 or 54."""
    y = np.asarray(y)
    n = y.shape[-1] // 2
    z = y[..., :n] + 1j * y[..., n:]
    return [z[..., 9 * i: 9 * i + 9].reshape(z.shape[:-1] + (3, 3)) for i in range(n // 9)]


def initial_vector(statistics: Statistics) -> np.ndarray:
    if Statistics(statistics) is Statistics.FOCK:
        s = HierarchyState.ground()
        return pack([s.rho11, s.rho01, s.rho00])
    return pack([GROUND])


# indices of the physical-block populations in the packed vector
IDX_PG, IDX_PE, IDX_PS = 4 * G, 4 * E, 4 * S


@dataclass(frozen=True)
class LinearGenerator:
    """dy/dt = (m0 + xi(t) * m_xi + omega_c(t) * m_omega) @ y for real xi."""

    m0: np.ndarray
    m_xi: np.ndarray
    m_omega: np.ndarray

    def __call__(self, y, xi: float, omega_c: float) -> np.ndarray:
        return (self.m0 + xi * self.m_xi + omega_c * self.m_omega) @ y


def _probe(statistics: Statistics, xi, om, delta, eff) -> np.ndarray:
    if statistics is Statistics.FOCK:
        dim = 54

        def rhs(y):
            d = fock_rhs_values(HierarchyState(*unpack(y)), xi, om, delta, eff)
            return pack([d.rho11, d.rho01, d.rho00])
    else:
        dim = 18

        def rhs(y):
            return pack([coherent_rhs_values(unpack(y)[0], xi, om, delta, eff)])

    eye = np.eye(dim)
    return np.column_stack([rhs(eye[j]) for j in range(dim)])


@functools.lru_cache(maxsize=None)
def _unit_pieces(statistics: Statistics) -> dict[str, np.ndarray]:
    """Generator pieces for unit detuning, unit rates, unit pump, unit control."""
    zero = EffectiveCoupling(0.0, 0.0, 0.0)
    pieces = {
        "delta": _probe(statistics, 0.0, 0.0, 1.0, zero),
        "gamma_eg": _probe(statistics, 0.0, 0.0, 0.0, EffectiveCoupling(0.0, 1.0, 0.0)),
        "gamma_es": _probe(statistics, 0.0, 0.0, 0.0, EffectiveCoupling(0.0, 0.0, 1.0)),
        "pump": _probe(statistics, 1.0, 0.0, 0.0, EffectiveCoupling(1.0, 0.0, 0.0)),
        "control": _probe(statistics, 0.0, 1.0, 0.0, zero),
    }
    for m in pieces.values():
        m.setflags(write=False)
    return pieces


def build_generator(config: SimulationConfig) -> LinearGenerator:
    """Real-linear generator for ``config``, assembled from probed pieces.

    Every term of either master equation is linear in exactly one of the
    detuning, a decay rate, the pump prefactor or the control amplitude, so
    probing the reference rhs with unit values recovers the full generator.
    The target envelope is real, which keeps the conjugation inside the Fock
    pump term real-linear on the packed vector.
    """
    eff = config.coupling
    u = _unit_pieces(config.target.statistics)
    pump = eff.kappa
    if config.target.statistics is Statistics.COHERENT:
        pump *= np.sqrt(config.target.nbar)
    m0 = config.atom.delta * u["delta"] + eff.gamma_eg_eff * u["gamma_eg"] + eff.gamma_es_eff * u["gamma_es"]
    return LinearGenerator(m0, pump * u["pump"], u["control"].copy())
