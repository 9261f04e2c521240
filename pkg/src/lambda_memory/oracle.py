"""Independent checks for the no-control Fock-state case.

Without a control field a single photon can only take the atom
|g> -> |e> -> {|g>, |s>}, so the excited-state amplitude obeys a scalar
driven-damped equation and the stored probability is the time-integrated
decay flux into |s>. This shares nothing with the density-matrix hierarchy
(different state space, different integrator).
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy.integrate import solve_ivp

from .integrator import IntegrationOptions, time_window
from .model import SimulationConfig, Statistics
from .pulses import target_envelope


class OracleDomainError(ValueError):
    pass


@dataclass
class AmplitudeState:
    e_amp: complex
    stored_incoherent: float


def _check_domain(config: SimulationConfig):
    if config.control.omega != 0.0:
        raise OracleDomainError("oracle covers the no-control case only")
    if config.target.statistics is not Statistics.FOCK:
        raise OracleDomainError("oracle covers Fock-state pulses only")


def amplitude_trajectory(config: SimulationConfig, options: IntegrationOptions | None = None,
                         t_eval=None):
    """Integrate (Re e, Im e, stored) and return the scipy solution object."""
    _check_domain(config)
    options = options or IntegrationOptions()
    eff = config.coupling
    kappa, g_eff, g_es = eff.kappa, eff.gamma_eff, eff.gamma_es_eff
    delta = config.atom.delta
    t_start, _, t_cap = time_window(config, options)

    def rhs(t, y):
        e = y[0] + 1j * y[1]
        de = -(1j * delta + 0.5 * g_eff) * e - 1j * kappa * complex(target_envelope(t, config.target))
        return [de.real, de.imag, g_es * (y[0] ** 2 + y[1] ** 2)]

    max_step = 0.25 * min(config.target.tau_p, 1.0 / config.gamma)
    return solve_ivp(rhs, (t_start, t_cap), [0.0, 0.0, 0.0], method="DOP853",
                     rtol=min(options.rel_tol, 1e-10), atol=min(options.abs_tol, 1e-12),
                     max_step=max_step, t_eval=t_eval)


def fssp_no_control_oracle(config: SimulationConfig, options: IntegrationOptions | None = None) -> float:
    _check_domain(config)
    if config.coupling.kappa == 0.0:
        return 0.0
    sol = amplitude_trajectory(config, options)
    if not sol.success:
        raise RuntimeError(sol.message)
    return float(sol.y[2, -1])


def final_amplitude_state(config: SimulationConfig) -> AmplitudeState:
    sol = amplitude_trajectory(config)
    return AmplitudeState(complex(sol.y[0, -1], sol.y[1, -1]), float(sol.y[2, -1]))


def adiabatic_limit(config: SimulationConfig) -> float:
    """Long-pulse storage probability.

    For tau_p >> 1/gamma the amplitude follows the drive,
    e ~ -2i kappa xi / gamma_eff, so P_s = 4 gamma_es_eff kappa^2 / gamma_eff^2.
    This is independent of detuning only at delta = 0; the general form
    divides by gamma_eff^2 / 4 + delta^2.
    """
    if config.control.omega != 0.0:
        raise OracleDomainError("adiabatic limit is defined without control")
    eff = config.coupling
    denom = 0.25 * eff.gamma_eff**2 + config.atom.delta**2
    if denom == 0.0:
        return 0.0
    return eff.gamma_es_eff * eff.kappa**2 / denom


def regular_adiabatic_formula(gamma_eg: float, gamma_es: float) -> float:
    """Closed form 2 gamma_eg gamma_es / gamma^2 for the regular waveguide."""
    return 2.0 * gamma_eg * gamma_es / (gamma_eg + gamma_es) ** 2


def enhanced_adiabatic_formula(gamma_eg: float, gamma_es: float) -> float:
    """Closed form 4 gamma_eg gamma_es / gamma^2 for chiral or Sagnac."""
    return 4.0 * gamma_eg * gamma_es / (gamma_eg + gamma_es) ** 2

