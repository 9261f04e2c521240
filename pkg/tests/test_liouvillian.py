import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from lambda_memory.liouvillian import (
    GROUND,
    PROJ_E,
    SIGMA_GE,
    SIGMA_SE,
    HierarchyState,
    apply_L_ac,
    build_generator,
    coherent_rhs,
    coherent_rhs_values,
    fock_rhs,
    fock_rhs_values,
    pack,
    rotating_hamiltonian,
    unpack,
)
from lambda_memory.model import (
    AtomConfig,
    ControlPulse,
    EffectiveCoupling,
    Params,
    TargetPulse,
    Topology,
    effective_coupling,
)
from lambda_memory.pulses import control_envelope, target_envelope


def test_operator_algebra():
    assert np.all(SIGMA_GE @ SIGMA_GE == 0)
    assert np.all(SIGMA_SE @ SIGMA_SE == 0)
    assert np.array_equal(SIGMA_GE.conj().T @ SIGMA_GE, PROJ_E)


def test_hamiltonian_resonant_no_control():
    h = rotating_hamiltonian(0.0, AtomConfig(delta=0.0), ControlPulse(omega=0.0))
    assert np.all(h == 0)


def test_hamiltonian_detuned_with_control():
    # control peaks at t = t0 + b, so Omega_c = 0.7 there
    h = rotating_hamiltonian(0.6, AtomConfig(delta=0.5), ControlPulse(omega=0.7, a=1.0, b=0.6))
    expected = np.zeros((3, 3))
    expected[1, 1] = 0.5
    expected[2, 1] = expected[1, 2] = 0.7
    np.testing.assert_allclose(h, expected, atol=1e-15)


@given(st.floats(-50, 50), st.floats(-3, 3), st.floats(0, 3))
def test_hamiltonian_hermitian(t, delta, omega):
    h = rotating_hamiltonian(t, AtomConfig(delta=delta), ControlPulse(omega=omega, a=0.7, b=0.2))
    assert np.array_equal(h, h.conj().T)


EFF_HALF = EffectiveCoupling(0.5, 0.5, 0.5)


def test_excited_state_decays_at_total_rate():
    rho = PROJ_E.copy()
    d = apply_L_ac(rho, 0.0, AtomConfig(), ControlPulse(omega=0.0), EFF_HALF)
    assert np.real(np.diag(d)) == pytest.approx([0.5, -1.0, 0.5])
    assert np.abs(d - np.diag(np.diag(d))).max() == 0


def test_ground_state_is_dark():
    d = apply_L_ac(GROUND.copy(), 0.3, AtomConfig(delta=0.4), ControlPulse(omega=0.0), EFF_HALF)
    assert np.all(d == 0)


def random_matrix(rng, hermitian=True):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return m + m.conj().T if hermitian else m


seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_lindblad_trace_free(seed):
    rng = np.random.default_rng(seed)
    atom = AtomConfig(*rng.uniform(0, 1, 2), rng.uniform(-2, 2))
    ctl = ControlPulse(omega=rng.uniform(0, 3), a=0.5, b=0.1)
    eff = effective_coupling(Topology.REGULAR, atom)
    assert abs(np.trace(apply_L_ac(random_matrix(rng), 0.2, atom, ctl, eff))) < 1e-12


CFG = Params(gamma_eg=0.9, gamma_es=0.1, delta=0.3, omega=0.7, a=0.9, b=0.6).resolve()


def test_coherent_without_pump_equals_lindblad():
    rng = np.random.default_rng(1)
    rho = random_matrix(rng)
    d = coherent_rhs_values(rho, 0.0, 0.4, 0.3, CFG.coupling)
    ref = apply_L_ac(rho, 0.6, CFG.atom, ControlPulse(omega=0.4, a=1.0, b=0.6), CFG.coupling)
    np.testing.assert_array_equal(d, ref)


def _symbolic_pump_element():
    """<e| -i [x (sigma_ge^dag + sigma_ge), |g><g|] |g> and its transpose element."""
    x = sp.symbols("x", real=True)
    s_ge = sp.Matrix([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    rho = sp.Matrix([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    v = x * (s_ge.T + s_ge)
    d = -sp.I * (v * rho - rho * v)
    return x, sp.simplify(d[1, 0]), sp.simplify(d[0, 1])


def test_coherent_pump_on_ground_state():
    x, eg_sym, ge_sym = _symbolic_pump_element()
    xv = 0.37
    eff = EffectiveCoupling(1.0, 0.0, 0.0)
    d = coherent_rhs_values(GROUND.copy(), xv, 0.0, 0.0, eff)
    assert d[1, 0] == pytest.approx(complex(eg_sym.subs(x, xv)))
    assert d[0, 1] == pytest.approx(complex(ge_sym.subs(x, xv)))
    assert d[1, 0] == pytest.approx(-1j * xv)


@given(seeds)
def test_coherent_trace_free(seed):
    rng = np.random.default_rng(seed)
    assert abs(np.trace(coherent_rhs(random_matrix(rng), rng.uniform(-3, 3), CFG))) < 1e-12


def random_state(rng):
    return HierarchyState(random_matrix(rng), random_matrix(rng, hermitian=False), random_matrix(rng))


def test_fock_initial_step():
    x = 0.25
    eff = EffectiveCoupling(1.0, 0.5, 0.5)
    d = fock_rhs_values(HierarchyState.ground(), x, 0.0, 0.0, eff)
    assert np.all(d.rho11 == 0)
    assert np.all(d.rho00 == 0)
    np.testing.assert_allclose(d.rho01, 1j * x * SIGMA_GE, atol=1e-16)


def test_fock_decoupled_without_pump():
    rng = np.random.default_rng(3)
    s = random_state(rng)
    d = fock_rhs_values(s, 0.0, 0.7, 0.3, CFG.coupling)
    ctl = ControlPulse(omega=0.7, a=1.0, b=0.0)
    for blk, ref in ((d.rho11, s.rho11), (d.rho01, s.rho01), (d.rho00, s.rho00)):
        np.testing.assert_array_equal(blk, apply_L_ac(ref, 0.0, CFG.atom, ctl, CFG.coupling))


@given(seeds, st.floats(-4, 4))
def test_fock_trace_and_hermiticity(seed, t):
    rng = np.random.default_rng(seed)
    d = fock_rhs(random_state(rng), t, CFG)
    assert abs(np.trace(d.rho11)) < 1e-12
    assert abs(np.trace(d.rho00)) < 1e-12
    assert np.abs(d.rho11 - d.rho11.conj().T).max() < 1e-12
    assert np.abs(d.rho00 - d.rho00.conj().T).max() < 1e-12


@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_fock_linear(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng), random_state(rng)
    lhs = fock_rhs(alpha * a + beta * b, 0.4, CFG)
    rhs = alpha * fock_rhs(a, 0.4, CFG) + beta * fock_rhs(b, 0.4, CFG)
    for u, v in ((lhs.rho11, rhs.rho11), (lhs.rho01, rhs.rho01), (lhs.rho00, rhs.rho00)):
        np.testing.assert_allclose(u, v, atol=1e-10)


@pytest.mark.parametrize("stat", ["fock", "coherent"])
@pytest.mark.parametrize("topo", ["regular", "chiral", "sagnac"])
def test_generator_matches_reference_rhs(stat, topo):
    cfg = Params(statistics=stat, topology=topo, gamma_eg=0.8, gamma_es=0.2, delta=-0.4,
                 nbar=0.6, omega=1.1, a=0.9, b=0.6, tau_p=1.3, t0=0.5).resolve()
    gen = build_generator(cfg)
    rng = np.random.default_rng(11)
    for t in (-1.0, 0.5, 1.7):
        xi = target_envelope(t, cfg.target).real
        om = control_envelope(t, cfg.control, cfg.target.t0)
        if stat == "fock":
            s = random_state(rng)
            d = fock_rhs(s, t, cfg)
            ref = pack([d.rho11, d.rho01, d.rho00])
            y = pack([s.rho11, s.rho01, s.rho00])
        else:
            rho = random_matrix(rng)
            ref = pack([coherent_rhs(rho, t, cfg)])
            y = pack([rho])
        np.testing.assert_allclose(gen(y, xi, om), ref, atol=1e-12)


def test_pack_roundtrip():
    rng = np.random.default_rng(5)
    blocks = [random_matrix(rng, False) for _ in range(3)]
    for got, want in zip(unpack(pack(blocks)), blocks):
        np.testing.assert_array_equal(got, want)


def test_target_envelope_is_real():
    # the generator relies on a real envelope
    z = target_envelope(np.linspace(-3, 3, 7), TargetPulse(tau_p=0.7))
    assert np.all(z.imag == 0)
