import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambda_memory.model import Params
from lambda_memory.observables import population, simulate, storage_efficiency


def _proj(i):
    m = np.zeros((3, 3), complex)
    m[i, i] = 1
    return m


def test_storage_efficiency_basis_states():
    assert storage_efficiency(_proj(2)) == 1.0
    assert storage_efficiency(_proj(0)) == 0.0


def test_population():
    for lvl in "ges":
        assert population(np.eye(3) / 3, lvl) == pytest.approx(1 / 3)
    assert population(_proj(1), "e") == 1.0


@given(st.integers(0, 2**32 - 1))
def test_populations_sum_to_trace(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = m + m.conj().T
    total = storage_efficiency(rho) + population(rho, "g") + population(rho, "e")
    assert total == pytest.approx(np.trace(rho).real, abs=1e-12)


def test_storage_result_bounds():
    r = simulate(Params(gamma_eg=0.9, gamma_es=0.1, omega=0.7, a=0.9, b=0.6).resolve())
    assert r.converged
    assert 0.0 <= r.P_s <= 1 + 1e-7
    assert r.P_s + r.P_g <= 1 + 1e-7
    assert 0.0 < r.P_e_max < 1.0
