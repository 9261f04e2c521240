"""Oracle-equivalence and invariant checks runnable from the CLI."""

from __future__ import annotations

import numpy as np

from .liouvillian import HierarchyState, coherent_rhs, fock_rhs
from .model import Params
from .observables import simulate
from .oracle import fssp_no_control_oracle


def _random_hermitian(rng, trace_one=True):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = m + m.conj().T
    return h / np.trace(h).real if trace_one else h


def _checks(quick: bool):
    taus = (0.5, 2.0) if quick else (0.5, 2.0, 10.0)
    worst = 0.0
    for topo in ("regular", "chiral", "sagnac"):
        for tau in taus:
            cfg = Params(topology=topo, tau_p=tau, gamma_eg=0.7, gamma_es=0.3).resolve()
            worst = max(worst, abs(simulate(cfg).P_s - fssp_no_control_oracle(cfg)))
    yield "oracle equivalence |dP_s| < 1e-6", worst < 1e-6, f"max {worst:.2e}"

    rng = np.random.default_rng(7)
    cfg = Params(gamma_eg=0.9, gamma_es=0.1, omega=0.7, a=0.9, b=0.6, delta=0.3).resolve()
    tr, herm = 0.0, 0.0
    for _ in range(20):
        s = HierarchyState(_random_hermitian(rng), rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)),
                           _random_hermitian(rng))
        d = fock_rhs(s, 0.3, cfg)
        tr = max(tr, abs(np.trace(d.rho11)), abs(np.trace(d.rho00)))
        herm = max(herm, np.abs(d.rho11 - d.rho11.conj().T).max())
        tr = max(tr, abs(np.trace(coherent_rhs(s.rho11, 0.3, cfg))))
    yield "rhs trace conservation", tr < 1e-12, f"max {tr:.1e}"
    yield "rhs Hermiticity propagation", herm < 1e-12, f"max {herm:.1e}"

    r = simulate(cfg)
    ok = r.trace_dev < 1e-7 and r.herm_defect < 1e-9 and r.min_eig > -1e-7
    yield "integration hygiene", ok, f"trace {r.trace_dev:.1e} herm {r.herm_defect:.1e} eig {r.min_eig:.1e}"

    a = simulate(Params(gamma_eg=0.3, gamma_es=0.7, tau_p=1.0).resolve()).P_s
    b = simulate(Params(gamma_eg=0.7, gamma_es=0.3, tau_p=1.0).resolve()).P_s
    yield "gamma_eg <-> gamma - gamma_eg symmetry", abs(a - b) < 1e-8, f"diff {abs(a - b):.1e}"

    ctl = dict(omega=0.7, a=0.9, b=0.6, tau_p=1.0)
    s = simulate(Params(topology="sagnac", gamma_eg=0.9, gamma_es=0.1, **ctl).resolve()).P_s
    c = simulate(Params(topology="chiral", gamma_eg=1.8, gamma_es=0.2, **ctl).resolve()).P_s
    yield "chiral(2x rates) == sagnac", abs(s - c) < 1e-8, f"diff {abs(s - c):.1e}"


def run_selftest(quick: bool = False) -> bool:
    ok_all = True
    for name, ok, detail in _checks(quick):
        ok_all &= bool(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    return ok_all
