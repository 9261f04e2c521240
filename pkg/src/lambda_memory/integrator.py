"""Adaptive Dormand-Prince 5(4) integration of the master equations.

The right-hand side is the sparse real-linear generator from
:func:`lambda_memory.liouvillian.build_generator`; the step loop is compiled
with numba and releases the GIL, so sweeps can run cells on threads.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from .liouvillian import IDX_PE, build_generator, initial_vector, unpack
from .model import SimulationConfig, Statistics
from .pulses import control_tail_time, target_tail_time


class NonConvergent(RuntimeError):
    """Hard end-time cap reached while the excited state is still populated."""


class StepUnderflow(RuntimeError):
    """Adaptive step shrank below the minimum allowed size."""


MIN_STEP = 1e-12

_OK, _CAP_OK, _CAP_BAD, _UNDERFLOW = 0, 1, 2, 3


@dataclass(frozen=True)
class IntegrationOptions:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float | None = None  # default 0.01 * min(tau_p, 1/gamma), floored at 1e-4/gamma
    window_pad_front: float = 6.0  # multiples of tau_p before t0
    tail_excited_threshold: float = 1e-8
    hard_t_end_cap: float | None = None  # default t0 + max(6 tau_p, b + 6a) + 40/gamma
    record: bool = True

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.window_pad_front <= 0:
            raise ValueError("window_pad_front must be positive")
        if self.max_step is not None and self.max_step <= 0:
            raise ValueError("max_step must be positive")


@dataclass
class Trajectory:
    t: np.ndarray
    P_g: np.ndarray
    P_e: np.ndarray
    P_s: np.ndarray
    trace_dev: np.ndarray
    min_eig: np.ndarray
    herm_defect: np.ndarray

    CSV_HEADER = "t,P_g,P_e,P_s,trace_dev,min_eig"

    def to_csv(self, path: str | Path | None = None) -> str:
        cols = np.column_stack([self.t, self.P_g, self.P_e, self.P_s, self.trace_dev, self.min_eig])
        lines = [self.CSV_HEADER]
        lines += [",".join(f"{v:.12g}" for v in row) for row in cols]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


@dataclass
class Diagnostics:
    converged: bool
    cap_reached: bool
    steps: int
    t_end: float
    max_trace_dev: float
    max_herm_defect: float
    min_eig: float
    vacuum_drift: float  # max deviation of rho00 from |g><g| (Fock only)
    runtime: float


@dataclass
class FinalState:
    rho_final: np.ndarray
    y_final: np.ndarray
    trajectory: Trajectory | None
    diagnostics: Diagnostics
    config: SimulationConfig = field(repr=False)


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)


@numba.njit(cache=True, nogil=True)
def _rhs(t, y, out, indptr, indices, c0, cxi, com, env):
    xi_norm, tau_p, t0, omega, a, b = env[0], env[1], env[2], env[3], env[4], env[5]
    dt = t - t0
    xi = xi_norm * math.exp(-dt * dt / (4.0 * tau_p * tau_p))
    om = 0.0
    if omega != 0.0:
        u = (dt - b) / (2.0 * a)
        om = omega * math.exp(-u * u)
    for i in range(out.shape[0]):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += (c0[k] + xi * cxi[k] + om * com[k]) * y[indices[k]]
        out[i] = acc


@numba.njit(cache=True, nogil=True)
def _dopri5(y0, t_start, t_src_end, t_cap, indptr, indices, c0, cxi, com, env,
            rtol, atol, max_step, pe_idx, pe_thr, record):
    n = y0.shape[0]
    cap = 1024 if record else 2
    ts = np.empty(cap)
    ys = np.empty((cap, n))
    ts[0] = t_start
    ys[0, :] = y0
    count = 1

    y = y0.copy()
    ynew = np.empty(n)
    tmp = np.empty(n)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)

    t = t_start
    h = min(max_step, 1e-3)
    _rhs(t, y, k1, indptr, indices, c0, cxi, com, env)
    status = _OK
    steps = 0
    while True:
        if t >= t_src_end and y[pe_idx] < pe_thr:
            status = _OK
            break
        if t >= t_cap:
            status = _CAP_OK if y[pe_idx] < pe_thr else _CAP_BAD
            break
        if h < MIN_STEP:
            status = _UNDERFLOW
            break
        if t + h > t_cap:
            h = t_cap - t

        for i in range(n):
            tmp[i] = y[i] + h * _A21 * k1[i]
        _rhs(t + _C2 * h, tmp, k2, indptr, indices, c0, cxi, com, env)
        for i in range(n):
            tmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        _rhs(t + _C3 * h, tmp, k3, indptr, indices, c0, cxi, com, env)
        for i in range(n):
            tmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _rhs(t + _C4 * h, tmp, k4, indptr, indices, c0, cxi, com, env)
        for i in range(n):
            tmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _rhs(t + _C5 * h, tmp, k5, indptr, indices, c0, cxi, com, env)
        for i in range(n):
            tmp[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                 + _A64 * k4[i] + _A65 * k5[i])
        _rhs(t + h, tmp, k6, indptr, indices, c0, cxi, com, env)
        for i in range(n):
            ynew[i] = y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                  + _B5 * k5[i] + _B6 * k6[i])
        _rhs(t + h, ynew, k7, indptr, indices, c0, cxi, com, env)

        err = 0.0
        for i in range(n):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            err += (e / sc) ** 2
        err = math.sqrt(err / n)

        if err <= 1.0:
            t = t + h
            steps += 1
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            if record:
                if count == cap:
                    cap *= 2
                    ts2 = np.empty(cap)
                    ys2 = np.empty((cap, n))
                    ts2[:count] = ts[:count]
                    ys2[:count, :] = ys[:count, :]
                    ts = ts2
                    ys = ys2
                ts[count] = t
                ys[count, :] = y
                count += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(h * fac, max_step)
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)

    if not record:
        ts[1] = t
        ys[1, :] = y
        count = 2
    return ts[:count], ys[:count], status, steps, t


def _sparse_union(gen):
    dense = np.stack([gen.m0, gen.m_xi, gen.m_omega])
    mask = np.any(dense != 0.0, axis=0)
    rows, cols = np.nonzero(mask)
    indptr = np.zeros(mask.shape[0] + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr)
    return (indptr, cols.astype(np.int64),
            np.ascontiguousarray(gen.m0[rows, cols]),
            np.ascontiguousarray(gen.m_xi[rows, cols]),
            np.ascontiguousarray(gen.m_omega[rows, cols]))


def time_window(config: SimulationConfig, options: IntegrationOptions) -> tuple[float, float, float]:
    """(start, end of sources, hard cap)."""
    tp, c = config.target, config.control
    t_start = tp.t0 - options.window_pad_front * tp.tau_p
    t_src = max(target_tail_time(tp), control_tail_time(c, tp.t0))
    if options.hard_t_end_cap is not None:
        t_cap = options.hard_t_end_cap
    else:
        t_cap = tp.t0 + max(6.0 * tp.tau_p, c.b + 6.0 * c.a) + 40.0 / config.gamma
    return t_start, t_src, t_cap


def default_max_step(config: SimulationConfig) -> float:
    g = config.gamma
    return max(0.01 * min(config.target.tau_p, 1.0 / g), 1e-4 / g)


def _diagnose(ys: np.ndarray, fock: bool):
    blocks = unpack(ys)
    rho = blocks[0]
    tr = np.einsum("nii->n", rho)
    trace_dev = np.abs(tr - 1.0)
    herm = np.abs(rho - np.conj(np.swapaxes(rho, -1, -2))).max(axis=(-1, -2))
    min_eig = np.linalg.eigvalsh(0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2))))[:, 0]
    drift = 0.0
    if fock:
        g = np.zeros((3, 3), complex)
        g[0, 0] = 1.0
        drift = float(np.abs(blocks[2] - g).max())
    pops = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    return pops, trace_dev, herm, min_eig, drift


def integrate(config: SimulationConfig, options: IntegrationOptions | None = None,
              strict: bool = True) -> FinalState:
    """Evolve the atom from |g><g| across the scattering window.

    With ``strict`` a run that hits the hard cap with P_e above threshold
    raises :class:`NonConvergent`; otherwise it is returned flagged.
    """
    options = options or IntegrationOptions()
    t_start, t_src, t_cap = time_window(config, options)
    max_step = options.max_step if options.max_step is not None else default_max_step(config)
    fock = config.target.statistics is Statistics.FOCK
    indptr, indices, c0, cxi, com = _sparse_union(build_generator(config))
    tp, c = config.target, config.control
    env = np.array([(1.0 / (2.0 * math.pi * tp.tau_p**2)) ** 0.25, tp.tau_p, tp.t0,
                    c.omega, c.a, c.b])

    tic = time.perf_counter()
    ts, ys, status, steps, t_end = _dopri5(
        initial_vector(config.target.statistics), t_start, t_src, t_cap,
        indptr, indices, c0, cxi, com, env,
        options.rel_tol, options.abs_tol, max_step,
        IDX_PE, options.tail_excited_threshold, options.record,
    )
    runtime = time.perf_counter() - tic
    if status == _UNDERFLOW:
        raise StepUnderflow(f"step size fell below {MIN_STEP:g} at t={t_end:.6g}")

    pops, trace_dev, herm, min_eig, drift = _diagnose(ys, fock)
    diag = Diagnostics(
        converged=status != _CAP_BAD,
        cap_reached=status != _OK,
        steps=int(steps),
        t_end=float(t_end),
        max_trace_dev=float(trace_dev.max()),
        max_herm_defect=float(herm.max()),
        min_eig=float(min_eig.min()),
        vacuum_drift=drift,
        runtime=runtime,
    )
    if strict and not diag.converged:
        raise NonConvergent(
            f"P_e={ys[-1, IDX_PE]:.3g} above threshold at hard cap t={t_cap:.6g}")
    traj = None
    if options.record:
        traj = Trajectory(ts, pops[:, 0], pops[:, 1], pops[:, 2], trace_dev, min_eig, herm)
    y_final = ys[-1].copy()
    return FinalState(unpack(y_final)[0], y_final, traj, diag, config)
