"""Gaussian envelopes of the target photon and the classical control."""

from __future__ import annotations

import math

import numpy as np

from .model import ControlPulse, TargetPulse

# relative envelope level treated as "pulse over"
TAIL_LEVEL = 1e-6


def target_envelope(t, p: TargetPulse):
    """Temporal wave packet, normalised so that the integral of |xi|^2 is 1."""
    norm = (1.0 / (2.0 * math.pi * p.tau_p**2)) ** 0.25
    return norm * np.exp(-((np.asarray(t) - p.t0) ** 2) / (4.0 * p.tau_p**2)) + 0j


def control_envelope(t, c: ControlPulse, t0: float):
    return c.omega * np.exp(-(((np.asarray(t) - t0 - c.b) / (2.0 * c.a)) ** 2))


def pulse_area(c: ControlPulse) -> float:
    return 2.0 * c.a * c.omega * math.sqrt(math.pi)


def target_tail_time(p: TargetPulse, level: float = TAIL_LEVEL) -> float:
    """Time after which the target envelope stays below ``level`` of its peak."""
    return p.t0 + 2.0 * p.tau_p * math.sqrt(-math.log(level))


def control_tail_time(c: ControlPulse, t0: float, level: float = TAIL_LEVEL) -> float:
    if c.omega == 0.0:
        return -math.inf
    return t0 + c.b + 2.0 * c.a * math.sqrt(-math.log(level))
