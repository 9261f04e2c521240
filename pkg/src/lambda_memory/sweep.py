"""Grid sweeps and multistart simplex optimisation of the storage probability."""

from __future__ import annotations

import itertools
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .integrator import IntegrationOptions
from .model import ConfigError, Params
from .observables import StorageResult, simulate

SWEEPABLE = ("gamma_eg", "tau_p", "omega", "a", "b", "delta", "nbar")


class BudgetExhausted(RuntimeWarning):
    pass


@dataclass(frozen=True)
class AxisSpec:
    name: str
    min: float
    max: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {self.name!r}; choose from {', '.join(SWEEPABLE)}")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.name}: need min < max")
        if self.steps < 2:
            raise ConfigError(f"axis {self.name}: need at least 2 steps")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis {self.name}: scale must be linear or log")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError(f"axis {self.name}: log scale needs min > 0")

    @classmethod
    def parse(cls, text: str) -> "AxisSpec":
        """``name:min:max:steps[:log]``"""
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ConfigError(f"bad axis {text!r}; expected name:min:max:steps[:log]")
        try:
            lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise ConfigError(f"bad axis {text!r}") from None
        scale = parts[4] if len(parts) == 5 else "linear"
        return cls(parts[0], lo, hi, n, scale)

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.steps)
        return np.linspace(self.min, self.max, self.steps)

    def describe(self) -> str:
        tail = ":log" if self.scale == "log" else ""
        return f"{self.name}:{self.min!r}:{self.max!r}:{self.steps}{tail}"


def apply_param(params: Params, name: str, value: float) -> Params:
    """Set one swept parameter; sweeping gamma_eg keeps gamma fixed."""
    if name == "gamma_eg":
        total = params.gamma_eg + params.gamma_es
        return params.with_(gamma_eg=float(value), gamma_es=total - float(value))
    return params.with_(**{name: float(value)})


def default_workers() -> int:
    env = os.environ.get("LM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def evaluate_many(params_list, workers: int | None = None,
                  options: IntegrationOptions | None = None) -> list[StorageResult]:
    """Simulate each parameter set; results come back in input order."""
    configs = [p.resolve() for p in params_list]
    workers = workers or default_workers()
    if workers == 1 or len(configs) == 1:
        return [simulate(c, options) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: simulate(c, options), configs))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return f"{float(v):.12g}"


@dataclass
class SweepTable:
    axes: tuple[AxisSpec, ...]
    values: tuple[np.ndarray, ...]
    results: list[StorageResult]
    base: Params

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.values)

    def grid(self, attr: str = "P_s") -> np.ndarray:
        return np.array([getattr(r, attr) for r in self.results]).reshape(self.shape)

    @property
    def n_bad(self) -> int:
        return sum(not r.converged for r in self.results)

    def header_lines(self) -> list[str]:
        lines = ["# " + s for s in self.base.to_lines()]
        lines += [f"# axis={ax.describe()}" for ax in self.axes]
        return lines

    def to_csv(self, extra_header: list[str] | None = None) -> str:
        lines = list(extra_header or []) + self.header_lines()
        lines.append(",".join([ax.name for ax in self.axes]
                              + ["P_s", "P_e_max", "trace_dev", "converged"]))
        for point, r in zip(itertools.product(*self.values), self.results):
            row = [_fmt(v) for v in point]
            row += [_fmt(r.P_s), _fmt(r.P_e_max), _fmt(r.trace_dev), _fmt(r.converged)]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def run_sweep(base: Params, axes, workers: int | None = None,
              options: IntegrationOptions | None = None) -> SweepTable:
    axes = tuple(axes)
    if not 1 <= len(axes) <= 2:
        raise ConfigError("a sweep takes one or two axes")
    if len({ax.name for ax in axes}) != len(axes):
        raise ConfigError("axes must be distinct parameters")
    values = tuple(ax.values() for ax in axes)
    points = []
    for point in itertools.product(*values):
        p = base
        for ax, v in zip(axes, point):
            p = apply_param(p, ax.name, v)
        points.append(p)
    results = evaluate_many(points, workers, options)
    return SweepTable(axes, values, results, base)


# -- optimisation -------------------------------------------------------------

DEFAULT_BOUNDS = {
    "a": (0.1, 3.0),
    "b": (-2.0, 3.0),
    "omega": (0.0, 3.0),
    "delta": (-2.0, 2.0),
    "tau_p": (0.2, 50.0),
}


@dataclass(frozen=True)
class OptimizeSpec:
    """Box-bounded maximisation of P_s over a subset of parameters.

    ``a`` and ``b`` bounds are in the base config's units (multiples of
    tau_p when ``relative_units`` is set).
    """

    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    multistart: int = 16
    tol: float = 1e-5
    max_evals: int = 4000
    seed: int = 0
    include_base: bool = False  # also start from the base config's own point

    def __post_init__(self):
        for k, (lo, hi) in self.bounds.items():
            if k not in SWEEPABLE:
                raise ConfigError(f"cannot optimise {k!r}")
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ConfigError(f"bad bounds for {k}: ({lo}, {hi})")
        if self.multistart < 1 or self.max_evals < 1 or self.tol <= 0:
            raise ConfigError("multistart, max_evals and tol must be positive")


@dataclass
class Evaluation:
    params: dict
    P_s: float
    best_so_far: float


@dataclass
class OptimizeResult:
    best_params: dict
    best_P_s: float
    best_config: Params
    log: list[Evaluation]
    n_evals: int
    budget_exhausted: bool
    start_bests: list[float]


def optimize(base: Params, spec: OptimizeSpec, workers: int | None = None,
             options: IntegrationOptions | None = None) -> OptimizeResult:
    """Multistart downhill simplex within the box.

    Starts come from a seeded scrambled Halton sequence; each start runs
    Nelder-Mead in box-normalised coordinates with an equal share of the
    evaluation budget. Starts are independent and may run concurrently;
    the log is assembled in start order, so results do not depend on
    scheduling.
    """
    fixed = {k: lo for k, (lo, hi) in spec.bounds.items() if lo == hi}
    free = [k for k, (lo, hi) in spec.bounds.items() if lo < hi]
    lo = np.array([spec.bounds[k][0] for k in free])
    span = np.array([spec.bounds[k][1] - spec.bounds[k][0] for k in free])
    base = _apply(base, fixed)

    def params_at(u) -> Params:
        x = lo + np.clip(u, 0.0, 1.0) * span
        return _apply(base, dict(zip(free, map(float, x))))

    def value(p: Params) -> float:
        r = simulate(p.resolve(), options)
        return r.P_s if r.converged and math.isfinite(r.P_s) else -math.inf

    if not free:
        ps = value(base)
        log = [Evaluation(dict(fixed), ps, ps)]
        return OptimizeResult(dict(fixed), ps, base, log, 1, False, [ps])

    d = len(free)
    starts = qmc.Halton(d, scramble=True, seed=spec.seed).random(spec.multistart)
    if spec.include_base:
        u_base = np.clip((np.array([float(getattr(base, k)) for k in free]) - lo) / span, 0.0, 1.0)
        starts = np.vstack([u_base, starts])
    per_start = max(d + 2, spec.max_evals // len(starts))

    def run_start(u0):
        evals = []

        def f(u):
            p = params_at(u)
            ps = value(p)
            evals.append((dict(zip(free, (float(getattr(p, k)) for k in free))) | fixed, ps))
            return -ps if math.isfinite(ps) else 1.0

        simplex = [u0]
        for i in range(d):
            v = u0.copy()
            v[i] = v[i] + 0.1 if v[i] + 0.1 <= 1.0 else v[i] - 0.1
            simplex.append(v)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = minimize(f, u0, method="Nelder-Mead", bounds=[(0.0, 1.0)] * d,
                           options=dict(initial_simplex=np.array(simplex), xatol=1e-4,
                                        fatol=spec.tol, maxfev=per_start))
        return evals, bool(res.nfev >= per_start and not res.success)

    workers = workers or default_workers()
    if workers == 1:
        outcomes = [run_start(u) for u in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_start, starts))

    log, best, best_params, start_bests = [], -math.inf, None, []
    exhausted = False
    for evals, hit_budget in outcomes:
        exhausted |= hit_budget
        start_bests.append(max(ps for _, ps in evals))
        for prm, ps in evals:
            if ps > best:
                best, best_params = ps, prm
            log.append(Evaluation(prm, ps, best))
    if exhausted:
        warnings.warn("optimizer hit its evaluation budget on at least one start",
                      BudgetExhausted, stacklevel=2)
    return OptimizeResult(best_params, best, _apply(base, best_params), log, len(log),
                          exhausted, start_bests)


def _apply(p: Params, values: dict) -> Params:
    for k, v in values.items():
        p = apply_param(p, k, v)
    return p
