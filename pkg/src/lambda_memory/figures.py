"""Registry of the published parameter sets, reproduced as CSV tables.

Heatmap figures become a single 2-D :class:`SweepTable`; curve figures
become one 1-D table per curve plus a manifest. Figures 7-10 use the
Sagnac coupling (pump doubled, decay rates unchanged), which equals a
chiral waveguide whose bare rates are twice the quoted ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .integrator import IntegrationOptions
from .model import Params
from .output import write_atomic
from .sweep import AxisSpec, OptimizeSpec, SweepTable, apply_param, optimize, run_sweep


class UnknownFigure(KeyError):
    pass


HEATMAP_STEPS = 60
CURVE_POINTS = 40

_NO_CONTROL = Params(gamma_eg=0.5, gamma_es=0.5)
_CONTROLLED = Params(gamma_eg=0.9, gamma_es=0.1, omega=0.7, a=0.9, b=0.6)

# (b, a, omega) triples for the shift of the favourable pulse length;
# omega is in units of gamma
FIG10A_TRIPLES = ((1.3, 0.7, 1.5), (0.6, 0.9, 0.7), (-0.4, 1.2, 0.4))


@dataclass(frozen=True)
class Curve:
    label: str
    params: Params
    optimize_over: tuple[str, ...] = ()


@dataclass(frozen=True)
class FigureSpec:
    id: str
    title: str
    base: Params = field(default_factory=Params)
    axes: tuple[AxisSpec, ...] = ()
    curves: tuple[Curve, ...] = ()
    curve_axis: AxisSpec | None = None

    @property
    def kind(self) -> str:
        return "heatmap" if self.axes else "curves"


def _tau(lo, hi, n=CURVE_POINTS):
    return AxisSpec("tau_p", lo, hi, n, "log")


def _gamma_tau(base, topology):
    return FigureSpec("", "", base.with_(topology=topology),
                      (AxisSpec("gamma_eg", 0.05, 0.95, HEATMAP_STEPS),
                       _tau(0.2, 20.0, HEATMAP_STEPS)))


def _registry() -> dict[str, FigureSpec]:
    reg = {}

    def add(fid, title, template=None, **kw):
        if template is not None:
            kw = dict(base=template.base, axes=template.axes) | kw
        reg[fid] = FigureSpec(fid, title, **kw)

    fock, coh = "fock", "coherent"
    add("2a", "P_s vs gamma_eg and tau_p, Fock, no control",
        _gamma_tau(_NO_CONTROL.with_(statistics=fock), "regular"))
    add("2b", "P_s vs gamma_eg and tau_p, coherent, no control",
        _gamma_tau(_NO_CONTROL.with_(statistics=coh), "regular"))
    add("3a", "Fock vs coherent, no control", curves=(
        Curve("fock", _NO_CONTROL), Curve("coherent", _NO_CONTROL.with_(statistics=coh))),
        curve_axis=_tau(0.2, 50.0))
    add("3b", "Fock vs coherent, with control", curves=(
        Curve("fock", _CONTROLLED), Curve("coherent", _CONTROLLED.with_(statistics=coh))),
        curve_axis=_tau(0.2, 20.0))
    add("4b", "P_s vs control amplitude and width", base=_CONTROLLED,
        axes=(AxisSpec("omega", 0.0, 3.0, HEATMAP_STEPS), AxisSpec("a", 0.1, 2.0, HEATMAP_STEPS)))
    add("5a", "P_s vs control width and delay", base=_CONTROLLED,
        axes=(AxisSpec("a", 0.1, 3.0, HEATMAP_STEPS), AxisSpec("b", -2.0, 3.0, HEATMAP_STEPS)))
    add("5b", "P_s vs tau_p and control width", base=_CONTROLLED,
        axes=(_tau(0.2, 10.0, HEATMAP_STEPS), AxisSpec("a", 0.1, 3.0, HEATMAP_STEPS)))
    add("5c", "P_s vs tau_p and detuning", base=_CONTROLLED,
        axes=(_tau(0.2, 10.0, HEATMAP_STEPS), AxisSpec("delta", -2.0, 2.0, HEATMAP_STEPS)))

    sag_nc = _NO_CONTROL.with_(topology="sagnac")
    sag_c = _CONTROLLED.with_(topology="sagnac")
    add("7a", "enhanced coupling, Fock, no control",
        _gamma_tau(_NO_CONTROL.with_(statistics=fock), "sagnac"))
    add("7b", "enhanced coupling, coherent, no control",
        _gamma_tau(_NO_CONTROL.with_(statistics=coh), "sagnac"))
    add("8a", "enhanced coupling, Fock vs coherent, no control", curves=(
        Curve("fock", sag_nc), Curve("coherent", sag_nc.with_(statistics=coh))),
        curve_axis=_tau(0.2, 50.0))
    add("8b", "enhanced coupling, Fock vs coherent, with control", curves=(
        Curve("fock", sag_c), Curve("coherent", sag_c.with_(statistics=coh))),
        curve_axis=_tau(0.2, 20.0))
    add("9a", "enhanced coupling, tau_p and control width", base=sag_c,
        axes=(_tau(0.2, 10.0, HEATMAP_STEPS), AxisSpec("a", 0.1, 3.0, HEATMAP_STEPS)))
    add("9b", "enhanced coupling, tau_p and detuning", base=sag_c,
        axes=(_tau(0.2, 10.0, HEATMAP_STEPS), AxisSpec("delta", -2.0, 2.0, HEATMAP_STEPS)))
    add("10a", "shift of the favourable pulse length", curves=tuple(
        Curve(f"b{b:+g}", sag_c.with_(b=b, a=a, omega=om)) for b, a, om in FIG10A_TRIPLES),
        curve_axis=_tau(0.2, 10.0))
    free = ("a", "b", "omega", "delta")
    add("10b", "global optimum vs no control", curves=(
        Curve("optimum_geg0.9", sag_c, free),
        Curve("optimum_geg0.8", sag_c.with_(gamma_eg=0.8, gamma_es=0.2), free),
        Curve("nocontrol_geg0.9", sag_c.with_(omega=0.0)),
        Curve("nocontrol_geg0.5", sag_nc)),
        curve_axis=_tau(0.3, 10.0, 12))
    return reg


FIGURES = _registry()


def get_figure(fid: str) -> FigureSpec:
    try:
        return FIGURES[fid.lower()]
    except KeyError:
        raise UnknownFigure(f"unknown figure {fid!r}; known: {', '.join(FIGURES)}") from None


@dataclass
class OptimizedCurve:
    """Best P_s per abscissa value with the argmax parameters."""

    axis: AxisSpec
    values: np.ndarray
    best_P_s: np.ndarray
    best_params: list[dict]
    base: Params

    def to_csv(self, extra_header=None) -> str:
        free = sorted(self.best_params[0]) if self.best_params else []
        lines = list(extra_header or []) + ["# " + s for s in self.base.to_lines()]
        lines.append(f"# axis={self.axis.describe()}")
        lines.append(",".join([self.axis.name, "P_s"] + free))
        for x, ps, prm in zip(self.values, self.best_P_s, self.best_params):
            lines.append(",".join(f"{v:.12g}" for v in [x, ps] + [prm[k] for k in free]))
        return "\n".join(lines) + "\n"


@dataclass
class FigureResult:
    spec: FigureSpec
    tables: dict  # label -> SweepTable | OptimizedCurve

    def curve(self, label: str) -> np.ndarray:
        t = self.tables[label]
        return t.best_P_s if isinstance(t, OptimizedCurve) else t.grid()

    def write(self, outdir: str | Path) -> list[Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        manifest = [f"figure={self.spec.id}", f"title={self.spec.title}", f"kind={self.spec.kind}"]
        for label, table in self.tables.items():
            name = f"fig{self.spec.id}.csv" if self.spec.kind == "heatmap" else f"fig{self.spec.id}_{label}.csv"
            header = [f"# figure={self.spec.id}", f"# curve={label}"]
            written.append(write_atomic(outdir / name, table.to_csv(header)))
            params = " ".join(table.base.to_lines())
            manifest.append(f"curve={label} file={name} {params}")
        written.append(write_atomic(outdir / "manifest.txt", "\n".join(manifest) + "\n"))
        return written


def _resize(ax: AxisSpec, points: int | None) -> AxisSpec:
    if points is None:
        return ax
    return AxisSpec(ax.name, ax.min, ax.max, points, ax.scale)


def optimized_curve(base: Params, axis: AxisSpec, free, spec: OptimizeSpec | None = None,
                    workers=None, options: IntegrationOptions | None = None) -> OptimizedCurve:
    spec = spec or OptimizeSpec(multistart=6, max_evals=900, tol=1e-5)
    bounds = {k: spec.bounds[k] for k in free}
    spec = OptimizeSpec(bounds, spec.multistart, spec.tol, spec.max_evals, spec.seed, spec.include_base)
    values = axis.values()
    best, params = [], []
    for x in values:
        res = optimize(apply_param(base, axis.name, x), spec, workers, options)
        best.append(res.best_P_s)
        params.append(res.best_params)
    return OptimizedCurve(axis, values, np.array(best), params, base)


def figure(fid: str, points: int | None = None, workers: int | None = None,
           options: IntegrationOptions | None = None,
           optimize_spec: OptimizeSpec | None = None) -> FigureResult:
    """Compute one registered figure; ``points`` overrides every axis length."""
    spec = get_figure(fid)
    if spec.kind == "heatmap":
        axes = tuple(_resize(ax, points) for ax in spec.axes)
        return FigureResult(spec, {"grid": run_sweep(spec.base, axes, workers, options)})
    axis = _resize(spec.curve_axis, points)
    tables: dict[str, SweepTable | OptimizedCurve] = {}
    for c in spec.curves:
        if c.optimize_over:
            tables[c.label] = optimized_curve(c.params, axis, c.optimize_over, optimize_spec,
                                              workers, options)
        else:
            tables[c.label] = run_sweep(c.params, (axis,), workers, options)
    return FigureResult(spec, tables)
