"""Two-axis parameter sweeps, figure-data presets and their serialisation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .eplocator import resolve_ep_magnitudes
from .errors import InvalidParameterError, NumericalError
from .linmodel import QuadIndex
from .model import TWO_PI, PhysicalParams, RunOptions, config_mapping, paper_defaults
from .nonreciprocity import nonreciprocity_measure
from .parallel import ordered_map
from .spectra import default_grid, evaluate, prepare

AXES = {
    "phi": "rad",
    "mu_over_ep2": "1",
    "mu_over_ep1": "1",
    "mu_abs_over_gamma_sum": "1",
    "omega_over_omega_m": "1",
}
SPECTRAL_KINDS = ("internal", "output", "contribution", "contribution_output", "homodyne")
FLOW_KINDS = ("i_delta", "flow_21", "flow_12")


@dataclass(frozen=True)
class Axis:
    name: str
    values: np.ndarray

    def __post_init__(self):
        if self.name not in AXES:
            raise InvalidParameterError(f"unknown axis {self.name!r}; expected one of {sorted(AXES)}")
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.size == 0 or not np.all(np.isfinite(vals)):
            raise InvalidParameterError(f"axis {self.name!r} must be a nonempty finite array")
        object.__setattr__(self, "values", vals)

    @property
    def unit(self) -> str:
        return AXES[self.name]

    @property
    def column(self) -> str:
        return f"{self.name}[{self.unit}]"


@dataclass(frozen=True)
class QuantitySpec:
    """A scalar per grid point.

    Spectral kinds read entry (row, col) of the named spectrum at
    ``omega_over_omega_m`` unless an axis supplies the frequency; flow kinds
    come from the integrated non-reciprocity analysis.
    """

    kind: str
    row: str = "Y_b2"
    col: str | None = None
    theta: float = 0.0
    omega_over_omega_m: float = 1.0
    tol: float = 1e-8

    def __post_init__(self):
        if self.kind not in SPECTRAL_KINDS + FLOW_KINDS:
            raise InvalidParameterError(
                f"unknown quantity kind {self.kind!r}; expected one of {SPECTRAL_KINDS + FLOW_KINDS}")
        QuadIndex.parse(self.row)
        if self.col is not None:
            QuadIndex.parse(self.col)

    @property
    def label(self) -> str:
        if self.kind in FLOW_KINDS:
            return self.kind
        col = self.row if self.col is None else self.col
        if self.kind == "homodyne":
            return f"homodyne(theta={self.theta:.12g})"
        if self.kind.startswith("contribution"):
            return f"{self.kind}[{col}->{self.row}]"
        return f"{self.kind}[{self.row},{col}]"


@dataclass(frozen=True, eq=False)
class SweepGrid:
    axis1: Axis
    axis2: Axis
    values: np.ndarray
    quantity: str
    meta: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def mask(self) -> np.ndarray:
        return ~np.isfinite(self.values)

    def transposed(self) -> "SweepGrid":
        diag = {(j, i): msg for (i, j), msg in self.diagnostics.items()}
        return SweepGrid(self.axis2, self.axis1, self.values.T.copy(), self.quantity, self.meta, diag)


def _point_params(p: PhysicalParams, coords: dict, eps: tuple[float, float] | None) -> PhysicalParams:
    changes = {}
    if "phi" in coords:
        changes["phi_loop"] = coords["phi"]
    if "mu_abs_over_gamma_sum" in coords:
        changes["mu_abs"] = coords["mu_abs_over_gamma_sum"] * p.gamma_sum
    if "mu_over_ep1" in coords:
        changes["mu_abs"] = coords["mu_over_ep1"] * eps[0]
    if "mu_over_ep2" in coords:
        changes["mu_abs"] = coords["mu_over_ep2"] * eps[1]
    return p.replace(**changes) if changes else p


def _evaluate_point(task):
    """Values of one quantity at a parameter point over a vector of frequencies."""
    p, spec, omegas, options = task
    try:
        if spec.kind in FLOW_KINDS:
            flow = nonreciprocity_measure(p, tol=spec.tol)
            return np.full(len(omegas), getattr(flow, spec.kind)), None
        system = prepare(p, tol=options.ss_tol, max_iter=options.ss_max_iter)
        vals = evaluate(system, spec.kind, omegas, row=spec.row, col=spec.col, theta=spec.theta)
        return np.asarray(vals).real.astype(float), None
    except (NumericalError, ArithmeticError) as exc:
        return np.full(len(omegas), math.nan), f"{type(exc).__name__}: {exc}"


def sweep(spec: QuantitySpec, axis1: Axis, axis2: Axis, p: PhysicalParams,
          options: RunOptions | None = None, jobs: int | None = 1,
          ep_magnitudes: tuple[float, float] | None = None) -> SweepGrid:
    """Evaluate ``spec`` on the axis1 x axis2 grid; values[i, j] belongs to (axis1[i], axis2[j]).

    A fresh steady state and model are built at every parameter point. A
    frequency axis is evaluated as one vector per parameter point. Failed
    points become NaN cells with a diagnostic instead of aborting the sweep.
    """
    options = options or RunOptions()
    if axis1.name == axis2.name:
        raise InvalidParameterError("sweep axes must differ")
    mu_axes = {"mu_over_ep2", "mu_over_ep1", "mu_abs_over_gamma_sum"}
    if {axis1.name, axis2.name} <= mu_axes:
        raise InvalidParameterError("two coupling-strength axes cannot be combined")
    if "omega_over_omega_m" in (axis1.name, axis2.name) and spec.kind in FLOW_KINDS:
        raise InvalidParameterError(f"{spec.kind} is frequency-integrated; drop the frequency axis")
    if {axis1.name, axis2.name} & {"mu_over_ep1", "mu_over_ep2"} and ep_magnitudes is None:
        ep_magnitudes = resolve_ep_magnitudes(p, jobs=jobs)

    if axis1.name == "omega_over_omega_m":
        return sweep(spec, axis2, axis1, p, options, jobs, ep_magnitudes).transposed()

    freq_axis = axis2.name == "omega_over_omega_m"
    if freq_axis:
        points = [(i, None, {axis1.name: v}) for i, v in enumerate(axis1.values)]
        omegas = axis2.values * p.omega_m
    else:
        points = [(i, j, {axis1.name: a, axis2.name: b})
                  for i, a in enumerate(axis1.values) for j, b in enumerate(axis2.values)]
        omegas = np.array([spec.omega_over_omega_m * p.omega_m])
    tasks = [(_point_params(p, coords, ep_magnitudes), spec, omegas, options)
             for _, _, coords in points]

    results = ordered_map(_evaluate_point, tasks, jobs)

    values = np.empty((axis1.values.size, axis2.values.size))
    diagnostics = {}
    for (i, j, _), (vals, msg) in zip(points, results):
        if freq_axis:
            values[i, :] = vals
            if msg:
                diagnostics.update({(i, k): msg for k in range(axis2.values.size)})
        else:
            values[i, j] = vals[0]
            if msg:
                diagnostics[(i, j)] = msg

    meta = {"config": config_mapping(p, options), "quantity": spec.label,
            "axes": [axis1.column, axis2.column], "version": __version__}
    if ep_magnitudes is not None:
        meta["mu_ep"] = _ep_meta(p, ep_magnitudes)
    return SweepGrid(axis1, axis2, values, spec.label, meta, diagnostics)


def _ep_meta(p: PhysicalParams, eps) -> dict:
    return {"mu_ep1_rad_s": eps[0], "mu_ep2_rad_s": eps[1],
            "mu_ep1_over_gamma_sum": eps[0] / p.gamma_sum,
            "mu_ep2_over_gamma_sum": eps[1] / p.gamma_sum}


# --------------------------------------------------------------------------
# serialisation

def _fmt(x: float) -> str:
    return "nan" if not math.isfinite(x) else "%.12e" % x


def format_csv(header: list[str], columns: list[np.ndarray]) -> str:
    """Comma-separated table with ``%.12e`` floats, one row per line."""
    rows = zip(*[np.asarray(c, dtype=float) for c in columns])
    lines = [",".join(header)] + [",".join(_fmt(float(v)) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, header: list[str], columns: list[np.ndarray]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(header, columns), encoding="ascii", newline="\n")
    return path


def format_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_json(payload), encoding="utf-8", newline="\n")
    return path


def write_grid(grid: SweepGrid, path) -> list[Path]:
    """Long-format CSV (axis1, axis2, value) in row-major order plus a JSON sidecar."""
    a, b = np.meshgrid(grid.axis1.values, grid.axis2.values, indexing="ij")
    csv = write_csv(path, [grid.axis1.column, grid.axis2.column, "value"],
                    [a.ravel(), b.ravel(), grid.values.ravel()])
    meta = dict(grid.meta)
    meta["masked_cells"] = [{"index": list(k), "reason": v} for k, v in sorted(grid.diagnostics.items())]
    meta["shape"] = list(grid.values.shape)
    side = write_json(Path(path).with_suffix(".json"), meta)
    return [csv, side]


# --------------------------------------------------------------------------
# presets

PHASES_FULL = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
PHASES_HALF = (0.5 * math.pi, 1.5 * math.pi)
PHASE_NAMES = {0.0: "0", 0.5 * math.pi: "pi_2", math.pi: "pi", 1.5 * math.pi: "3pi_2"}

# name -> (coupling as (ep index, factor), loop phases, spectral series)
_LINE_PRESETS = {
    "fig2a": ((2, 1.0), PHASES_FULL, [("S_Ya", {"quantity": "internal", "row": "Y_a"})]),
    "fig2b": ((2, 1.0), PHASES_FULL,
              [("S_out_b2_to_cav", {"quantity": "contribution_output", "row": "Y_a", "col": "Y_b2"})]),
    "fig3": ((2, 1.0), PHASES_HALF,
             [("S_Yb1", {"quantity": "internal", "row": "Y_b1"}),
              ("S_Yb2", {"quantity": "internal", "row": "Y_b2"})]),
    "fig4": ((2, 1.0), PHASES_HALF,
             [("S_2_to_1", {"quantity": "contribution", "row": "Y_b1", "col": "Y_b2"}),
              ("S_1_to_2", {"quantity": "contribution", "row": "Y_b2", "col": "Y_b1"})]),
}
_LINE_PRESETS["figA1"] = ((1, 1.0), PHASES_FULL, _LINE_PRESETS["fig2a"][2] + _LINE_PRESETS["fig2b"][2])
_LINE_PRESETS["figA2"] = ((1, 1.0), PHASES_HALF, _LINE_PRESETS["fig3"][2])
for _name, _coupling in (("figA3", (1, 0.5)), ("figA4", (1, 1.0)), ("figA5", (1, 1.5)),
                         ("figA6", (2, 1.5)), ("figA7", (2, 2.0))):
    _LINE_PRESETS[_name] = (_coupling, PHASES_HALF, _LINE_PRESETS["fig4"][2])

PRESETS = ("fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6", "fig7",
           "figA1", "figA2", "figA3", "figA4", "figA5", "figA6", "figA7")


@dataclass(frozen=True)
class PresetDensity:
    phi_points: int = 361
    mu_points: int = 121
    omega_points: int = 2001


def run_preset(name: str, out_dir, p: PhysicalParams | None = None, options: RunOptions | None = None,
               jobs: int | None = 1, density: PresetDensity = PresetDensity(),
               ep_magnitudes: tuple[float, float] | None = None) -> list[Path]:
    """Regenerate the data behind one figure; returns the written paths.

    Line presets write one CSV with a frequency column and one column per
    (series, loop phase). Grid presets write a long-format sweep CSV. Every
    CSV has a JSON sidecar with the configuration and the resolved EP
    magnitudes.
    """
    if name not in PRESETS:
        raise InvalidParameterError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")
    p = p or paper_defaults()
    options = options or RunOptions()
    eps = ep_magnitudes or resolve_ep_magnitudes(p, jobs=jobs)
    out_dir = Path(out_dir)
    base_meta = {"preset": name, "config": config_mapping(p, options), "version": __version__,
                 "mu_ep": _ep_meta(p, eps)}

    if name in _LINE_PRESETS:
        (which, factor), phases, series = _LINE_PRESETS[name]
        mu = factor * eps[which - 1]
        q = p.replace(mu_abs=mu)
        omegas = default_grid(q, density.omega_points)
        header, cols = ["omega_over_omega_m"], [omegas / p.omega_m]
        for phi in phases:
            system = prepare(q.replace(phi_loop=phi), tol=options.ss_tol, max_iter=options.ss_max_iter)
            for label, kw in series:
                header.append(f"{label}_phi_{PHASE_NAMES[phi]}")
                cols.append(np.asarray(evaluate(system, omega=omegas, **kw)).real)
        meta = dict(base_meta, mu_abs_rad_s=mu, coupling=f"{factor:g} * mu_ep{which}",
                    columns=header, series={label: kw for label, kw in series})
        return [write_csv(out_dir / f"{name}.csv", header, cols),
                write_json(out_dir / f"{name}.json", meta)]

    phis = np.linspace(0.0, TWO_PI, density.phi_points, endpoint=False)
    if name == "fig5":
        grid = sweep(QuantitySpec("i_delta", tol=options.quad_tol), Axis("phi", phis),
                     Axis("mu_over_ep2", np.linspace(0.1, 2.0, density.mu_points)),
                     p, options, jobs, eps)
    elif name == "fig6":
        grid = sweep(QuantitySpec("internal", row="Y_b2", omega_over_omega_m=1.0), Axis("phi", phis),
                     Axis("mu_abs_over_gamma_sum", np.linspace(1.0, 90.0, density.mu_points)),
                     p, options, jobs, eps)
    else:
        w = default_grid(p.replace(mu_abs=eps[1]), density.omega_points) / p.omega_m
        grid = sweep(QuantitySpec("internal", row="Y_b2"),
                     Axis("mu_abs_over_gamma_sum", np.linspace(1.0, 90.0, density.mu_points)),
                     Axis("omega_over_omega_m", w), p.replace(phi_loop=0.5 * math.pi), options, jobs, eps)
    grid = SweepGrid(grid.axis1, grid.axis2, grid.values, grid.quantity,
                     dict(grid.meta, **base_meta), grid.diagnostics)
    return write_grid(grid, out_dir / f"{name}.csv")
