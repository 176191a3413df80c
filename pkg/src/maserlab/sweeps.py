"""Parameter-grid sweeps over cavity quality, pump rate and drive power.

Each grid cell rebuilds the derived rates and dispatches to the steady-state,
linewidth, sensitivity or amplifier machinery. Cells are independent, so they
are evaluated on a thread pool and gathered by index; per-cell failures mark
the affected quantities as NaN without aborting the sweep.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Mapping

import numpy as np

from .errors import ParameterError
from .params import SystemParams, derive_rates
from . import __version__
from . import amplifier
from . import correlations
from . import linewidth
from . import meanfield
from . import sensitivity

AXIS_NAMES = ("Q", "w", "P_in")
SCALES = ("log", "linear")
QUANTITIES = ("S_z", "P_out", "spin_corr", "T_coh", "delta_B", "delta_x",
              "gain_db", "T_n", "regime")
THREADS_ENV = "MASERLAB_THREADS"


@dataclass(frozen=True)
class Axis:
    name: str
    minimum: float
    maximum: float
    points: int
    scale: str = "log"

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ParameterError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.scale not in SCALES:
            raise ParameterError(f"axis scale must be one of {SCALES}, got {self.scale!r}")
        if self.points < 1:
            raise ParameterError("axis needs at least one point")
        if not (self.minimum <= self.maximum):
            raise ParameterError("axis minimum must not exceed maximum")
        if self.scale == "log" and self.minimum <= 0.0:
            raise ParameterError("log axes need positive bounds")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.minimum), math.log10(self.maximum),
                               self.points)
        return np.linspace(self.minimum, self.maximum, self.points)


@dataclass(frozen=True)
class GridSpec:
    base: SystemParams
    x: Axis
    y: Axis
    quantities: tuple[str, ...]
    p_in_w: float = 0.0      # drive power when P_in is not an axis; 0 = undriven

    def __post_init__(self) -> None:
        if self.x.name == self.y.name:
            raise ParameterError("sweep axes must differ")
        bad = [q for q in self.quantities if q not in QUANTITIES]
        if bad:
            raise ParameterError(f"unknown quantities {bad}; allowed: {QUANTITIES}")
        if not self.quantities:
            raise ParameterError("at least one quantity is required")
        if self.p_in_w < 0.0:
            raise ParameterError("drive power must be non-negative")


@dataclass(frozen=True)
class SweepGrid:
    spec: GridSpec
    x_values: np.ndarray
    y_values: np.ndarray
    data: dict[str, np.ndarray]          # float matrices, shape (ny, nx)
    regimes: np.ndarray | None           # string matrix when requested
    threshold_curve: np.ndarray | None   # masing boundary polyline, (k, 2)
    w_opt_curve: np.ndarray | None       # optimal-coherence pump polyline
    metadata: dict[str, object] = field(default_factory=dict)


def _cell_params(base: SystemParams, names: tuple[str, str],
                 values: tuple[float, float], p_in_base: float
                 ) -> tuple[SystemParams, float]:
    updates: dict[str, float] = {}
    p_in = p_in_base
    for name, value in zip(names, values):
        if name == "Q":
            updates["Q"] = value
        elif name == "w":
            updates["w"] = value
        else:
            p_in = value
    return (replace(base, **updates) if updates else base), p_in


def _evaluate_cell(base: SystemParams, names: tuple[str, str],
                   values: tuple[float, float], p_in_base: float,
                   wanted: tuple[str, ...]) -> dict[str, object]:
    p, p_in = _cell_params(base, names, values, p_in_base)
    r = derive_rates(p)
    out: dict[str, object] = {}
    if "regime" in wanted:
        out["regime"] = amplifier.classify_regime(r)

    closure_needed = {"S_z", "P_out", "spin_corr", "T_coh", "delta_B", "delta_x"}
    closure = None
    if closure_needed & set(wanted):
        try:
            closure = correlations.steady_state(r)
        except Exception:
            closure = None

    driven = None
    driven_needed = {"gain_db", "T_n"} | ({"S_z", "P_out"} if p_in > 0.0 else set())
    if p_in > 0.0 and driven_needed & set(wanted):
        try:
            driven = amplifier.drive_steady_state(
                r, amplifier.DriveSpec(p_in_w=p_in))
        except Exception:
            driven = None

    def closure_value(attr: str) -> float:
        return getattr(closure, attr) if closure is not None else math.nan

    for q in wanted:
        if q == "regime":
            continue
        try:
            if q == "S_z":
                if p_in > 0.0:
                    out[q] = driven.stable_branch.s_z if driven else math.nan
                else:
                    out[q] = closure_value("s_z")
            elif q == "P_out":
                if p_in > 0.0:
                    out[q] = driven.stable_branch.p_out_w if driven else math.nan
                else:
                    out[q] = closure_value("p_out")
            elif q == "spin_corr":
                out[q] = closure_value("spin_corr")
            elif q == "T_coh":
                out[q] = linewidth.schawlow_townes(r, closure).t_coh
            elif q == "delta_B":
                out[q] = sensitivity.sensitivities(r, closure).delta_b
            elif q == "delta_x":
                out[q] = sensitivity.sensitivities(r, closure).delta_x
            elif q == "gain_db":
                out[q] = driven.stable_branch.gain_db if driven else math.nan
            elif q == "T_n":
                out[q] = driven.stable_branch.t_n_k if driven else math.nan
        except Exception:
            out[q] = math.nan
    return out


def worker_count() -> int:
    limit = os.environ.get(THREADS_ENV)
    workers = min(32, os.cpu_count() or 1)
    if limit is not None:
        try:
            workers = max(1, min(workers, int(limit)))
        except ValueError:
            raise ParameterError(f"{THREADS_ENV} must be an integer, got {limit!r}")
    return workers


def _threshold_curve(spec: GridSpec, x_values: np.ndarray,
                     y_values: np.ndarray) -> np.ndarray | None:
    """Masing boundary Q_th(w) as a polyline in grid coordinates.

    Emitted when the grid spans both Q and w; the strict-inequality masing
    test changes sign across this curve.
    """
    names = (spec.x.name, spec.y.name)
    if set(names) != {"Q", "w"}:
        return None
    w_axis_is_x = spec.x.name == "w"
    w_samples = x_values if w_axis_is_x else y_values
    pts = []
    for w in w_samples:
        if w <= spec.base.gamma_eg:
            continue
        r = derive_rates(replace(spec.base, w=float(w)))
        q_th = meanfield.threshold_quality_factor(r)
        pts.append((w, q_th) if w_axis_is_x else (q_th, w))
    if not pts:
        return None
    return np.asarray(pts, dtype=float)


def _w_opt_curve(spec: GridSpec, x_values: np.ndarray,
                 y_values: np.ndarray) -> np.ndarray | None:
    """Coherence-optimal pump w_opt(Q) = (2 N g^2 / kappa_c - 1/T2*)/q overlay."""
    names = (spec.x.name, spec.y.name)
    if "T_coh" not in spec.quantities or set(names) != {"Q", "w"}:
        return None
    q_axis_is_x = spec.x.name == "Q"
    q_samples = x_values if q_axis_is_x else y_values
    pts = []
    for q_factor in q_samples:
        r = derive_rates(replace(spec.base, Q=float(q_factor)))
        w_opt = (2.0 * r.n_spins * r.g ** 2 / r.kappa_c - 1.0 / spec.base.t2_star) \
            / r.q
        if w_opt <= 0.0:
            continue
        pts.append((q_factor, w_opt) if q_axis_is_x else (w_opt, q_factor))
    if not pts:
        return None
    return np.asarray(pts, dtype=float)


def run_sweep(spec: GridSpec) -> SweepGrid:
    """Evaluate all requested quantities over the grid, in parallel."""
    x_values = spec.x.values()
    y_values = spec.y.values()
    names = (spec.x.name, spec.y.name)
    nx, ny = x_values.size, y_values.size
    cells = [(iy, ix) for iy in range(ny) for ix in range(nx)]

    def work(cell: tuple[int, int]) -> dict[str, object]:
        iy, ix = cell
        return _evaluate_cell(spec.base, names,
                              (float(x_values[ix]), float(y_values[iy])),
                              spec.p_in_w, spec.quantities)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(work, cells))

    numeric = [q for q in spec.quantities if q != "regime"]
    data = {q: np.full((ny, nx), math.nan) for q in numeric}
    regimes = np.full((ny, nx), "", dtype=object) if "regime" in spec.quantities \
        else None
    for (iy, ix), cell_out in zip(cells, results):
        for q in numeric:
            data[q][iy, ix] = cell_out.get(q, math.nan)
        if regimes is not None:
            regimes[iy, ix] = cell_out["regime"]

    metadata: dict[str, object] = {
        "version": __version__,
        "x": {"name": spec.x.name, "min": spec.x.minimum, "max": spec.x.maximum,
              "points": spec.x.points, "scale": spec.x.scale},
        "y": {"name": spec.y.name, "min": spec.y.minimum, "max": spec.y.maximum,
              "points": spec.y.points, "scale": spec.y.scale},
        "p_in_w": spec.p_in_w,
        "quantities": list(spec.quantities),
        "base": _base_mapping(spec.base),
    }
    return SweepGrid(
        spec=spec,
        x_values=x_values,
        y_values=y_values,
        data=data,
        regimes=regimes,
        threshold_curve=_threshold_curve(spec, x_values, y_values),
        w_opt_curve=_w_opt_curve(spec, x_values, y_values),
        metadata=metadata,
    )


def _base_mapping(base: SystemParams) -> dict[str, float]:
    from .config import KEY_MAP
    inverse = {attr: key for key, attr in KEY_MAP.items()}
    out = {}
    for attr, key in sorted(inverse.items(), key=lambda kv: kv[1]):
        value = getattr(base, attr)
        if value is not None:
            out[key] = value
    return out


def _fmt(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return ""
    return f"{value:.17g}"


def write_csv(grid: SweepGrid, path: str) -> None:
    """Deterministic CSV: metadata comments, header row, row-major cells.

    Contains no timestamp so identical sweeps produce byte-identical files.
    """
    spec = grid.spec
    lines = [f"# maserlab={__version__}"]
    for axis_key in ("x", "y"):
        ax = grid.metadata[axis_key]
        lines.append(f"# {axis_key}.name={ax['name']}")
        lines.append(f"# {axis_key}.scale={ax['scale']}")
        lines.append(f"# {axis_key}.min={ax['min']:.17g}")
        lines.append(f"# {axis_key}.max={ax['max']:.17g}")
        lines.append(f"# {axis_key}.points={ax['points']}")
    lines.append(f"# p_in_w={spec.p_in_w:.17g}")
    for key, value in grid.metadata["base"].items():
        lines.append(f"# base.{key}={value:.17g}")
    header = [spec.x.name, spec.y.name] + list(spec.quantities)
    lines.append(",".join(header))
    for iy in range(grid.y_values.size):
        for ix in range(grid.x_values.size):
            row = [_fmt(float(grid.x_values[ix])), _fmt(float(grid.y_values[iy]))]
            for q in spec.quantities:
                if q == "regime":
                    row.append(str(grid.regimes[iy, ix]))
                else:
                    row.append(_fmt(float(grid.data[q][iy, ix])))
            lines.append(",".join(row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _nan_to_none(matrix: np.ndarray) -> list[list[float | None]]:
    return [[None if math.isnan(v) else float(v) for v in row] for row in matrix]


def grid_from_payload(payload: Mapping[str, object]) -> SweepGrid:
    """Rebuild a SweepGrid from the JSON artifact / service response shape.

    Inverse of write_json's payload (minus the timestamp), so results fetched
    over HTTP can be written or rendered with the same code paths.
    """
    from .config import params_from_mapping
    md = payload["metadata"]

    def axis(key: str) -> Axis:
        ax = md[key]
        return Axis(ax["name"], float(ax["min"]), float(ax["max"]),
                    int(ax["points"]), ax["scale"])

    spec = GridSpec(
        base=params_from_mapping(md["base"]),
        x=axis("x"),
        y=axis("y"),
        quantities=tuple(md["quantities"]),
        p_in_w=float(md["p_in_w"]),
    )
    data = {
        q: np.asarray([[math.nan if v is None else float(v) for v in row]
                       for row in matrix], dtype=float)
        for q, matrix in payload["data"].items()
    }
    regimes = None
    if payload.get("regime") is not None:
        regimes = np.asarray(payload["regime"], dtype=object)

    def curve(key: str) -> np.ndarray | None:
        pts = payload.get(key)
        return None if pts is None else np.asarray(pts, dtype=float)

    return SweepGrid(
        spec=spec,
        x_values=np.asarray(payload["x"], dtype=float),
        y_values=np.asarray(payload["y"], dtype=float),
        data=data,
        regimes=regimes,
        threshold_curve=curve("threshold_curve"),
        w_opt_curve=curve("w_opt_curve"),
        metadata=dict(md),
    )


def write_json(grid: SweepGrid, path: str) -> None:
    """JSON artifact with full metadata including a generation timestamp."""
    payload: dict[str, object] = {
        "metadata": dict(grid.metadata,
                         timestamp=datetime.now(timezone.utc).isoformat()),
        "x": [float(v) for v in grid.x_values],
        "y": [float(v) for v in grid.y_values],
        "data": {q: _nan_to_none(m) for q, m in grid.data.items()},
    }
    if grid.regimes is not None:
        payload["regime"] = [[str(v) for v in row] for row in grid.regimes]
    if grid.threshold_curve is not None:
        payload["threshold_curve"] = [[float(a), float(b)]
                                      for a, b in grid.threshold_curve]
    if grid.w_opt_curve is not None:
        payload["w_opt_curve"] = [[float(a), float(b)]
                                  for a, b in grid.w_opt_curve]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
