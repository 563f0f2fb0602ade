"""Grid evaluation engine behind the CLI: 1-D/2-D sweeps over state and
filter parameters, with deterministic row ordering and per-point seeds.

Axis parameters come from a closed set; when filter parameters (omega_k,
omega_l, tau_i, tau_s) appear, a filter family must be fixed and the
overlap kernel (K_f, L_f) is recomputed from the filter pair at every grid
point.  Grid points are independent and may be evaluated concurrently;
rows are always assembled in axis order (axis2 outermost).
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bell, gaussian, thermal, tmsv
from .filters import FilterFamily, FilterSpec, OverlapFactors, overlap_closed_form

AXIS_PARAMS = (
    "r", "k_f", "l_f", "eta_i", "eta_s", "n_i", "n_s",
    "omega_k", "omega_l", "tau_i", "tau_s",
)
FILTER_PARAMS = ("omega_k", "omega_l", "tau_i", "tau_s")
OUTPUTS = ("e_n", "s_q_opt", "purity", "bell_max", "zeta", "weight_ratio", "critical_points")

_DEFAULTS = {
    "r": 1.0, "k_f": 1.0, "l_f": 0.0, "eta_i": 1.0, "eta_s": 1.0,
    "n_i": 0.0, "n_s": 0.0,
    "omega_k": 1.0, "omega_l": 1.0, "tau_i": 2.0, "tau_s": 2.0,
}

_TMSV_CRITICAL_COLUMNS = ("r_ucf_en", "r_max_en", "r_max_sq", "r_ucf_sq")
_THERMAL_CRITICAL_COLUMNS = (
    "r_lcf_en", "r_ucf_en", "r_max_en", "r_lcf_sq", "r_ucf_sq", "r_max_sq",
)


class ConfigError(ValueError):
    """Invalid sweep/point configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_PARAMS:
            raise ConfigError(f"unknown axis parameter {self.name!r}; choose from {AXIS_PARAMS}")
        if self.count < 1:
            raise ConfigError("axis needs at least one point")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("axis range must be finite")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepConfig:
    model: str
    outputs: tuple[str, ...]
    fixed: dict = field(default_factory=dict)
    axis1: AxisSpec | None = None
    axis2: AxisSpec | None = None
    family: str | None = None
    seed: int = 0
    jobs: int = 1
    bell_restarts: int = 64
    bell_max_evals: int = 2000

    def __post_init__(self):
        if self.model not in ("tmsv", "thermal"):
            raise ConfigError(f"model must be 'tmsv' or 'thermal', got {self.model!r}")
        for out in self.outputs:
            if out not in OUTPUTS:
                raise ConfigError(f"unknown output {out!r}; choose from {OUTPUTS}")
        if not self.outputs:
            raise ConfigError("at least one output is required")
        for name in self.fixed:
            if name not in AXIS_PARAMS:
                raise ConfigError(f"unknown parameter {name!r}")
        if self.axis2 is not None and self.axis1 is None:
            raise ConfigError("axis2 given without axis1")
        if self.family is not None and self.family not in ("step", "exponential"):
            raise ConfigError("family must be 'step' or 'exponential'")


def _resolve_overlap(params: dict, family: str | None):
    """(k_f, l_f) for one grid point, from filters or direct values."""
    has_filter = any(p in params for p in FILTER_PARAMS)
    if has_filter:
        if family is None:
            raise ConfigError("filter parameters require --family")
        if "k_f" in params or "l_f" in params:
            raise ConfigError("give either (k_f, l_f) or filter parameters, not both")
        fam = FilterFamily(family)
        fi = FilterSpec(fam, params.get("omega_k", _DEFAULTS["omega_k"]),
                        params.get("tau_i", _DEFAULTS["tau_i"]))
        fs = FilterSpec(fam, params.get("omega_l", _DEFAULTS["omega_l"]),
                        params.get("tau_s", _DEFAULTS["tau_s"]))
        ov = overlap_closed_form(fi, fs)
        return ov.k_f, ov.l_f
    if family is not None:
        raise ConfigError("--family given without filter parameters")
    return params.get("k_f", _DEFAULTS["k_f"]), params.get("l_f", _DEFAULTS["l_f"])


def _point_state(model: str, params: dict, family: str | None):
    """Model params and covariance blocks for one grid point."""
    k_f, l_f = _resolve_overlap(params, family)
    try:
        ov = OverlapFactors(k_f, l_f)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    r = params.get("r", _DEFAULTS["r"])
    eta_i = params.get("eta_i", _DEFAULTS["eta_i"])
    eta_s = params.get("eta_s", _DEFAULTS["eta_s"])
    try:
        if model == "tmsv":
            if "n_i" in params or "n_s" in params:
                raise ConfigError("thermal occupations are not tmsv parameters")
            p = tmsv.TmsvParams(r=r, eta_i=eta_i, eta_s=eta_s, overlap=ov)
            return p, tmsv.covariance(p), eta_i, eta_s
        p = thermal.ThermalParams(
            r=r,
            n_i=params.get("n_i", _DEFAULTS["n_i"]),
            n_s=params.get("n_s", _DEFAULTS["n_s"]),
            overlap=ov,
        )
        blocks = thermal.covariance(p)
        if eta_i < 1.0 or eta_s < 1.0:
            # closed-form landmarks do not apply to lossy thermal states;
            # everything else is evaluated on the lossy covariance
            v = gaussian.apply_loss(gaussian.build_covariance(blocks), eta_i, eta_s)
            blocks = v.blocks()
        return p, blocks, eta_i, eta_s
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def critical_columns(model: str) -> tuple[str, ...]:
    return _TMSV_CRITICAL_COLUMNS if model == "tmsv" else _THERMAL_CRITICAL_COLUMNS


def output_columns(model: str, outputs) -> list[str]:
    cols = []
    for out in outputs:
        if out == "critical_points":
            cols.extend(critical_columns(model))
        else:
            cols.append(out)
    return cols


def evaluate_point(
    model: str,
    params: dict,
    outputs,
    family: str | None = None,
    seed: int = 0,
    bell_restarts: int = 64,
    bell_max_evals: int = 2000,
) -> dict:
    """All requested outputs for one parameter tuple.

    Landmarks that do not exist at a grid point (empty thermal window,
    uncorrelated state at r = 0, K_f = 0 cutoffs) are reported as nan so
    sweeps can traverse separable regions.
    """
    p, blocks, eta_i, eta_s = _point_state(model, params, family)
    res: dict = {}
    matrix = None

    def mat():
        nonlocal matrix
        if matrix is None:
            matrix = gaussian.build_covariance(blocks)
        return matrix

    for out in outputs:
        if out == "e_n":
            res["e_n"] = gaussian.log_negativity_blocks(blocks).e_n
        elif out == "s_q_opt":
            res["s_q_opt"] = gaussian.optimized_squeezing(blocks)
        elif out == "purity":
            res["purity"] = gaussian.purity(mat())
        elif out == "zeta":
            res["zeta"] = gaussian.squeezing_angle(blocks)
        elif out == "weight_ratio":
            try:
                res["weight_ratio"] = gaussian.optimal_weight_ratio(blocks)
            except ValueError:
                res["weight_ratio"] = math.nan
        elif out == "bell_max":
            cfg = bell.BellMaxConfig(
                n_restarts=bell_restarts, max_evals=bell_max_evals, seed=seed
            )
            res["bell_max"] = bell.bell_max(mat(), cfg).b_max
        elif out == "critical_points":
            res.update(_critical_point_columns(model, p, eta_i, eta_s))
    return res


def _critical_point_columns(model: str, p, eta_i: float, eta_s: float) -> dict:
    if model == "tmsv":
        try:
            cp = tmsv.critical_points(p)
            return {
                "r_ucf_en": cp.r_ucf_en, "r_max_en": cp.r_max_en,
                "r_max_sq": cp.r_max_sq, "r_ucf_sq": cp.r_ucf_sq,
            }
        except ValueError:
            return {c: math.nan for c in _TMSV_CRITICAL_COLUMNS}
    if eta_i < 1.0 or eta_s < 1.0:
        raise ConfigError(
            "critical_points for the thermal model are closed forms at unit "
            "detection efficiency; drop the output or set eta_i = eta_s = 1"
        )
    try:
        cp = thermal.critical_points(p)
        return {
            "r_lcf_en": cp.r_lcf_en, "r_ucf_en": cp.r_ucf_en, "r_max_en": cp.r_max_en,
            "r_lcf_sq": cp.r_lcf_sq, "r_ucf_sq": cp.r_ucf_sq, "r_max_sq": cp.r_max_sq,
        }
    except ValueError:
        return {c: math.nan for c in _THERMAL_CRITICAL_COLUMNS}


def run_sweep(cfg: SweepConfig) -> tuple[list[str], list[list[float]]]:
    """Evaluate the grid; returns (column names, rows in axis2-major order)."""
    axes = [a for a in (cfg.axis1, cfg.axis2) if a is not None]
    for a in axes:
        if a.name in cfg.fixed:
            raise ConfigError(f"{a.name!r} is both an axis and a fixed parameter")
    if len(axes) == 2 and axes[0].name == axes[1].name:
        raise ConfigError("axis1 and axis2 must differ")

    grids = [a.grid() for a in axes]
    if len(axes) == 2:
        tuples = [(v2, v1) for v2 in grids[1] for v1 in grids[0]]
    elif len(axes) == 1:
        tuples = [(v1,) for v1 in grids[0]]
    else:
        tuples = [()]

    out_cols = output_columns(cfg.model, cfg.outputs)
    axis_cols = [a.name for a in axes]
    seeds = _point_seeds(cfg.seed, len(tuples))

    def eval_index(i: int) -> list[float]:
        params = dict(cfg.fixed)
        if len(axes) == 2:
            params[axes[1].name] = float(tuples[i][0])
            params[axes[0].name] = float(tuples[i][1])
        elif len(axes) == 1:
            params[axes[0].name] = float(tuples[i][0])
        res = evaluate_point(
            cfg.model, params, cfg.outputs, family=cfg.family, seed=seeds[i],
            bell_restarts=cfg.bell_restarts, bell_max_evals=cfg.bell_max_evals,
        )
        axis_vals = [params[a.name] for a in axes]
        return axis_vals + [res[c] for c in out_cols]

    indices = range(len(tuples))
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(eval_index, indices))
    else:
        rows = [eval_index(i) for i in indices]
    return axis_cols + out_cols, rows


def _point_seeds(master: int, n: int) -> list[int]:
    """Stable per-grid-point seeds derived from (master seed, grid index)."""
    return [
        int(np.random.SeedSequence(entropy=(master, i)).generate_state(1)[0])
        for i in range(n)
    ]


def format_number(x: float) -> str:
    """Shortest round-trip decimal; nan/inf spelled so float() reparses them."""
    return repr(float(x))


def write_csv(path: str, columns: list[str], rows: list[list[float]]) -> None:
    """Write-then-rename so partial outputs are never left behind."""
    text = ",".join(columns) + "\n"
    text += "".join(",".join(format_number(v) for v in row) + "\n" for row in rows)
    _atomic_write(path, text)


def rows_to_json(columns, rows) -> dict:
    return {"columns": list(columns), "rows": [[float(v) for v in r] for r in rows]}


def write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, allow_nan=True) + "\n")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
