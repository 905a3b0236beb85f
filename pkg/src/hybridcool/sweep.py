"""Two-dimensional cooperativity maps.

Axes are ``x = log10(8 c_m / n)`` and ``y = log10(c_a)``; every cell is an
independent evaluation, so cells may run in worker processes. Rows are
always emitted row-major in ``(y, x)`` order, making the output independent
of scheduling.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import optimal_gain_feedback_only, strong_coupling_variance, weak_coupling_variance
from .optimizer import TRUNCATION_FRACTION, OptimizerConfig, optimize_gain
from .params import ParameterError, ReducedParams, _parse_value, classify
from .quadrature import QuadratureConfig, integrate_spectrum
from .spectrum import SpectrumModel

SCHEMA_VERSION = 1

COLUMNS = ("cm", "ca", "c", "g_over_omega", "stable", "var_num_g0", "var_num_gopt",
           "var_weak", "var_strong", "g_opt", "g_opt0", "gain_ratio", "regime", "status",
           "err_est")

STATUSES = ("ok", "unstable", "truncated", "failed")


@dataclass(frozen=True)
class SweepGrid:
    x_range: tuple[float, float]
    nx: int
    y_range: tuple[float, float]
    ny: int
    Omega: float
    gamma_m: float
    gamma_a: float
    n_bath: float
    eta: float = 1.0
    fb_bandwidth: float = math.inf
    optimize: bool = True
    rtol: float = 1e-8
    truncation: float = TRUNCATION_FRACTION

    def __post_init__(self):
        object.__setattr__(self, "x_range", tuple(float(v) for v in self.x_range))
        object.__setattr__(self, "y_range", tuple(float(v) for v in self.y_range))
        if self.nx < 2 or self.ny < 2:
            raise ParameterError("grids need at least two points per axis")
        if not all(math.isfinite(v) for v in self.x_range + self.y_range):
            raise ParameterError("axis ranges must be finite")
        if self.x_range[0] == self.x_range[1] or self.y_range[0] == self.y_range[1]:
            raise ParameterError("axis ranges must have nonzero width")
        if not 0 < self.truncation <= 0.5:
            raise ParameterError("truncation must lie in (0, 0.5]")
        # fixed parameters are validated by building one point
        self.params(0, 0)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(*self.x_range, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(*self.y_range, self.ny)

    def params(self, ix: int, iy: int) -> ReducedParams:
        c_m = self.n_bath * 10 ** self.xs[ix] / 8
        c_a = 10 ** self.ys[iy]
        return ReducedParams(self.Omega, self.gamma_m, self.gamma_a, self.n_bath, c_m, c_a,
                             self.eta, 0.0, self.fb_bandwidth)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["x_range"] = list(self.x_range)
        out["y_range"] = list(self.y_range)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepGrid":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ParameterError(f"unknown grid keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in ("x_range", "y_range"):
                if not (isinstance(value, (list, tuple)) and len(value) == 2):
                    raise ParameterError(f"{key} must be a two-element list")
                kwargs[key] = tuple(_parse_value(key, v) for v in value)
            elif key in ("nx", "ny"):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ParameterError(f"{key} must be an integer")
                kwargs[key] = value
            elif key == "optimize":
                if not isinstance(value, bool):
                    raise ParameterError("optimize must be true or false")
                kwargs[key] = value
            else:
                kwargs[key] = _parse_value(key, value)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ParameterError(str(exc)) from exc


def load_grid(path) -> SweepGrid:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ParameterError("grid file must hold a JSON object")
    return SweepGrid.from_dict(data)


def _nan() -> float:
    return float("nan")


def evaluate_cell(grid: SweepGrid, ix: int, iy: int) -> dict:
    r = grid.params(ix, iy)
    qc = QuadratureConfig(rtol=grid.rtol)
    row = {
        "cm": r.c_m, "ca": r.c_a, "c": r.c, "g_over_omega": r.g / r.Omega,
        "stable": r.stable, "var_num_g0": _nan(), "var_num_gopt": _nan(),
        "var_weak": weak_coupling_variance(r).variance, "var_strong": _nan(),
        "g_opt": _nan(), "g_opt0": _nan(), "gain_ratio": _nan(),
        "regime": str(classify(r, allow_unstable=True).label), "status": "ok",
        "err_est": _nan(),
    }
    if not r.stable:
        row["status"] = "unstable"
        return {k: float(v) if isinstance(v, float) else v for k, v in row.items()}
    try:
        row["var_strong"] = strong_coupling_variance(r).variance
        if r.c_m > 0 and r.eta > 0:
            row["g_opt0"] = optimal_gain_feedback_only(r)
        rep = integrate_spectrum(SpectrumModel(r), qc)
        row["var_num_g0"] = rep.variance_zp
        errors = [rep.relative_error]
        if grid.optimize and r.c_m > 0 and r.eta > 0:
            if r.g > grid.truncation * r.Omega:
                row["status"] = "truncated"
            else:
                opt = optimize_gain(r, OptimizerConfig(quadrature=qc))
                row["var_num_gopt"] = opt.variance
                row["g_opt"] = opt.G_opt
                row["gain_ratio"] = opt.ratio
                errors.append(opt.error_estimate / opt.variance)
        row["err_est"] = max(errors)
    except Exception:  # noqa: BLE001 - per-cell failures are data, never fatal
        row["status"] = "failed"
    return {k: float(v) if isinstance(v, float) else v for k, v in row.items()}


def _evaluate_packed(args):
    grid, ix, iy = args
    return evaluate_cell(grid, ix, iy)


@dataclass
class SweepResult:
    grid: SweepGrid
    rows: list
    seed: int | None = None

    def column(self, name: str) -> np.ndarray:
        """Values of ``name`` as an array of shape ``(ny, nx)``."""
        vals = [row[name] for row in self.rows]
        return np.array(vals).reshape(self.grid.ny, self.grid.nx)

    def metadata(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "seed": self.seed,
            "grid": _json_safe(self.grid.to_dict()),
            "columns": list(COLUMNS),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in self.rows:
            writer.writerow([_csv_field(row[c]) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"metadata": self.metadata(),
               "cells": [{c: _json_safe(row[c]) for c in COLUMNS} for row in self.rows]}
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"

    def write(self, path, fmt: str = "csv") -> None:
        text = self.to_csv() if fmt == "csv" else self.to_json()
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _csv_field(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            return None
        return "inf" if value > 0 else "-inf"
    return value


def run_sweep(grid: SweepGrid, threads: int = 1, seed: int | None = None) -> SweepResult:
    cells = [(grid, ix, iy) for iy in range(grid.ny) for ix in range(grid.nx)]
    if threads <= 1:
        rows = [_evaluate_packed(c) for c in cells]
    else:
        chunk = max(1, len(cells) // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_evaluate_packed, cells, chunksize=chunk))
    return SweepResult(grid, rows, seed)


_LOG_COLUMNS = {"var_num_g0", "var_num_gopt", "var_weak", "var_strong", "gain_ratio",
                "g_opt", "g_opt0", "cm", "ca", "c", "err_est"}


def write_heatmap(result: SweepResult, column: str, path) -> None:
    """Static SVG map of one numeric column (log10 for positive-valued quantities)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if column not in COLUMNS or column in ("regime", "status", "stable"):
        raise ParameterError(f"cannot draw a heatmap of column {column!r}")
    data = result.column(column).astype(float)
    label = column
    if column in _LOG_COLUMNS:
        with np.errstate(divide="ignore", invalid="ignore"):
            data = np.where(data > 0, np.log10(data), np.nan)
        label = f"log10({column})"
    g = result.grid
    with matplotlib.rc_context({"svg.hashsalt": "hybridcool", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(5.5, 4.5))
        mesh = ax.imshow(data, origin="lower", aspect="auto", cmap="viridis",
                         extent=(*g.x_range, *g.y_range), interpolation="nearest")
        ax.set_xlabel(r"$\log_{10}(8 c_m / \bar n_{B,m})$")
        ax.set_ylabel(r"$\log_{10}(c_a)$")
        fig.colorbar(mesh, ax=ax, label=label)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
