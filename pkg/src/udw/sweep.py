"""Parameter-sweep engine behind the command line interface.

Evaluates the closed-form probabilities (and optionally the finite-time
oracle) over a cartesian grid and emits deterministic CSV or JSON: rows in
lexicographic grid order, floats at 17 significant digits, output written to
a temporary file and atomically renamed.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .detectors import (
    prob_complex,
    prob_fermion,
    prob_real_scalar,
    prob_real_scalar_3d,
    prob_vector_general,
)
from .fieldmodes import DetectorSpec, FieldModel, Statistics, WavepacketSpec
from .oracle import (
    ConvergenceError,
    QuadratureConfig,
    SwitchingSpec,
    adiabatic_limit,
    default_start_T,
    finite_t_complex,
    finite_t_fermion,
    finite_t_real_scalar,
    finite_t_vector,
)

__all__ = [
    "SweepConfig",
    "SweepError",
    "run_scan",
    "run_verify",
    "grid_rows",
    "grid_points",
    "evaluate_scan_row",
    "evaluate_verify_row",
    "row_passes",
]

_ABS_TOL_ZERO_REFERENCE = 1e-15


class SweepError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class SweepConfig:
    """Declarative description of one sweep.

    Grid axes (``omega``, ``sigma``, ``m``, ``theta``, ``beta``) are tuples of
    values; the cartesian product in that fixed order defines the row order.
    ``theta`` applies to the vector model, ``beta`` (anti-particle amplitude
    magnitude, ``alpha = sqrt(1-beta^2)``) to the complex scalar.  Fermion
    amplitudes and the detector spinor are fixed per sweep, not swept.
    """

    model: FieldModel
    statistics: Statistics | None = None
    n: int = 3
    k0: float = 1.0
    coupling: float = 1.0
    delta: float = 1.0
    omega: tuple = (1.0,)
    sigma: tuple = (0.2,)
    m: tuple = (0.0,)
    theta: tuple = (0.0,)
    beta: tuple = (1.0,)
    alpha1: float = 1.0
    fermion_amplitudes: tuple = (0.0, 0.0, 1.0, 0.0)
    fermion_spinor: tuple = (0.0, 0.0, 1.0, 0.0)
    out: str | None = None
    fmt: str = "csv"
    workers: int = 1
    oracle_tol: float = 1e-3
    oracle_T0: float | None = None
    oracle_budget: int = 12
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        model = FieldModel(self.model)
        object.__setattr__(self, "model", model)
        if self.statistics is not None:
            object.__setattr__(self, "statistics", Statistics(self.statistics))
        if model is FieldModel.COMPLEX_SCALAR and self.statistics is None:
            raise SweepError("complex scalar sweeps need statistics (bose or fermi)")
        if self.fmt not in ("csv", "json"):
            raise SweepError(f"unknown output format {self.fmt!r}")
        if self.workers < 1:
            raise SweepError("workers must be >= 1")
        for axis in ("omega", "sigma", "m", "theta", "beta"):
            vals = tuple(float(v) for v in getattr(self, axis))
            object.__setattr__(self, axis, vals)
            if not vals:
                raise SweepError(f"empty grid axis {axis!r}")
        if any(s <= 0 for s in self.sigma):
            raise SweepError("sigma grid values must be positive")
        if any(v < 0 for v in self.m):
            raise SweepError("mass grid values must be non-negative")
        if self.k0 <= 0:
            raise SweepError("k0 must be positive")
        if not (0.0 < self.oracle_tol < 1.0):
            raise SweepError("oracle tolerance must be in (0, 1)")
        if model is FieldModel.VECTOR and any(mm != 0.0 for mm in self.m):
            raise SweepError("the vector model is massless; use m = [0.0]")
        if any(not 0.0 <= b <= 1.0 for b in self.beta):
            raise SweepError("beta grid values must lie in [0, 1]")

    @property
    def axes(self) -> tuple:
        """Swept axes for this model, in column order."""
        if self.model is FieldModel.REAL_SCALAR:
            return ("omega", "sigma", "m")
        if self.model is FieldModel.VECTOR:
            return ("omega", "sigma", "theta")
        if self.model is FieldModel.FERMION:
            return ("omega", "sigma", "m")
        return ("omega", "sigma", "m", "beta")

    @property
    def amplitude_columns(self) -> tuple:
        if self.model is FieldModel.VECTOR:
            return ("alpha1", "alpha2")
        if self.model is FieldModel.FERMION:
            return ("alpha1", "alpha2", "beta1", "beta2")
        if self.model is FieldModel.COMPLEX_SCALAR:
            return ("alpha", "beta")
        return ()

    @property
    def columns(self) -> tuple:
        return ("model", "n", "omega", "sigma", "m", "k0", "theta") + self.amplitude_columns + (
            "probability",
            "gated",
        )

    @property
    def verify_columns(self) -> tuple:
        return self.columns + (
            "oracle_total",
            "vacuum",
            "co_rotating",
            "counter_rotating",
            "relative_deviation",
        )


def grid_points(config: SweepConfig):
    """Grid values in lexicographic order of the model's axes."""
    axes_values = [getattr(config, ax) for ax in config.axes]
    for values in itertools.product(*axes_values):
        yield dict(zip(config.axes, values))


def _specs_for_point(config: SweepConfig, point: dict):
    omega = point["omega"]
    sigma = point["sigma"]
    m = point.get("m", 0.0)
    theta = point.get("theta", 0.0)
    beta = point.get("beta", 1.0)
    det_kwargs = dict(omega=omega, coupling=config.coupling, delta=config.delta, theta=theta)
    if config.model is FieldModel.REAL_SCALAR:
        wp = WavepacketSpec.real_scalar(config.n, m, config.k0, sigma)
        det = DetectorSpec(**det_kwargs)
    elif config.model is FieldModel.VECTOR:
        a1 = config.alpha1
        a2 = math.sqrt(max(0.0, 1.0 - abs(a1) ** 2))
        wp = WavepacketSpec.vector(config.k0, sigma, a1, a2)
        det = DetectorSpec(**det_kwargs)
    elif config.model is FieldModel.FERMION:
        wp = WavepacketSpec.fermion(m, config.k0, sigma, *config.fermion_amplitudes)
        det = DetectorSpec(spinor=config.fermion_spinor, **det_kwargs)
    else:
        alpha = math.sqrt(max(0.0, 1.0 - beta * beta))
        wp = WavepacketSpec.complex_scalar(config.n, m, config.k0, sigma, alpha, beta)
        det = DetectorSpec(**det_kwargs)
    return det, wp


def _closed_form(config: SweepConfig, det: DetectorSpec, wp: WavepacketSpec):
    if config.model is FieldModel.REAL_SCALAR:
        if config.n == 3:
            return prob_real_scalar_3d(det, wp)
        return prob_real_scalar(config.n, det, wp)
    if config.model is FieldModel.VECTOR:
        return prob_vector_general(det, wp)
    if config.model is FieldModel.FERMION:
        return prob_fermion(det, wp)
    return prob_complex(config.n, config.statistics, det, wp)


def _oracle_evaluator(config: SweepConfig, det: DetectorSpec, wp: WavepacketSpec):
    q = config.quadrature
    if config.model is FieldModel.REAL_SCALAR:
        return lambda T: finite_t_real_scalar(config.n, det, wp, SwitchingSpec(T), q)
    if config.model is FieldModel.VECTOR:
        return lambda T: finite_t_vector(det, wp, SwitchingSpec(T), q)
    if config.model is FieldModel.FERMION:
        return lambda T: finite_t_fermion(det, wp, SwitchingSpec(T), q)
    return lambda T: finite_t_complex(
        config.n, config.statistics, det, wp, SwitchingSpec(T), q
    )


def _amplitude_values(config: SweepConfig, wp: WavepacketSpec) -> dict:
    cols = config.amplitude_columns
    if not cols:
        return {}
    return dict(zip(cols, wp.amplitudes))


def _base_row(config: SweepConfig, point: dict, det, wp) -> dict:
    result = _closed_form(config, det, wp)
    row = {
        "model": config.model.value,
        "n": config.n,
        "omega": point["omega"],
        "sigma": point["sigma"],
        "m": point.get("m", 0.0),
        "k0": config.k0,
        "theta": point.get("theta", 0.0),
    }
    row.update(_amplitude_values(config, wp))
    row["probability"] = result.value
    row["gated"] = result.gated
    return row


def evaluate_scan_row(config: SweepConfig, point: dict) -> dict:
    det, wp = _specs_for_point(config, point)
    return _base_row(config, point, det, wp)


def evaluate_verify_row(config: SweepConfig, point: dict) -> dict:
    det, wp = _specs_for_point(config, point)
    row = _base_row(config, point, det, wp)
    evaluator = _oracle_evaluator(config, det, wp)
    T0 = config.oracle_T0 if config.oracle_T0 is not None else default_start_T(wp)
    closed = row["probability"]
    try:
        total, diag = adiabatic_limit(
            evaluator, T0, config.oracle_tol, doubling_budget=config.oracle_budget
        )
        last = diag
        deviation = (
            abs(total - closed) / closed if closed > 0.0 else abs(total)
        )
        row.update(
            oracle_total=total,
            vacuum=last.vacuums[-1],
            co_rotating=last.co_rotatings[-1],
            counter_rotating=last.counter_rotatings[-1],
            relative_deviation=deviation,
        )
    except ConvergenceError:
        row.update(
            oracle_total=math.nan,
            vacuum=math.nan,
            co_rotating=math.nan,
            counter_rotating=math.nan,
            relative_deviation=math.nan,
        )
    return row


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, complex):
        if v.imag == 0.0:
            return _format_value(v.real)
        return f"{v.real:.16e}{v.imag:+.16e}j"
    if isinstance(v, float):
        return f"{v:.16e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, complex):
        return v.real if v.imag == 0.0 else _format_value(v)
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".udw-", dir=directory)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(columns: tuple, rows: list, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_format_value(row[c]) for c in columns))
        return "\n".join(lines) + "\n"
    payload = {
        "columns": list(columns),
        "rows": [{c: _jsonable(row[c]) for c in columns} for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


# module-level so that worker processes can unpickle the call
def _scan_worker(args):
    config, point = args
    return evaluate_scan_row(config, point)


def _verify_worker(args):
    config, point = args
    return evaluate_verify_row(config, point)


def _map_rows(config: SweepConfig, worker, points: list) -> list:
    if config.workers == 1:
        return [worker((config, p)) for p in points]
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(worker, [(config, p) for p in points], chunksize=1))


def grid_rows(config: SweepConfig) -> list:
    """All scan rows of the sweep, in deterministic grid order."""
    points = list(grid_points(config))
    if not points:
        raise SweepError("empty sweep grid")
    return _map_rows(config, _scan_worker, points)


def run_scan(config: SweepConfig) -> list:
    """Evaluate the closed forms over the grid and write the table."""
    rows = grid_rows(config)
    if config.out is not None:
        _write_atomic(config.out, _render(config.columns, rows, config.fmt))
    return rows


def row_passes(config: SweepConfig, row: dict) -> bool:
    """Deviation gate: relative ``oracle_tol`` for positive closed forms,
    absolute ``1e-15`` where the closed form is zero."""
    dev = row["relative_deviation"]
    if math.isnan(dev):
        return False
    if row["probability"] > 0.0:
        return dev < config.oracle_tol
    return dev < _ABS_TOL_ZERO_REFERENCE


def run_verify(config: SweepConfig) -> tuple:
    """Closed form vs adiabatic oracle over the grid.

    Returns ``(rows, n_failed, n_nonconverged)``; a row fails when its
    deviation exceeds the applicable tolerance (see :func:`row_passes`) or
    when the oracle did not converge.
    """
    points = list(grid_points(config))
    if not points:
        raise SweepError("empty sweep grid")
    rows = _map_rows(config, _verify_worker, points)
    if config.out is not None:
        _write_atomic(config.out, _render(config.verify_columns, rows, config.fmt))
    nonconverged = sum(1 for r in rows if math.isnan(r["relative_deviation"]))
    failed = sum(1 for r in rows if not row_passes(config, r))
    return rows, failed, nonconverged
