"""Naive vs resummed vs exact probabilities, secular-growth fits, and I/O.

A :class:`ComparisonReport` stores probability arrays of shape
``(n_points, N)``.  Serialised rows are t-major, state-minor.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np

from . import models
from .engine import CoefficientTable, SystemSpec, TimeGrid, compute_coefficients, integrate_exact
from .series import arcsin_transform_reim, eval_exp_resummed, eval_sin_resummed, log_transform

__all__ = [
    "CSV_HEADER",
    "COLUMNS",
    "FitDomainError",
    "ComparisonReport",
    "SecularFit",
    "closed_form_table",
    "resummed_amplitudes",
    "compare_methods",
    "fit_power_law",
    "secular_fit",
    "emit_csv",
    "read_csv",
    "emit_json",
    "load_schema",
]

CSV_HEADER = ("t", "state", "p_naive", "p_resum", "p_exact", "err_naive", "err_resum")
COLUMNS = CSV_HEADER[2:]


class FitDomainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    t: np.ndarray
    p_naive: np.ndarray
    p_resum: np.ndarray
    p_exact: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("t", "p_naive", "p_resum", "p_exact"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.p_naive.shape != (self.t.size, self.p_naive.shape[1]):
            raise ValueError("probability arrays must have shape (n_points, N)")
        if self.p_resum.shape != self.p_naive.shape or self.p_exact.shape != self.p_naive.shape:
            raise ValueError("probability arrays disagree in shape")

    @property
    def dim(self) -> int:
        return self.p_naive.shape[1]

    @property
    def err_naive(self) -> np.ndarray:
        return np.abs(self.p_naive - self.p_exact)

    @property
    def err_resum(self) -> np.ndarray:
        return np.abs(self.p_resum - self.p_exact)

    def column(self, name: str, state: int) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(f"unknown column {name!r}; choose from {COLUMNS}")
        return getattr(self, name)[:, state]

    def __len__(self):
        return self.p_naive.size

    def rows(self):
        cols = [self.p_naive, self.p_resum, self.p_exact, self.err_naive, self.err_resum]
        for j, tj in enumerate(self.t):
            for n in range(self.dim):
                yield (float(tj), n) + tuple(float(c[j, n]) for c in cols)


@dataclass(frozen=True)
class SecularFit:
    """Slope of ``log(value)`` against ``log(t)`` on the tail of a grid."""

    window: float
    exponent: float
    r_squared: float
    n_points: int = 0
    column: str | None = None
    state: int | None = None

    def to_dict(self) -> dict[str, Any]:
        d = {"window": self.window, "exponent": self.exponent, "r_squared": self.r_squared,
             "n_points": self.n_points}
        if self.column is not None:
            d["column"] = self.column
        if self.state is not None:
            d["state"] = self.state
        return d


def closed_form_table(model, params, grid: TimeGrid, order: int) -> CoefficientTable:
    """Coefficient table filled from the model's closed forms instead of quadrature."""
    model = models.ModelId.parse(model)
    values = np.stack([models.closed_form_coefficients(model, params, grid.points, r)
                       for r in range(1, order + 1)])
    return CoefficientTable(grid, 0, values)


def resummed_amplitudes(table: CoefficientTable, order: int | None = None) -> np.ndarray:
    """Exponential (occupied level) / split-sine (other levels) amplitudes at every node."""
    out = np.empty((table.grid.n_points, table.dim), dtype=complex)
    for n in range(table.dim):
        c = table.series(n, order)
        if n == table.initial:
            out[:, n] = eval_exp_resummed(log_transform(c))
        else:
            out[:, n] = eval_sin_resummed(*arcsin_transform_reim(c))
    return out


def compare_methods(system, grid: TimeGrid, order: int, params=None,
                    coefficients: str = "engine") -> ComparisonReport:
    """Build a report for a catalog model (``system`` = model id) or a raw SystemSpec.

    ``coefficients`` selects the perturbative input: ``"engine"`` (quadrature)
    or ``"closed_form"`` (catalog models only).  The exact column uses the
    closed form when one exists, else RK4.
    """
    if coefficients not in ("engine", "closed_form"):
        raise ValueError(f"coefficients must be 'engine' or 'closed_form', got {coefficients!r}")
    t = grid.points
    meta: dict[str, Any] = {"grid": {"t_max": grid.t_max, "n_points": grid.n_points},
                            "order": int(order), "coefficients": coefficients}

    if isinstance(system, SystemSpec):
        if coefficients != "engine":
            raise ValueError("closed-form coefficients need a catalog model")
        spec = system
        meta.update(model=None, params={}, exact_source="rk4")
        exact = integrate_exact(spec, grid)
        table = compute_coefficients(spec, grid, order)
    else:
        model = models.ModelId.parse(system)
        if params is None:
            params = models.default_params(model)
        elif not hasattr(params, "__dataclass_fields__"):
            params = models.make_params(model, params)
        spec = models.build_system(model, params)
        meta.update(model=model.value, params=models.as_dict(params))
        if coefficients == "engine":
            table = compute_coefficients(spec, grid, order)
        else:
            table = closed_form_table(model, params, grid, order)
        if models.has_exact_closed_form(model, params):
            exact = models.exact_amplitude(model, params, t).interaction
            meta["exact_source"] = "closed_form"
        else:
            exact = integrate_exact(spec, grid)
            meta["exact_source"] = "rk4"

    meta["initial"] = spec.initial
    return ComparisonReport(
        t=t,
        p_naive=np.abs(table.naive()) ** 2,
        p_resum=np.abs(resummed_amplitudes(table)) ** 2,
        p_exact=np.abs(exact) ** 2,
        metadata=meta,
    )


def fit_power_law(t, values, tail_fraction: float = 0.5) -> SecularFit:
    """Least-squares slope of ``log(values)`` vs ``log(t)`` over the last ``tail_fraction`` of nodes."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    start = t.size - max(int(round(tail_fraction * t.size)), 2)
    t, y = t[start:], y[start:]
    keep = t > 0
    t, y = t[keep], y[keep]
    if t.size < 2:
        raise FitDomainError("fewer than two nodes with t > 0 in the fit window")
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise FitDomainError("values in the fit window must be positive and finite")
    x, ly = np.log(t), np.log(y)
    slope, icpt = np.polyfit(x, ly, 1)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    ss_res = np.sum((ly - (slope * x + icpt)) ** 2)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return SecularFit(window=float(tail_fraction), exponent=float(slope),
                      r_squared=float(r2), n_points=int(t.size))


def secular_fit(report: ComparisonReport, column: str = "p_naive", state: int | None = None,
                tail_fraction: float = 0.5) -> SecularFit:
    if state is None:
        state = int(report.metadata.get("initial", 0))
    fit = fit_power_law(report.t, report.column(column, state), tail_fraction)
    return SecularFit(fit.window, fit.exponent, fit.r_squared, fit.n_points, column, state)


def _open_text(destination):
    if hasattr(destination, "write"):
        return destination, False
    return open(destination, "w", newline="", encoding="utf-8"), True


def emit_csv(report: ComparisonReport, destination) -> None:
    """Write ``t,state,p_naive,...`` rows with 17 significant digits."""
    fh, close = _open_text(destination)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in report.rows():
            w.writerow([format(row[0], ".17g"), row[1]] + [format(v, ".17g") for v in row[2:]])
    finally:
        if close:
            fh.close()


def read_csv(source) -> ComparisonReport:
    """Parse a file written by :func:`emit_csv` back into a report (no metadata)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    rows = [r for r in reader if r]
    if not rows:
        raise ValueError("report has no rows")
    try:
        t = np.array([float(r[0]) for r in rows])
        state = np.array([int(r[1]) for r in rows])
        vals = np.array([[float(x) for x in r[2:5]] for r in rows])
    except (ValueError, IndexError) as exc:
        raise ValueError(f"malformed report row: {exc}") from exc
    dim = int(state.max()) + 1
    if len(rows) % dim or np.any(state != np.tile(np.arange(dim), len(rows) // dim)):
        raise ValueError("rows are not in t-major, state-minor order")
    n = len(rows) // dim
    vals = vals.reshape(n, dim, 3)
    return ComparisonReport(t[::dim], vals[..., 0], vals[..., 1], vals[..., 2])


def report_document(report: ComparisonReport) -> dict[str, Any]:
    return {
        "kind": "comparison_report",
        "metadata": report.metadata,
        "columns": list(CSV_HEADER),
        "rows": [list(r) for r in report.rows()],
    }


def fit_document(fit: SecularFit) -> dict[str, Any]:
    return {"kind": "secular_fit", **fit.to_dict()}


def emit_json(obj, destination) -> None:
    if isinstance(obj, ComparisonReport):
        doc = report_document(obj)
    elif isinstance(obj, SecularFit):
        doc = fit_document(obj)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    fh, close = _open_text(destination)
    try:
        json.dump(doc, fh, allow_nan=False, separators=(",", ":"))
        fh.write("\n")
    finally:
        if close:
            fh.close()


def load_schema(name: str) -> dict:
    """Published JSON schema: ``"report"``, ``"fit"`` or ``"config"``."""
    text = resources.files("tdpt_resum").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
