"""Perturbative coefficients of driven finite-level systems.

Units: hbar = 1, so energies and angular frequencies share a unit and
times are measured in its inverse.

The interaction-picture coefficients obey::

    i dc_n/dt = sum_m h_nm(t) exp(i w_nm t) c_m,      w_nm = E_n - E_m

and the order-(r+1) correction is the running integral of the same
right-hand side evaluated on the order-r correction, starting from
``c_n^(0) = delta_nk``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .series import TruncatedSeries

__all__ = [
    "MAX_ORDER",
    "HermiticityError",
    "SystemSpec",
    "TimeGrid",
    "CoefficientTable",
    "constant_perturbation",
    "bohr_frequencies",
    "interaction_matrix",
    "compute_coefficients",
    "integrate_exact",
    "normalization_defect",
]

MAX_ORDER = 6
HERMITICITY_PROBES = 8
HERMITICITY_TOL = 1e-10
# probe window for the hermiticity check; specs carry no natural time scale
_PROBE_T_MAX = 10.0

Perturbation = Callable[[np.ndarray], np.ndarray]


class HermiticityError(ValueError):
    pass


def constant_perturbation(matrix) -> Perturbation:
    """Wrap a fixed matrix as a (vectorised) time-dependent perturbation."""
    m = np.array(matrix, dtype=complex)
    m.setflags(write=False)

    def h(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(m, t.shape + m.shape)

    return h


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Unperturbed energies, a perturbation and the initially occupied level.

    ``perturbation`` maps an array of times of shape ``(M,)`` to matrices of
    shape ``(M, N, N)``.  ``initial`` is a 0-based level index.
    """

    energies: np.ndarray
    perturbation: Perturbation
    initial: int = 0

    def __post_init__(self):
        e = np.array(self.energies, dtype=float).reshape(-1)
        if e.size < 1:
            raise ValueError("a system needs at least one level")
        if not np.all(np.isfinite(e)):
            raise ValueError("energies must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)
        if not 0 <= int(self.initial) < e.size:
            raise ValueError(f"initial index {self.initial} out of range for {e.size} levels")
        object.__setattr__(self, "initial", int(self.initial))

        probes = np.linspace(0.0, _PROBE_T_MAX, HERMITICITY_PROBES)
        h = self.matrices(probes)
        dev = np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2))))
        if dev > HERMITICITY_TOL:
            raise HermiticityError(f"perturbation is not Hermitian (max deviation {dev:.3g})")

    @classmethod
    def from_matrix_elements(cls, energies, element: Callable[[int, int, float], complex], initial=0):
        """Build from a scalar element function ``element(n, m, t)`` (0-based)."""
        n = len(energies)

        def h(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            out = np.empty(t.shape + (n, n), dtype=complex)
            for j, tj in np.ndenumerate(t):
                for a in range(n):
                    for b in range(n):
                        out[j + (a, b)] = element(a, b, float(tj))
            return out

        return cls(energies, h, initial)

    @property
    def dim(self) -> int:
        return self.energies.size

    def matrices(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        h = np.asarray(self.perturbation(t), dtype=complex)
        if h.shape != t.shape + (self.dim, self.dim):
            raise ValueError(f"perturbation returned shape {h.shape}, expected {t.shape + (self.dim, self.dim)}")
        return h


@dataclass(frozen=True)
class TimeGrid:
    """Uniform nodes ``t_j = j * t_max / (n_points - 1)``."""

    t_max: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be positive and finite, got {self.t_max}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")
        object.__setattr__(self, "t_max", float(self.t_max))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def spacing(self) -> float:
        return self.t_max / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """``values[r - 1, j, n]`` is ``c_n^(r)(t_j)``; order zero is ``delta_nk``."""

    grid: TimeGrid
    initial: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[1] != self.grid.n_points:
            raise ValueError(f"coefficient array has shape {v.shape}, incompatible with grid")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def order(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    def series(self, state: int, order: int | None = None) -> TruncatedSeries:
        """Series of ``state`` batched over all grid nodes: coeffs shape ``(R, n_points)``."""
        order = self.order if order is None else order
        return TruncatedSeries(self.values[:order, :, state])

    def naive(self, order: int | None = None) -> np.ndarray:
        """Naive partial sums ``delta_nk + sum_r c_n^(r)``, shape ``(n_points, N)``."""
        order = self.order if order is None else order
        amp = self.values[:order].sum(axis=0)
        amp[:, self.initial] += 1.0
        return amp


def bohr_frequencies(spec: SystemSpec) -> np.ndarray:
    e = spec.energies
    return e[:, None] - e[None, :]


def interaction_matrix(spec: SystemSpec, t) -> np.ndarray:
    """``h_nm(t) exp(i w_nm t)`` for each time in ``t``; shape ``(M, N, N)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = bohr_frequencies(spec)
    return spec.matrices(t) * np.exp(1j * w[None, :, :] * t[:, None, None])


def compute_coefficients(spec: SystemSpec, grid: TimeGrid, order: int) -> CoefficientTable:
    """Successive cumulative trapezoid quadrature of the order recursion.

    The order-(r+1) integrand is built from order-r values at the grid
    nodes, so the table costs ``order`` passes over the grid.
    """
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be an integer in 1..{MAX_ORDER}, got {order}")
    if not isinstance(grid, TimeGrid):
        raise TypeError("grid must be a TimeGrid")

    v = interaction_matrix(spec, grid.points)
    prev = np.zeros((grid.n_points, spec.dim), dtype=complex)
    prev[:, spec.initial] = 1.0
    out = np.empty((order, grid.n_points, spec.dim), dtype=complex)
    for r in range(order):
        integrand = np.einsum("jnm,jm->jn", v, prev)
        prev = -1j * cumulative_trapezoid(integrand, dx=grid.spacing, axis=0, initial=0)
        out[r] = prev
    return CoefficientTable(grid, spec.initial, out)


def _rk4_step_matrices(a0, ah, a1, dt):
    # propagator of one classical RK4 step for the linear system c' = A(t) c
    eye = np.eye(a0.shape[-1])
    k1 = a0
    k2 = ah @ (eye + 0.5 * dt * k1)
    k3 = ah @ (eye + 0.5 * dt * k2)
    k4 = a1 @ (eye + dt * k3)
    return eye + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _choose_substeps(spec, grid, max_phase_step):
    h = spec.matrices(grid.points)
    rate = np.max(np.abs(bohr_frequencies(spec))) + np.max(np.linalg.norm(h, ord=2, axis=(1, 2)))
    s = 1
    while rate * grid.spacing / s > max_phase_step:
        s *= 2
    return s


def integrate_exact(spec: SystemSpec, grid: TimeGrid, substeps: int | None = None,
                    max_phase_step: float = 0.01) -> np.ndarray:
    """Non-perturbative interaction-picture coefficients at the grid nodes.

    Fixed-step classical RK4.  Each grid interval is split into ``substeps``
    equal steps (a power of two); by default the smallest one for which
    ``(max|w_nm| + max||h||) * step <= max_phase_step``.

    Returns an array of shape ``(n_points, N)``.
    """
    if substeps is None:
        substeps = _choose_substeps(spec, grid, max_phase_step)
    if substeps < 1 or substeps & (substeps - 1):
        raise ValueError(f"substeps must be a power of two, got {substeps}")

    n_steps = (grid.n_points - 1) * substeps
    dt = grid.spacing / substeps
    # stage times on a half-step lattice
    t_half = np.linspace(0.0, grid.t_max, 2 * n_steps + 1)
    a = -1j * interaction_matrix(spec, t_half)
    steps = _rk4_step_matrices(a[0:-1:2], a[1::2], a[2::2], dt)

    # fold substeps into one propagator per grid interval
    while steps.shape[0] > grid.n_points - 1:
        steps = steps[1::2] @ steps[0::2]

    c = np.zeros((grid.n_points, spec.dim), dtype=complex)
    c[0, spec.initial] = 1.0
    for j in range(grid.n_points - 1):
        c[j + 1] = steps[j] @ c[j]
    return c


def normalization_defect(table: CoefficientTable, t_index: int, order: int | None = None) -> float:
    """``| sum_n |naive c_n(t)|^2 - 1 |`` at one grid node."""
    order = table.order if order is None else order
    amp = table.values[:order, t_index].sum(axis=0)
    amp[table.initial] += 1.0
    return float(abs(np.sum(np.abs(amp) ** 2) - 1.0))
