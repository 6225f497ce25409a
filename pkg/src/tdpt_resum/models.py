"""The four exactly solvable benchmark systems.

========================  =====================================  ==========================
id                        unperturbed / perturbation (hbar = 1)  parameters
========================  =====================================  ==========================
toy_phase                 E = omega,  h = epsilon (one level)    omega, epsilon
two_level_gap             diag(e1, e2), gamma * sigma_x          e1, e2, gamma
two_level_degenerate      diag(e0, e0), gamma * sigma_x          e0, gamma
spin_resonance            -omega0/2 sigma_z,                     omega0, omega1, omega
                          -omega1/2 (sigma_x cos wt + sigma_y sin wt)
========================  =====================================  ==========================

Amplitudes are reported in the interaction picture (free phases
``exp(-i E_n t)`` stripped) unless stated otherwise.  For the spin model
the drive duration is the evaluation time.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields
from typing import Mapping

import numpy as np

from .engine import SystemSpec, constant_perturbation

__all__ = [
    "ModelId",
    "InvalidParamsError",
    "UnsupportedOrderError",
    "NoClosedFormError",
    "ToyPhaseParams",
    "TwoLevelGapParams",
    "TwoLevelDegenerateParams",
    "SpinResonanceParams",
    "ExactAmplitude",
    "make_params",
    "default_params",
    "build_system",
    "closed_form_orders",
    "closed_form_coefficients",
    "has_exact_closed_form",
    "exact_amplitude",
]


class InvalidParamsError(ValueError):
    pass


class UnsupportedOrderError(ValueError):
    """No closed-form coefficient is implemented for this (model, order)."""


class NoClosedFormError(ValueError):
    """The exact amplitude of this configuration has no closed form here."""


class ModelId(str, enum.Enum):
    TOY_PHASE = "toy_phase"
    TWO_LEVEL_GAP = "two_level_gap"
    TWO_LEVEL_DEGENERATE = "two_level_degenerate"
    SPIN_RESONANCE = "spin_resonance"

    @classmethod
    def parse(cls, name) -> "ModelId":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise InvalidParamsError(
                f"unknown model {name!r}; expected one of {[m.value for m in cls]}") from None

    @property
    def cli_name(self) -> str:
        return self.value.replace("_", "-")


def _check_finite(p):
    for f in fields(p):
        v = getattr(p, f.name)
        if not math.isfinite(v):
            raise InvalidParamsError(f"{f.name} must be finite, got {v}")


@dataclass(frozen=True)
class ToyPhaseParams:
    omega: float
    epsilon: float

    def __post_init__(self):
        _check_finite(self)


@dataclass(frozen=True)
class TwoLevelGapParams:
    e1: float
    e2: float
    gamma: float

    def __post_init__(self):
        _check_finite(self)
        if not 0 < self.e1 < self.e2:
            raise InvalidParamsError(f"need 0 < e1 < e2, got e1={self.e1}, e2={self.e2}")
        if self.gamma <= 0:
            raise InvalidParamsError(f"gamma must be positive, got {self.gamma}")

    @property
    def omega(self) -> float:
        return self.e2 - self.e1


@dataclass(frozen=True)
class TwoLevelDegenerateParams:
    e0: float
    gamma: float

    def __post_init__(self):
        _check_finite(self)
        if self.gamma <= 0:
            raise InvalidParamsError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class SpinResonanceParams:
    omega0: float
    omega1: float
    omega: float

    def __post_init__(self):
        _check_finite(self)
        if self.omega1 <= 0:
            raise InvalidParamsError(f"omega1 must be positive, got {self.omega1}")

    @property
    def detuning(self) -> float:
        return self.omega0 + self.omega


_PARAMS = {
    ModelId.TOY_PHASE: ToyPhaseParams,
    ModelId.TWO_LEVEL_GAP: TwoLevelGapParams,
    ModelId.TWO_LEVEL_DEGENERATE: TwoLevelDegenerateParams,
    ModelId.SPIN_RESONANCE: SpinResonanceParams,
}

_DEFAULTS = {
    ModelId.TOY_PHASE: dict(omega=1.0, epsilon=0.01),
    ModelId.TWO_LEVEL_GAP: dict(e1=1.0, e2=2.0, gamma=0.05),
    ModelId.TWO_LEVEL_DEGENERATE: dict(e0=1.0, gamma=0.1),
    ModelId.SPIN_RESONANCE: dict(omega0=1.0, omega1=0.02, omega=-1.0),
}


def param_names(model) -> list[str]:
    return [f.name for f in fields(_PARAMS[ModelId.parse(model)])]


def make_params(model, values: Mapping[str, float]):
    """Validate a name -> number mapping against the model's parameter schema."""
    model = ModelId.parse(model)
    cls = _PARAMS[model]
    names = param_names(model)
    unknown = sorted(set(values) - set(names))
    missing = [n for n in names if n not in values]
    if unknown:
        raise InvalidParamsError(f"unknown parameter(s) for {model.value}: {', '.join(unknown)}")
    if missing:
        raise InvalidParamsError(f"missing parameter(s) for {model.value}: {', '.join(missing)}")
    try:
        return cls(**{n: float(values[n]) for n in names})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParamsError):
            raise
        raise InvalidParamsError(str(exc)) from exc


def default_params(model):
    model = ModelId.parse(model)
    return make_params(model, _DEFAULTS[model])


def _coerce(model, params):
    model = ModelId.parse(model)
    if isinstance(params, Mapping):
        params = make_params(model, params)
    if not isinstance(params, _PARAMS[model]):
        raise InvalidParamsError(f"{type(params).__name__} does not belong to {model.value}")
    return model, params


def build_system(model, params) -> SystemSpec:
    model, p = _coerce(model, params)
    if model is ModelId.TOY_PHASE:
        return SystemSpec([p.omega], constant_perturbation([[p.epsilon]]))
    if model is ModelId.TWO_LEVEL_GAP:
        return SystemSpec([p.e1, p.e2], constant_perturbation([[0, p.gamma], [p.gamma, 0]]))
    if model is ModelId.TWO_LEVEL_DEGENERATE:
        return SystemSpec([p.e0, p.e0], constant_perturbation([[0, p.gamma], [p.gamma, 0]]))

    # sigma_x cos(wt) + sigma_y sin(wt) = [[0, e^{-iwt}], [e^{iwt}, 0]]
    def drive(t):
        t = np.asarray(t, dtype=float)
        h = np.zeros(t.shape + (2, 2), dtype=complex)
        h[..., 1, 0] = -0.5 * p.omega1 * np.exp(1j * p.omega * t)
        h[..., 0, 1] = -0.5 * p.omega1 * np.exp(-1j * p.omega * t)
        return h

    return SystemSpec([-0.5 * p.omega0, 0.5 * p.omega0], drive)


def closed_form_orders(model, params=None) -> tuple[int, ...] | None:
    """Orders with closed-form coefficients; ``None`` means every order."""
    model = ModelId.parse(model)
    if model in (ModelId.TOY_PHASE, ModelId.TWO_LEVEL_DEGENERATE):
        return None
    if model is ModelId.TWO_LEVEL_GAP:
        return (1, 2)
    return (1,)


def _phase_integral(delta, t):
    """``int_0^t exp(i delta s) ds``, exact at ``delta = 0``."""
    if delta == 0.0:
        return t.astype(complex)
    return np.expm1(1j * delta * t) / (1j * delta)


def closed_form_coefficients(model, params, t, order: int) -> np.ndarray:
    """Closed-form ``c_n^(order)(t)`` for every level; shape ``t.shape + (N,)``.

    ``two_level_gap`` second order, with ``w = e2 - e1``::

        c_1^(2) = i (gamma/w)^2 (w t - sin w t) - 2 (gamma/w)^2 sin^2(w t / 2)
    """
    model, p = _coerce(model, params)
    t = np.asarray(t, dtype=float)
    allowed = closed_form_orders(model)
    if order < 1 or (allowed is not None and order not in allowed):
        raise UnsupportedOrderError(f"no closed form for {model.value} at order {order}")

    if model is ModelId.TOY_PHASE:
        return ((-1j * p.epsilon * t) ** order / math.factorial(order))[..., None]

    out = np.zeros(t.shape + (2,), dtype=complex)
    if model is ModelId.TWO_LEVEL_DEGENERATE:
        # exp(-i gamma t sigma_x) e_1 expanded in gamma
        out[..., order % 2] = (-1j * p.gamma * t) ** order / math.factorial(order)
    elif model is ModelId.TWO_LEVEL_GAP:
        g, w = p.gamma, p.omega
        if order == 1:
            out[..., 1] = -g * np.expm1(1j * w * t) / w
        else:
            out[..., 0] = (1j * (g / w) ** 2 * (w * t - np.sin(w * t))
                           - 2 * (g / w) ** 2 * np.sin(w * t / 2) ** 2)
    else:
        out[..., 1] = 0.5j * p.omega1 * _phase_integral(p.detuning, t)
    return out


@dataclass(frozen=True, eq=False)
class ExactAmplitude:
    """Exact amplitudes, shape ``t.shape + (N,)``.

    ``interaction`` holds ``c_n(t)``; ``schrodinger`` includes the free
    phase ``exp(-i E_n t)``.
    """

    interaction: np.ndarray
    schrodinger: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.interaction) ** 2


def has_exact_closed_form(model, params) -> bool:
    model, p = _coerce(model, params)
    return model is not ModelId.SPIN_RESONANCE or p.detuning == 0.0


def exact_amplitude(model, params, t) -> ExactAmplitude:
    model, p = _coerce(model, params)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("exact amplitudes are defined for t >= 0")

    if model is ModelId.TOY_PHASE:
        c = np.exp(-1j * p.epsilon * t)[..., None]
        energies = np.array([p.omega])
    elif model is ModelId.TWO_LEVEL_GAP:
        w, g = p.omega, p.gamma
        big = math.sqrt(w * w + 4 * g * g)
        s, co = np.sin(big * t / 2), np.cos(big * t / 2)
        # Schrodinger amplitudes carry exp(-i (e1 + e2) t / 2); strip exp(-i E_n t)
        c = np.stack([(co + 1j * (w / big) * s) * np.exp(-0.5j * w * t),
                      -1j * (2 * g / big) * s * np.exp(0.5j * w * t)], axis=-1)
        energies = np.array([p.e1, p.e2])
    elif model is ModelId.TWO_LEVEL_DEGENERATE:
        c = np.stack([np.cos(p.gamma * t), -1j * np.sin(p.gamma * t)], axis=-1).astype(complex)
        energies = np.array([p.e0, p.e0])
    else:
        if p.detuning != 0.0:
            raise NoClosedFormError("spin resonance has a closed form only at omega0 + omega = 0")
        half = 0.5 * p.omega1 * t
        c = np.stack([np.cos(half), 1j * np.sin(half)], axis=-1).astype(complex)
        energies = np.array([-0.5 * p.omega0, 0.5 * p.omega0])

    free = np.exp(-1j * energies * t[..., None])
    return ExactAmplitude(c, c * free)


def as_dict(params) -> dict[str, float]:
    return asdict(params)
