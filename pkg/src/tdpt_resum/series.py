"""Truncated power series in the perturbative strength.

A :class:`TruncatedSeries` holds the coefficients ``a_1 .. a_R`` of a
series with no constant term.  Whether the amplitude it represents is
``1 + sum(a)`` (diagonal, the initially occupied state) or ``sum(a)``
(off-diagonal) is decided by the function that consumes it.

Coefficient arrays may carry trailing batch axes, so a whole time grid
can be transformed at once: ``coeffs.shape == (R, *batch)``.

The resummation maps are formal compositions with analytic Taylor data::

    alpha = log(1 + c)            ->  amplitude exp(sum(alpha))
    beta  = arcsin(Re c), arcsin(Im c)
                                  ->  amplitude sin(sum Re) + i sin(sum Im)

Both are computed order by order, so coefficient ``r`` of a transform
depends on the input coefficients ``1 .. r`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OrderMismatchError",
    "TruncatedSeries",
    "AnalyticTaylorData",
    "compose_analytic",
    "log_transform",
    "arcsin_transform_reim",
    "eval_naive",
    "eval_exp_resummed",
    "eval_sin_resummed",
]


class OrderMismatchError(ValueError):
    """Two truncated objects were combined at different orders."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients ``a_1 .. a_R`` of a series with zero constant term.

    ``coeffs[r - 1]`` is the order-``r`` coefficient.  Extra trailing axes
    are batch axes (e.g. time nodes).
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 0 or c.shape[0] < 1:
            raise ValueError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @property
    def real(self) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs.real)

    @property
    def imag(self) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs.imag)

    def total(self) -> np.ndarray | complex:
        """Plain sum of the stored coefficients (no constant term)."""
        s = self.coeffs.sum(axis=0)
        return complex(s) if s.ndim == 0 else s

    def truncate(self, order: int) -> "TruncatedSeries":
        if not 1 <= order <= self.order:
            raise OrderMismatchError(f"cannot truncate order {self.order} series to {order}")
        return TruncatedSeries(self.coeffs[:order])

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, batch={self.batch_shape})"


@dataclass(frozen=True)
class AnalyticTaylorData:
    """Taylor coefficients ``f_1 .. f_R`` of an analytic ``f`` with ``f(0) = 0``."""

    coeffs: tuple[float, ...]
    name: str = "f"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(x) for x in self.coeffs))
        if not self.coeffs:
            raise ValueError("need at least one Taylor coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def log1p(cls, order: int) -> "AnalyticTaylorData":
        return cls(tuple((-1) ** (r + 1) / r for r in range(1, order + 1)), "log1p")

    @classmethod
    def arcsin(cls, order: int) -> "AnalyticTaylorData":
        # arcsin x = sum_n C(2n, n) / (4^n (2n + 1)) x^(2n+1)
        f = [0.0] * order
        for r in range(1, order + 1, 2):
            n = (r - 1) // 2
            f[r - 1] = math.comb(2 * n, n) / (4**n * (2 * n + 1))
        return cls(tuple(f), "arcsin")

    @classmethod
    def expm1(cls, order: int) -> "AnalyticTaylorData":
        return cls(tuple(1 / math.factorial(r) for r in range(1, order + 1)), "expm1")

    @classmethod
    def sin(cls, order: int) -> "AnalyticTaylorData":
        f = [0.0] * order
        for r in range(1, order + 1, 2):
            f[r - 1] = (-1) ** ((r - 1) // 2) / math.factorial(r)
        return cls(tuple(f), "sin")


def _mul_truncated(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # a, b include the constant slot at index 0; keep indices 0..len-1
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    n = a.shape[0]
    for i in range(n):
        out[i:] += a[i] * b[: n - i]
    return out


def compose_analytic(f: AnalyticTaylorData, s: TruncatedSeries) -> TruncatedSeries:
    """Order-``R`` truncation of ``f(s(eps))`` as a series in ``eps``.

    Powers ``s, s**2, ..., s**R`` are built by truncated multiplication
    and combined with ``f_1 .. f_R``.  Real Taylor data applied to a real
    series gives a real-valued result (stored as complex).
    """
    if f.order != s.order:
        raise OrderMismatchError(f"Taylor data has order {f.order}, series has order {s.order}")
    x = s.coeffs
    if not np.iscomplexobj(x) or np.all(x.imag == 0):
        x = x.real
    padded = np.concatenate([np.zeros((1,) + x.shape[1:], dtype=x.dtype), x])
    power = padded
    result = f.coeffs[0] * padded
    for k in range(1, f.order):
        power = _mul_truncated(power, padded)
        if f.coeffs[k] != 0.0:
            result = result + f.coeffs[k] * power
    return TruncatedSeries(result[1:])


def log_transform(c: TruncatedSeries) -> TruncatedSeries:
    """Coefficients ``alpha`` with ``exp(sum alpha_r) = 1 + sum c_r`` order by order.

    At order 3 this gives ``alpha_1 = c_1``, ``alpha_2 = c_2 - c_1**2 / 2``,
    ``alpha_3 = c_1**3 / 3 - c_1 c_2 + c_3``.
    """
    return compose_analytic(AnalyticTaylorData.log1p(c.order), c)


def arcsin_transform_reim(c: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Formal arcsin of the real and imaginary parts of ``c``, separately.

    No domain check is made on partial sums; the composition is formal.
    """
    f = AnalyticTaylorData.arcsin(c.order)
    return compose_analytic(f, c.real), compose_analytic(f, c.imag)


def eval_naive(c: TruncatedSeries, diagonal: bool):
    """Partial sum of the perturbative series, with constant 1 iff ``diagonal``."""
    return c.total() + (1.0 if diagonal else 0.0)


def eval_exp_resummed(alpha: TruncatedSeries):
    return np.exp(alpha.total())


def eval_sin_resummed(beta_re: TruncatedSeries, beta_im: TruncatedSeries):
    return np.sin(np.real(beta_re.total())) + 1j * np.sin(np.real(beta_im.total()))
