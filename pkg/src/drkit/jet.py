"""
截断 Taylor 级数 (jet) 运算
Truncated univariate Taylor arithmetic.

A ``Jet`` stores normalised Taylor coefficients ``c_k = f^(k)(x0) / k!`` with
shape ``(order + 1, *batch)`` so that a whole grid of base points is carried
through one chain of operations. The propagation rules are the usual
convolution recurrences (the same ones used by jet-style automatic
differentiation), written directly on normalised coefficients.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from .errors import DomainError, JetOrderError

MAX_ORDER = 16

Number = Union[float, int, np.ndarray]


class Jet:
    """Truncated Taylor expansion ``sum_k coeffs[k] * h**k`` about a base point."""

    __slots__ = ("coeffs",)
    __array_priority__ = 100.0

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0:
            raise DomainError("jet coefficients need a leading order axis", argument="coeffs")
        if coeffs.shape[0] - 1 > MAX_ORDER:
            raise JetOrderError(
                f"jet order {coeffs.shape[0] - 1} exceeds the cap {MAX_ORDER}",
                order=coeffs.shape[0] - 1,
            )
        self.coeffs = coeffs

    @classmethod
    def variable(cls, x0: Number, order: int) -> "Jet":
        """Jet of the identity map ``x -> x`` at ``x0``."""
        x0 = np.asarray(x0, dtype=float)
        coeffs = np.zeros((order + 1,) + x0.shape)
        coeffs[0] = x0
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    @classmethod
    def constant(cls, value: Number, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros((order + 1,) + value.shape)
        coeffs[0] = value
        return cls(coeffs)

    @classmethod
    def from_derivatives(cls, derivatives) -> "Jet":
        """Build a jet from plain derivatives ``f, f', f'', ...``."""
        derivatives = np.asarray(derivatives, dtype=float)
        factorials = np.array([math.factorial(k) for k in range(derivatives.shape[0])], dtype=float)
        return cls(derivatives / factorials.reshape((-1,) + (1,) * (derivatives.ndim - 1)))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[1:]

    def derivative_values(self) -> np.ndarray:
        """Plain derivatives ``f^(k)(x0)`` for k = 0..order."""
        factorials = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.coeffs * factorials.reshape((-1,) + (1,) * len(self.batch_shape))

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetOrderError(f"cannot raise jet order {self.order} to {order}", order=self.order)
        return Jet(self.coeffs[: order + 1])

    def evaluate(self, offset: Number) -> np.ndarray:
        """Evaluate the Taylor polynomial at ``x0 + offset`` (Horner)."""
        offset = np.asarray(offset, dtype=float)
        result = np.zeros(np.broadcast_shapes(self.batch_shape, offset.shape))
        for coeff in self.coeffs[::-1]:
            result = result * offset + coeff
        return result

    # ------------------------------------------------------------------ helpers

    def _coerce(self, other) -> tuple["Jet", "Jet"]:
        if not isinstance(other, Jet):
            other = Jet.constant(other, self.order)
        order = min(self.order, other.order)
        a, b = self.truncate(order).coeffs, other.truncate(order).coeffs
        # batch axes broadcast as numpy batches do, right after the order axis
        depth = max(a.ndim, b.ndim)
        a = a.reshape((a.shape[0],) + (1,) * (depth - a.ndim) + a.shape[1:])
        b = b.reshape((b.shape[0],) + (1,) * (depth - b.ndim) + b.shape[1:])
        return Jet(a), Jet(b)

    def _lift(self, other) -> np.ndarray:
        """Coefficients with extra leading batch axes so that ``other`` broadcasts against the batch."""
        extra = max(0, np.ndim(other) - len(self.batch_shape))
        return self.coeffs.reshape((self.order + 1,) + (1,) * extra + self.batch_shape)

    @staticmethod
    def _empty(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        shape = (a.shape[0],) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
        return np.zeros(shape)

    # --------------------------------------------------------------- arithmetic

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs)

    def __add__(self, other) -> "Jet":
        a, b = self._coerce(other)
        return Jet(a.coeffs + b.coeffs)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        a, b = self._coerce(other)
        return Jet(a.coeffs - b.coeffs)

    def __rsub__(self, other) -> "Jet":
        a, b = self._coerce(other)
        return Jet(b.coeffs - a.coeffs)

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self._lift(other) * np.asarray(other, dtype=float))
        a, b = self._coerce(other)
        x, y = a.coeffs, b.coeffs
        out = self._empty(x, y)
        for k in range(out.shape[0]):
            out[k] = np.sum(x[: k + 1] * y[k::-1], axis=0)
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if np.any(other == 0):
                raise DomainError("jet division by zero", argument="denominator")
            return Jet(self._lift(other) / other)
        a, b = self._coerce(other)
        x, y = a.coeffs, b.coeffs
        if np.any(y[0] == 0):
            raise DomainError("jet division needs a nonzero constant coefficient", argument="denominator")
        out = self._empty(x, y)
        for k in range(out.shape[0]):
            conv = np.sum(y[1 : k + 1] * out[k - 1 :: -1][:k], axis=0) if k else 0.0
            out[k] = (x[k] - conv) / y[0]
        return Jet(out)

    def __rtruediv__(self, other) -> "Jet":
        return Jet.constant(other, self.order) / self

    def __pow__(self, exponent: float) -> "Jet":
        return self.power(exponent)

    # ------------------------------------------------------------ elementaries

    def exp(self) -> "Jet":
        a = self.coeffs
        out = np.zeros_like(a)
        out[0] = np.exp(a[0])
        for k in range(1, self.order + 1):
            j = np.arange(1, k + 1).reshape((-1,) + (1,) * len(self.batch_shape))
            out[k] = np.sum(j * a[1 : k + 1] * out[k - 1 :: -1][:k], axis=0) / k
        return Jet(out)

    def log(self) -> "Jet":
        a = self.coeffs
        if np.any(a[0] <= 0):
            raise DomainError("jet log needs a positive constant coefficient", argument="x0")
        out = np.zeros_like(a)
        out[0] = np.log(a[0])
        for k in range(1, self.order + 1):
            conv = 0.0
            if k > 1:
                j = np.arange(1, k).reshape((-1,) + (1,) * len(self.batch_shape))
                conv = np.sum(j * out[1:k] * a[k - 1 : 0 : -1], axis=0) / k
            out[k] = (a[k] - conv) / a[0]
        return Jet(out)

    def power(self, exponent: float) -> "Jet":
        a = self.coeffs
        if np.any(a[0] <= 0):
            raise DomainError("jet power needs a positive constant coefficient", argument="x0")
        out = np.zeros_like(a)
        out[0] = a[0] ** exponent
        for k in range(1, self.order + 1):
            j = np.arange(1, k + 1).reshape((-1,) + (1,) * len(self.batch_shape))
            out[k] = np.sum(((exponent + 1) * j - k) * a[1 : k + 1] * out[k - 1 :: -1][:k], axis=0) / (k * a[0])
        return Jet(out)

    def sqrt(self) -> "Jet":
        return self.power(0.5)

    def _sinh_cosh(self) -> tuple[np.ndarray, np.ndarray]:
        a = self.coeffs
        s = np.zeros_like(a)
        c = np.zeros_like(a)
        s[0] = np.sinh(a[0])
        c[0] = np.cosh(a[0])
        for k in range(1, self.order + 1):
            j = np.arange(1, k + 1).reshape((-1,) + (1,) * len(self.batch_shape))
            s[k] = np.sum(j * a[1 : k + 1] * c[k - 1 :: -1][:k], axis=0) / k
            c[k] = np.sum(j * a[1 : k + 1] * s[k - 1 :: -1][:k], axis=0) / k
        return s, c

    def sinh(self) -> "Jet":
        return Jet(self._sinh_cosh()[0])

    def cosh(self) -> "Jet":
        return Jet(self._sinh_cosh()[1])

    # ------------------------------------------------------------- calculus

    def derivative(self) -> "Jet":
        """Jet of f' (one order is consumed)."""
        if self.order < 1:
            raise JetOrderError("jet order exhausted", order=self.order)
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(k * self.coeffs[1:])

    def divide_by_variable(self) -> "Jet":
        """Jet of f(x)/(x - x0) for a jet with vanishing constant term."""
        if self.order < 1:
            raise JetOrderError("jet order exhausted", order=self.order)
        return Jet(self.coeffs[1:])

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, batch={self.batch_shape})"


def jet_apply_derivation(f: Jet, g_denominator: Jet) -> Jet:
    """Return the jet of ``-f' / g``; consumes one order of ``f``."""

    if f.order < 1:
        raise JetOrderError("derivation applied to an order-0 jet", order=f.order)
    return -(f.derivative() / g_denominator)
