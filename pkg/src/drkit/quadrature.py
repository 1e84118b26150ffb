"""
自适应数值积分
Adaptive quadrature with endpoint-singularity substitutions, plus fixed
Gauss-Legendre rules used by the vectorised integrators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import integrate as sp_integrate

from .errors import ConvergenceError, DomainError, ValidationError


class Substitution(Enum):
    """Change of variables applied before adaptive integration."""
    NONE = "none"
    SQRT_ENDPOINT = "sqrt_endpoint"   # s = lo + u^2, removes (s - lo)^{-1/2}
    EXP_HALFLINE = "exp_halfline"     # t = lo + e^v, maps (lo, hi) onto a line


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and substitution for ``integrate``."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    substitution: Substitution = Substitution.NONE

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValidationError("quadrature tolerances must be positive", field="tolerance")
        if self.max_subdivisions < 1:
            raise ValidationError("max_subdivisions must be at least 1", field="max_subdivisions")

    def with_substitution(self, substitution: Substitution) -> "QuadSpec":
        return QuadSpec(self.abs_tol, self.rel_tol, self.max_subdivisions, substitution)


DEFAULT_QUAD = QuadSpec()


def _transform(f: Callable[[float], float], lo: float, hi: float, substitution: Substitution):
    if substitution is Substitution.NONE:
        return f, lo, hi
    if substitution is Substitution.SQRT_ENDPOINT:
        upper = math.inf if math.isinf(hi) else math.sqrt(hi - lo)
        return (lambda u: f(lo + u * u) * 2.0 * u), 0.0, upper
    if math.isinf(lo):
        raise DomainError("exp_halfline needs a finite lower endpoint", argument="domain")
    upper = math.inf if math.isinf(hi) else math.log(hi - lo)

    def g(v: float) -> float:
        # integrand decays at both ends; guard overflow far out
        if v > 700.0:
            return 0.0
        t = math.exp(v)
        return f(lo + t) * t

    return g, -math.inf, upper


def integrate(
    f: Callable[[float], float],
    domain: Tuple[float, float],
    spec: QuadSpec = DEFAULT_QUAD,
    points: Sequence[float] | None = None,
) -> float:
    """Integrate ``f`` over ``domain = (lo, hi)`` (``hi`` may be ``inf``).

    Raises ConvergenceError carrying the best estimate and error bound when
    the adaptive rule reports failure.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if hi < lo:
        raise DomainError("integration domain must satisfy lo <= hi", argument="domain", value=(lo, hi))
    if hi == lo:
        return 0.0
    g, a, b = _transform(f, lo, hi, spec.substitution)
    kwargs = dict(epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions, full_output=1)
    if points is not None and spec.substitution is Substitution.NONE and not math.isinf(hi):
        kwargs["points"] = list(points)
    result = sp_integrate.quad(g, a, b, **kwargs)
    value, abserr = float(result[0]), float(result[1])
    if len(result) > 3:
        raise ConvergenceError(
            f"adaptive quadrature failed: {result[3].splitlines()[0]}",
            estimate=value,
            error_bound=abserr,
        )
    return value


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] (read-only arrays)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_interval(lo: float, hi: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def composite_gauss_legendre(breaks: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Concatenated Gauss-Legendre rules on consecutive panels ``breaks[i]..breaks[i+1]``."""
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi > lo:
            x, w = gauss_legendre_interval(lo, hi, order)
            nodes.append(x)
            weights.append(w)
    if not nodes:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(nodes), np.concatenate(weights)


def panel_breaks(lo: float, hi: float, width: float, extra: Sequence[float] = ()) -> np.ndarray:
    """Panel boundaries of roughly ``width`` covering [lo, hi], refined at ``extra``."""
    count = max(1, int(math.ceil((hi - lo) / width)))
    breaks = set(np.linspace(lo, hi, count + 1).tolist())
    breaks.update(x for x in extra if lo < x < hi)
    return np.array(sorted(breaks))
