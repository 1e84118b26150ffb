"""
Damek–Ricci 空间 S = N ⋊ R+
The solvable extension S of an H-type group: group law, modular function,
Riemannian distance, closed-form gradients of cosh^2(r/2) and numerically
applied left-invariant vector fields X_0, ..., X_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, List, Optional

import numpy as np

from .errors import DimensionError, ValidationError
from .htype_group import HTypeAlgebra, richardson_derivative


@dataclass(frozen=True)
class SPoint:
    """Point (x, z, a) of S in exponential coordinates, a > 0."""

    x: np.ndarray
    z: np.ndarray
    a: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "z", np.atleast_1d(np.asarray(self.z, dtype=float)))
        object.__setattr__(self, "a", float(self.a))
        if not self.a > 0:
            raise ValidationError("SPoint needs a > 0", field="a")

    @property
    def u(self) -> float:
        return math.log(self.a)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.z, [self.a]])


class Variant(Enum):
    """Region selector for the radial integration densities."""
    FULL = "full"      # all of S
    MINUS = "minus"    # a <= e
    PLUS = "plus"      # a >= 1/e
    ZERO = "zero"      # 1/e <= a <= e

    def bounds(self) -> tuple[float, float]:
        """Range of u = log a."""
        return {
            Variant.FULL: (-math.inf, math.inf),
            Variant.MINUS: (-math.inf, 1.0),
            Variant.PLUS: (-1.0, math.inf),
            Variant.ZERO: (-1.0, 1.0),
        }[self]

    def contains(self, u) -> np.ndarray:
        lo, hi = self.bounds()
        u = np.asarray(u, dtype=float)
        return (u >= lo) & (u <= hi)


@dataclass(frozen=True)
class WeightSpec:
    """Weight selector (b, c, s, gamma, gamma_tilde) for a^s |x|^b |z|^c |log a|^[gamma, gamma_tilde]."""

    b: float = 0.0
    c: float = 0.0
    s: float = 0.0
    gamma: float = 0.0
    gamma_tilde: float = 0.0

    def __post_init__(self):
        for name in ("b", "c", "gamma", "gamma_tilde"):
            if getattr(self, name) < 0:
                raise ValidationError(f"weight parameter {name} must be nonnegative", field=name)

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> "WeightSpec":
        values = list(values)
        if len(values) != 5:
            raise ValidationError("weight spec needs five numbers (b, c, s, gamma, gamma_tilde)", field="weight")
        return cls(*map(float, values))

    @property
    def sigma(self) -> float:
        """Exponent b/4 + c/2 + s that selects the density branch."""
        return self.b / 4.0 + self.c / 2.0 + self.s

    def log_power(self, u):
        """|u|^[gamma, gamma_tilde]: gamma for |u| <= 1, gamma_tilde beyond."""
        au = np.abs(np.asarray(u, dtype=float))
        return np.where(au <= 1.0, au**self.gamma, au**self.gamma_tilde)

    def weight(self, x_norm, z_norm, u):
        return np.asarray(x_norm) ** self.b * np.asarray(z_norm) ** self.c * np.exp(self.s * np.asarray(u)) * self.log_power(u)

    def as_list(self) -> List[float]:
        return [self.b, self.c, self.s, self.gamma, self.gamma_tilde]


def bracket_power(r, low: float, high: float):
    """r^[low, high]: r^low for r <= 1 and r^high for r > 1."""
    r = np.asarray(r, dtype=float)
    return np.where(r <= 1.0, r**low, r**high)


# --------------------------------------------------------------- group law

def _check(alg: HTypeAlgebra, *points: SPoint) -> None:
    for p in points:
        if p.x.shape != (alg.dim_v,) or p.z.shape != (alg.dim_z,):
            raise DimensionError(
                "point dimensions do not match the algebra",
                expected=(alg.dim_v, alg.dim_z),
                got=(p.x.shape, p.z.shape),
            )


def identity_s(alg: HTypeAlgebra) -> SPoint:
    return SPoint(np.zeros(alg.dim_v), np.zeros(alg.dim_z), 1.0)


def compose_s(alg: HTypeAlgebra, p: SPoint, q: SPoint) -> SPoint:
    """(x, z, a)(x', z', a') = ((x, z) . dil_a(x', z'), a a')."""
    _check(alg, p, q)
    root = math.sqrt(p.a)
    return SPoint(
        p.x + root * q.x,
        p.z + p.a * q.z + 0.5 * root * alg.bracket_of(p.x, q.x),
        p.a * q.a,
    )


def inverse_s(alg: HTypeAlgebra, p: SPoint) -> SPoint:
    _check(alg, p)
    return SPoint(-p.x / math.sqrt(p.a), -p.z / p.a, 1.0 / p.a)


def modular_fn(alg: HTypeAlgebra, p: SPoint) -> float:
    """delta(p) = a^{-Q}."""
    return p.a ** (-alg.Q)


def sinh2_half(x_sq, z_sq, a):
    """sinh^2(r/2) from |x|^2, |z|^2 and a, free of cancellation near the identity."""
    q = np.asarray(x_sq) / 4.0
    a = np.asarray(a, dtype=float)
    return ((1.0 - a) ** 2 + 2.0 * q * (1.0 + a) + q * q + np.asarray(z_sq)) / (4.0 * a)


def distance_from_norms(x_norm, z_norm, a):
    """Riemannian distance from the identity as a function of |x|, |z|, a."""
    return 2.0 * np.arcsinh(np.sqrt(sinh2_half(np.asarray(x_norm) ** 2, np.asarray(z_norm) ** 2, a)))


def cosh2_half(alg: HTypeAlgebra, p: SPoint) -> float:
    """cosh^2(|p|/2) = ((1 + a + |x|^2/4)^2 + |z|^2) / (4a)."""
    q = p.x @ p.x / 4.0
    return ((1.0 + p.a + q) ** 2 + p.z @ p.z) / (4.0 * p.a)


def distance_s(alg: HTypeAlgebra, p: SPoint) -> float:
    """|p|, the Riemannian distance from the identity."""
    _check(alg, p)
    return float(2.0 * math.asinh(math.sqrt(float(sinh2_half(p.x @ p.x, p.z @ p.z, p.a)))))


def grad_cosh2(alg: HTypeAlgebra, p: SPoint) -> np.ndarray:
    """Closed forms of X_j(cosh^2(r/2)) for j = 0..n."""
    _check(alg, p)
    q = p.x @ p.x / 4.0
    out = np.empty(alg.n + 1)
    out[0] = -cosh2_half(alg, p) + 0.5 * (1.0 + p.a + q)
    # [x, e_j] . z for every j at once: sum_k x_i b[i, j, k] z_k
    twist = np.einsum("i,ijk,k->j", p.x, alg.bracket, p.z)
    out[1 : alg.dim_v + 1] = ((1.0 + p.a + q) * p.x + twist) / (4.0 * math.sqrt(p.a))
    out[alg.dim_v + 1 :] = p.z / 2.0
    return out


def flow_s(alg: HTypeAlgebra, p: SPoint, j: int, s: float) -> SPoint:
    """p . exp(s Y_j) for j = 0 (the a-direction) or 1..n."""
    if not 0 <= j <= alg.n:
        raise DimensionError("vector field index out of range", expected=(0, alg.n), got=j)
    step_x = np.zeros(alg.dim_v)
    step_z = np.zeros(alg.dim_z)
    a = 1.0
    if j == 0:
        a = math.exp(s)
    elif j <= alg.dim_v:
        step_x[j - 1] = s
    else:
        step_z[j - 1 - alg.dim_v] = s
    return compose_s(alg, p, SPoint(step_x, step_z, a))


def default_step_s(p: SPoint) -> float:
    return 1e-4 * (1.0 + float(np.linalg.norm(p.as_array())))


def left_invariant_derivative_s(
    alg: HTypeAlgebra,
    j: int,
    f: Callable[[SPoint], float],
    p: SPoint,
    step: Optional[float] = None,
) -> float:
    """X_j f(p) (X_0 = a d/da, X_j = a^{1/2}(d/dx_j + [x, e_j] . grad_z / 2), X_{dv+k} = a d/dz_k)."""
    h = default_step_s(p) if step is None else step
    return richardson_derivative(lambda s: f(flow_s(alg, p, j, s)), h)


def second_difference(g: Callable[[float], float], h: float) -> float:
    """Fourth-order central second difference of g at 0."""
    return (-g(2 * h) + 16 * g(h) - 30 * g(0.0) + 16 * g(-h) - g(-2 * h)) / (12 * h * h)


def laplacian_s(alg: HTypeAlgebra, f: Callable[[SPoint], float], p: SPoint, step: float = 0.05) -> float:
    """Distinguished Laplacian -sum_j X_j^2 f(p) along flows."""
    total = 0.0
    for j in range(alg.n + 1):
        total += second_difference(lambda s: f(flow_s(alg, p, j, s)), step)
    return -total


# ----------------------------------------------------------------- sampling

def sample_spoints(alg: HTypeAlgebra, count: int, rng: np.random.Generator, scale: float = 1.0) -> List[SPoint]:
    """Random points with Gaussian x, z and log-normal a."""
    xs = scale * rng.standard_normal((count, alg.dim_v))
    zs = scale * rng.standard_normal((count, alg.dim_z))
    us = scale * rng.standard_normal(count)
    return [SPoint(x, z, math.exp(u)) for x, z, u in zip(xs, zs, us)]


def eikonal_defect(alg: HTypeAlgebra, p: SPoint) -> float:
    """|sum_j (X_j cosh^2(r/2))^2 - (sinh(r)/2)^2| relative to (sinh(r)/2)^2."""
    r = distance_s(alg, p)
    target = (0.5 * math.sinh(r)) ** 2
    grad = grad_cosh2(alg, p)
    return abs(float(grad @ grad) - target) / max(target, 1e-300)


def eikonal_check(alg: HTypeAlgebra, samples: int = 1000, seed: int = 0, rng: Optional[np.random.Generator] = None) -> float:
    """Worst eikonal defect over random points."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    return max(eikonal_defect(alg, p) for p in sample_spoints(alg, samples, rng))
