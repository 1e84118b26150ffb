"""
热核
The heat kernel h_t of the distinguished Laplacian on S.

h_t = delta^{1/2} G_t(|p|) with G_t radial.  For even dz, G_t is an iterated
derivation D^{dz/2} E^{dv/2} of the real-line Gauss kernel, where
D = -(1/sinh r) d/dr and E = -(1/sinh(r/2)) d/dr.  For odd dz one more D is
applied and the result integrated against sinh s (cosh s - cosh r)^{-1/2} ds
on (r, inf).  Derivations are carried out on jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .dr_space import (
    SPoint,
    WeightSpec,
    Variant,
    distance_s,
    flow_s,
    grad_cosh2,
    laplacian_s,
)
from .errors import DomainError, JetOrderError, ValidationError, require_positive
from .haar_integration import (
    HaarBox,
    ReducedChunk,
    integrate_haar_full,
    integrate_haar_qmc,
    integrate_radial,
    integrate_reduced,
)
from .htype_group import HTypeAlgebra, central_difference
from .jet import MAX_ORDER, Jet, jet_apply_derivation
from .quadrature import gauss_legendre_interval, panel_breaks

# below this radius the derivation chain is expanded about r = 0
SMALL_RADIUS = 0.25
# Gaussian tail cut: exp(-(s^2 - r^2)/4t) < e^{-TAIL}
TAIL = 45.0
_ODD_PANELS = 24
_ODD_ORDER = 10


def _gauss(var: Jet, t: float) -> Jet:
    return (-(var * var) / (4.0 * t)).exp() * (4.0 * math.pi * t) ** -0.5


def _chain_far(s: np.ndarray, t: float, e_count: int, d_count: int, nderiv: int) -> np.ndarray:
    var = Jet.variable(s, e_count + d_count + nderiv)
    f = _gauss(var, t)
    half, full = (var * 0.5).sinh(), var.sinh()
    for _ in range(e_count):
        f = jet_apply_derivation(f, half)
    for _ in range(d_count):
        f = jet_apply_derivation(f, full)
    return f.derivative_values()


def _chain_origin(s: np.ndarray, t: float, e_count: int, d_count: int, nderiv: int) -> np.ndarray:
    # -f'/sinh(c r) at r = 0 as (f'/r) / (sinh(c r)/r); each step uses two orders
    var = Jet.variable(0.0, MAX_ORDER)
    f = _gauss(var, t)
    half, full = (var * 0.5).sinh().divide_by_variable(), var.sinh().divide_by_variable()
    for den in [half] * e_count + [full] * d_count:
        f = -(f.derivative().divide_by_variable() / den)
    if f.order < nderiv + 2:
        raise JetOrderError("derivation chain too long for the origin expansion", order=f.order)
    out = np.empty((nderiv + 1,) + s.shape)
    for k in range(nderiv + 1):
        out[k] = f.evaluate(s)
        f = f.derivative()
    return out


def derivation_chain(s, t: float, e_count: int, d_count: int, nderiv: int = 0) -> np.ndarray:
    """Values and the first ``nderiv`` derivatives of D^d_count E^e_count of the Gauss kernel.

    Returns an array of shape (nderiv + 1, *s.shape).
    """
    s = np.asarray(s, dtype=float)
    out = np.empty((nderiv + 1,) + s.shape)
    near = s <= SMALL_RADIUS
    if np.any(near):
        out[:, near] = _chain_origin(s[near], t, e_count, d_count, nderiv)
    if np.any(~near):
        out[:, ~near] = _chain_far(s[~near], t, e_count, d_count, nderiv)
    return out


@dataclass(frozen=True)
class RadialKernel:
    """r -> delta^{-1/2} h_t at radius r, with its r-derivative."""

    alg: HTypeAlgebra
    t: float

    def __post_init__(self):
        require_positive(self.t, "t")

    @property
    def odd_center(self) -> bool:
        return self.alg.dim_z % 2 == 1

    @property
    def prefactor(self) -> float:
        dv, dz, n = self.alg.dim_v, self.alg.dim_z, self.alg.n
        power = (n + 1) / 2.0 if self.odd_center else n / 2.0
        return 2.0 ** (-dv - dz / 2.0) * math.pi ** (-power)

    def evaluate(self, r, nderiv: int = 0) -> np.ndarray:
        """Array of shape (nderiv + 1, *r.shape): value and r-derivative."""
        if nderiv not in (0, 1):
            raise ValidationError("only the value and first derivative are available", field="nderiv")
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise DomainError("radius must be nonnegative", argument="r", value=float(r.min()))
        e_count = self.alg.dim_v // 2
        if not self.odd_center:
            return self.prefactor * derivation_chain(r, self.t, e_count, self.alg.dim_z // 2, nderiv)
        flat = r.ravel()
        out = self._odd_integral(flat, e_count, (self.alg.dim_z + 1) // 2, nderiv)
        return self.prefactor * out.reshape((nderiv + 1,) + r.shape)

    def _odd_integral(self, r: np.ndarray, e_count: int, d_count: int, nderiv: int) -> np.ndarray:
        # s = r + u^2 on u in [0, u_max(r)]
        xi, wxi = _unit_rule()
        s_max = np.sqrt(r * r + 4.0 * self.t * TAIL) + 2.0
        u_max = np.sqrt(s_max - r)[:, None]
        u = u_max * xi[None, :]
        wu = u_max * wxi[None, :]
        rr = r[:, None]
        s = rr + u * u
        chain = derivation_chain(s, self.t, e_count, d_count, nderiv)
        jac = 2.0 * u / np.sqrt(2.0 * np.sinh(0.5 * u * u))
        shifted = np.sinh(rr + 0.5 * u * u)
        factor = np.sinh(s) / np.sqrt(shifted)
        out = np.empty((nderiv + 1, r.size))
        out[0] = np.sum(jac * chain[0] * factor * wu, axis=1)
        if nderiv:
            d_factor = np.cosh(s) / np.sqrt(shifted) - 0.5 * np.sinh(s) * np.cosh(rr + 0.5 * u * u) / shifted**1.5
            out[1] = np.sum(jac * (chain[1] * factor + chain[0] * d_factor) * wu, axis=1)
        return out

    def value(self, r):
        out = self.evaluate(r)[0]
        return float(out) if out.ndim == 0 else out

    def derivative(self, r):
        out = self.evaluate(r, 1)[1]
        return float(out) if out.ndim == 0 else out


def _unit_rule() -> Tuple[np.ndarray, np.ndarray]:
    breaks = panel_breaks(0.0, 1.0, 1.0 / _ODD_PANELS)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        x, w = gauss_legendre_interval(lo, hi, _ODD_ORDER)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def radial_heat(alg: HTypeAlgebra, t: float, r):
    """delta^{-1/2} h_t at radius r (scalar or array)."""
    return RadialKernel(alg, t).value(r)


def heat_from_coords(alg: HTypeAlgebra, t: float, r, a):
    """h_t from the distance r = |p| and the R+ coordinate a (vectorised)."""
    return np.asarray(a, dtype=float) ** (-alg.Q / 2.0) * RadialKernel(alg, t).evaluate(r)[0]


def heat_at_point(alg: HTypeAlgebra, t: float, p: SPoint) -> float:
    """h_t(p) = delta^{1/2}(p) G_t(|p|)."""
    return float(heat_from_coords(alg, t, distance_s(alg, p), p.a))


def grad_heat(alg: HTypeAlgebra, t: float, p: SPoint) -> np.ndarray:
    """(X_0 h_t, ..., X_n h_t)(p), semi-analytic."""
    r = distance_s(alg, p)
    values = RadialKernel(alg, t).evaluate(np.array(r), 1)
    g, dg = float(values[0]), float(values[1])
    root_delta = p.a ** (-alg.Q / 2.0)
    out = np.zeros(alg.n + 1)
    out[0] = -0.5 * alg.Q * root_delta * g
    if r > 1e-12:
        out += root_delta * dg * (2.0 / math.sinh(r)) * grad_cosh2(alg, p)
    return out


def gradient_norm_over_root_delta(alg: HTypeAlgebra, g, dg, r, a, x_norm):
    """|grad h_t| / delta^{1/2} from G, G', r, a and |x| (vectorised)."""
    q = np.asarray(x_norm) ** 2 / 4.0
    c2 = np.cosh(np.asarray(r) / 2.0) ** 2
    x0_r = (2.0 / np.sinh(r)) * (-c2 + 0.5 * (1.0 + a + q))
    x0_r = np.clip(x0_r, -1.0, 1.0)
    radial_x0 = -0.5 * alg.Q * g + dg * x0_r
    return np.sqrt(radial_x0**2 + dg**2 * (1.0 - x0_r**2))


# --------------------------------------------------------------- envelopes

def kernel_envelope(alg: HTypeAlgebra, t: float, r):
    r = np.asarray(r, dtype=float)
    return t**-1.5 * (1.0 + r) * (1.0 + (1.0 + r) / t) ** ((alg.n - 2) / 2.0) * np.exp(-alg.Q * r / 2.0 - r * r / (4.0 * t))


def gradient_envelope(alg: HTypeAlgebra, t: float, r):
    r = np.asarray(r, dtype=float)
    return t**-1.5 * r * (1.0 + (1.0 + r) / t) ** (alg.n / 2.0) * np.exp(-alg.Q * r / 2.0 - r * r / (4.0 * t))


def envelope_band(
    alg: HTypeAlgebra,
    t_values: Sequence[float],
    r_values: Sequence[float],
    which: str = "kernel",
) -> Tuple[float, float]:
    """(min, max) of the kernel or radial-gradient ratio to its envelope over the grid."""
    if which not in ("kernel", "gradient"):
        raise ValidationError(f"unknown envelope {which!r}", field="which")
    ratios = []
    for t in t_values:
        kernel = RadialKernel(alg, t)
        r = np.asarray([x for x in r_values if which == "kernel" or x > 0], dtype=float)
        if which == "kernel":
            ratios.append(kernel.evaluate(r)[0] / kernel_envelope(alg, t, r))
        else:
            ratios.append(np.abs(kernel.evaluate(r, 1)[1]) / gradient_envelope(alg, t, r))
    ratios = np.concatenate(ratios)
    return float(ratios.min()), float(ratios.max())


# ------------------------------------------------------------- L1 estimates

def _l1_radius(t: float, epsilon: float) -> float:
    cut = math.sqrt(4.0 * t * 40.0 / (1.0 - epsilon)) + 2.0
    return 8.0 * math.ceil(cut / 8.0)


def weighted_l1(alg: HTypeAlgebra, t: float, epsilon: float, which: str = "kernel") -> float:
    """Integral of |h_t| (or |grad h_t|) times exp(epsilon |p|^2 / 4t) over S."""
    require_positive(t, "t")
    if not 0.0 <= epsilon < 1.0:
        raise DomainError("epsilon must lie in [0, 1)", argument="epsilon", value=epsilon)
    kernel = RadialKernel(alg, t)
    r_max = _l1_radius(t, epsilon)
    if which == "kernel":
        profile = lambda r: np.abs(kernel.evaluate(r)[0]) * np.exp(epsilon * r * r / (4.0 * t))
        return integrate_radial(alg, profile, WeightSpec(), Variant.FULL, r_max)
    if which != "gradient":
        raise ValidationError(f"unknown integrand {which!r}", field="which")

    def integrand(chunk: ReducedChunk) -> np.ndarray:
        g, dg = kernel.evaluate(np.array(chunk.r), 1)
        norm = gradient_norm_over_root_delta(alg, float(g), float(dg), chunk.r, chunk.a, chunk.x_norm)
        return norm * math.exp(epsilon * chunk.r**2 / (4.0 * t))

    return integrate_reduced(alg, integrand, WeightSpec(), Variant.FULL, 0.0, r_max)


def mass(alg: HTypeAlgebra, t: float) -> float:
    """||h_t||_1, equal to 1."""
    return weighted_l1(alg, t, 0.0, "kernel")


# ------------------------------------------------------- PDE and local bounds

def heat_equation_residual(
    alg: HTypeAlgebra,
    t: float,
    p: SPoint,
    step: float = 0.05,
    kernel: Optional[Callable[[float, SPoint], float]] = None,
) -> float:
    """|d_t h + Delta h| / (|h|/t + |Delta h|) at p by finite differences."""
    require_positive(t, "t")
    kernel = kernel or (lambda s, q: heat_at_point(alg, s, q))
    dt = central_difference(lambda e: kernel(t + e, p), 1e-3 * t)
    lap = laplacian_s(alg, lambda q: kernel(t, q), p, step)
    scale = abs(kernel(t, p)) / t + abs(lap)
    return abs(dt + lap) / scale


def _points_from_batch(x: np.ndarray, z: np.ndarray, a: np.ndarray):
    return [SPoint(xi, zi, ai) for xi, zi, ai in zip(x, z, a)]


def mixed_second_derivative(
    alg: HTypeAlgebra, t: float, points: Sequence[SPoint], j: int, k: int, step: float = 1e-3
) -> np.ndarray:
    """X_j X_k h_t at each point by a central mixed difference along the flows."""
    radii, dil = [], []
    for p in points:
        for s1, s2 in ((step, step), (step, -step), (-step, step), (-step, -step)):
            q = flow_s(alg, flow_s(alg, p, j, s1), k, s2)
            radii.append(distance_s(alg, q))
            dil.append(q.a)
    values = heat_from_coords(alg, t, np.array(radii), np.array(dil)).reshape(-1, 4)
    return (values[:, 0] - values[:, 1] - values[:, 2] + values[:, 3]) / (4.0 * step * step)


def second_derivative_local_l1(
    alg: HTypeAlgebra,
    t: float,
    box: Optional[HaarBox] = None,
    j: int = 0,
    k: int = 0,
    order: int = 6,
) -> float:
    """Integral of |X_j X_k h_t| over a compact box."""
    require_positive(t, "t")
    box = box or HaarBox(1.0, 1.0, -1.0, 1.0)

    def f(x, z, a):
        return np.abs(mixed_second_derivative(alg, t, _points_from_batch(x, z, a), j, k))

    if alg.dim_v + alg.dim_z + 1 <= 4:
        return integrate_haar_full(alg, f, box, order)
    return integrate_haar_qmc(alg, f, box, log2_points=10)
