"""
右 Haar 测度上的积分
Integration against the right Haar measure d rho = dx dz da/a on S.

Three paths are provided:

* ``integrate_haar``: adaptive nested quadrature in (|x|, |z|, u = log a) for
  integrands radial in x and in z separately;
* ``integrate_haar_full``: tensor Gauss-Legendre in all coordinates, only for
  dv + dz + 1 <= 4;
* ``integrate_reduced``: the exact change of variables (x, z, a) -> (r, y, u),
  where r = |p| and y = |(x, 0, a)|, for integrands of the form
  delta^{1/2} F w.  It gives the exact radial densities against which the
  constant-free densities ``phi_density`` are compared.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterator, List, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .dr_space import Variant, WeightSpec, bracket_power
from .errors import ConvergenceError, DimensionError, ValidationError
from .htype_group import HTypeAlgebra
from .quadrature import DEFAULT_QUAD, QuadSpec, gauss_legendre, gauss_legendre_interval, panel_breaks
from .specfun import gamma_fn

RadialProfile = Callable[[np.ndarray], np.ndarray]


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2.0) / gamma_fn(d / 2.0)


@dataclass(frozen=True)
class HaarBox:
    """Region |x| <= x_max, |z| <= z_max, u_min <= log a <= u_max."""

    x_max: float = 4.0
    z_max: float = 4.0
    u_min: float = -4.0
    u_max: float = 4.0

    def __post_init__(self):
        if self.x_max <= 0 or self.z_max <= 0 or self.u_max <= self.u_min:
            raise ValidationError("empty integration box", field="box")

    def expanded(self, factor: float = 2.0) -> "HaarBox":
        return HaarBox(self.x_max * factor, self.z_max * factor, self.u_min * factor, self.u_max * factor)

    @classmethod
    def from_dict(cls, data: dict) -> "HaarBox":
        return cls(**{key: float(value) for key, value in data.items()})


# ------------------------------------------------------------ polar path

def _nquad_polar(alg: HTypeAlgebra, f, box: HaarBox, spec: QuadSpec) -> float:
    omega_v = sphere_area(alg.dim_v)
    omega_z = sphere_area(alg.dim_z)

    def integrand(rx: float, rz: float, u: float) -> float:
        a = math.exp(u)
        return float(f(rx, rz, a)) * omega_v * rx ** (alg.dim_v - 1) * omega_z * rz ** (alg.dim_z - 1)

    opts = {"epsabs": spec.abs_tol, "epsrel": spec.rel_tol, "limit": spec.max_subdivisions}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", sp_integrate.IntegrationWarning)
        value, error = sp_integrate.nquad(
            integrand, [[0.0, box.x_max], [0.0, box.z_max], [box.u_min, box.u_max]], opts=[opts, opts, opts]
        )
    if any(issubclass(w.category, sp_integrate.IntegrationWarning) for w in caught):
        raise ConvergenceError("nested Haar quadrature did not converge", estimate=value, error_bound=error)
    return float(value)


def integrate_haar(
    alg: HTypeAlgebra,
    f: Callable[[float, float, float], float],
    box: Optional[HaarBox] = None,
    spec: QuadSpec = DEFAULT_QUAD,
    max_expansions: int = 6,
) -> float:
    """Integral of f(|x|, |z|, a) against d rho.

    With ``box=None`` the box is doubled until the added shell changes the
    total by less than ``spec.rel_tol``.
    """
    if box is not None:
        return _nquad_polar(alg, f, box, spec)
    current = HaarBox()
    total = _nquad_polar(alg, f, current, spec)
    for _ in range(max_expansions):
        current = current.expanded()
        wider = _nquad_polar(alg, f, current, spec)
        if abs(wider - total) <= spec.rel_tol * max(abs(wider), spec.abs_tol):
            return wider
        total = wider
    raise ConvergenceError("Haar integral did not settle while expanding the box", estimate=total)


def integrate_haar_full(
    alg: HTypeAlgebra,
    f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    box: HaarBox,
    order: int = 12,
) -> float:
    """Tensor Gauss-Legendre over the cube |x_i| <= x_max, |z_k| <= z_max, u in [u_min, u_max].

    ``f(x, z, a)`` receives batches of shape (N, dv), (N, dz), (N,).
    """
    dim = alg.dim_v + alg.dim_z + 1
    if dim > 4:
        raise DimensionError("full-dimension Haar quadrature is limited to dv + dz + 1 <= 4", expected=4, got=dim)
    axes = [gauss_legendre_interval(-box.x_max, box.x_max, order)] * alg.dim_v
    axes += [gauss_legendre_interval(-box.z_max, box.z_max, order)] * alg.dim_z
    axes.append(gauss_legendre_interval(box.u_min, box.u_max, order))
    grids = np.meshgrid(*[nodes for nodes, _ in axes], indexing="ij")
    weights = np.ones_like(grids[0])
    for axis, (_, w) in enumerate(axes):
        shape = [1] * dim
        shape[axis] = -1
        weights = weights * w.reshape(shape)
    coords = np.stack([g.ravel() for g in grids], axis=1)
    x = coords[:, : alg.dim_v]
    z = coords[:, alg.dim_v : alg.dim_v + alg.dim_z]
    a = np.exp(coords[:, -1])
    return float(np.sum(np.asarray(f(x, z, a)) * weights.ravel()))


# ---------------------------------------------------------- reduced path

@dataclass(frozen=True)
class ReducedChunk:
    """Quadrature nodes of the reduced coordinates at one radius.

    ``u`` has shape (nu, 1), ``y`` and the derived arrays (nu, ny). ``density``
    holds the exact Jacobian times delta^{1/2} w and the (u, y) weights; the
    radial weight is ``r_weight``.
    """

    r: float
    r_weight: float
    u: np.ndarray
    y: np.ndarray
    x_norm: np.ndarray
    z_norm: np.ndarray
    density: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return np.exp(self.u)


def _endpoint_rule(lo: float, hi: float, order: int, at_hi: bool):
    # s = hi - L w^2 (or lo + L w^2) absorbs half-integer powers of the distance to the endpoint
    w, wt = gauss_legendre_interval(0.0, 1.0, order)
    length = hi - lo
    nodes = hi - length * w * w if at_hi else lo + length * w * w
    return nodes, 2.0 * length * w * wt


def _u_rule(r: float, variant: Variant, width: float, order: int):
    lo, hi = variant.bounds()
    lo, hi = max(lo, -r), min(hi, r)
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    breaks = panel_breaks(lo, hi, width, extra=(-1.0, 0.0, 1.0))
    nodes, weights = [], []
    last = len(breaks) - 2
    for idx, (left, right) in enumerate(zip(breaks[:-1], breaks[1:])):
        if idx == 0 and left == -r:
            x, w = _endpoint_rule(left, right, order, at_hi=False)
        elif idx == last and right == r:
            x, w = _endpoint_rule(left, right, order, at_hi=True)
        else:
            x, w = gauss_legendre_interval(left, right, order)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _y_rule(lo: np.ndarray, hi: float, order: int):
    # y = lo + (hi - lo)(1 - cos theta)/2 handles endpoint singularities at both ends
    theta, wt = gauss_legendre_interval(0.0, math.pi, order)
    length = (hi - lo)[:, None]
    y = lo[:, None] + length * 0.5 * (1.0 - np.cos(theta))[None, :]
    w = length * 0.5 * (np.sin(theta) * wt)[None, :]
    return y, w


@dataclass(frozen=True)
class ReducedRule:
    """Resolution of the reduced quadrature."""

    r_panel: float = 0.5
    r_order: int = 8
    u_panel: float = 2.0
    u_order: int = 10
    y_order: int = 40


DEFAULT_RULE = ReducedRule()


def reduced_chunks(
    alg: HTypeAlgebra,
    weight: WeightSpec = WeightSpec(),
    variant: Variant = Variant.FULL,
    r_min: float = 0.0,
    r_max: float = 20.0,
    rule: ReducedRule = DEFAULT_RULE,
) -> Iterator[ReducedChunk]:
    """Yield one chunk of (u, y) nodes per radial node in [r_min, r_max]."""
    p = (weight.b + alg.dim_v) / 2.0 - 1.0
    q = (weight.c + alg.dim_z) / 2.0 - 1.0
    sigma = weight.sigma
    const = (
        sphere_area(alg.dim_v)
        * sphere_area(alg.dim_z)
        * 0.25
        * 8.0 ** ((weight.b + alg.dim_v) / 2.0)
        * 4.0 ** ((weight.c + alg.dim_z) / 2.0)
    )
    r_breaks = panel_breaks(r_min, r_max, rule.r_panel, extra=(1.0,))
    r_nodes, r_weights = [], []
    for left, right in zip(r_breaks[:-1], r_breaks[1:]):
        x, w = gauss_legendre_interval(left, right, rule.r_order)
        r_nodes.append(x)
        r_weights.append(w)
    for r, wr in zip(np.concatenate(r_nodes), np.concatenate(r_weights)):
        u, wu = _u_rule(float(r), variant, rule.u_panel, rule.u_order)
        if u.size == 0:
            continue
        y, wy = _y_rule(np.abs(u), float(r), rule.y_order)
        uu = u[:, None]
        # cosh(y/2) - cosh(u/2) and cosh^2(r/2) - cosh^2(y/2) in product form
        ch_gap = 2.0 * np.sinh((y + uu) / 4.0) * np.sinh((y - uu) / 4.0)
        c2_gap = np.sinh((r + y) / 2.0) * np.sinh((r - y) / 2.0)
        ch_gap = np.maximum(ch_gap, 0.0)
        c2_gap = np.maximum(c2_gap, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            jac = (
                const
                * 0.25
                * math.sinh(r)
                * np.sinh(y / 2.0)
                * np.power(c2_gap, q)
                * np.power(ch_gap, p)
                * np.exp(sigma * uu)
                * weight.log_power(uu)
            )
        jac = np.where(np.isfinite(jac), jac, 0.0)
        x_norm = np.sqrt(8.0 * np.exp(uu / 2.0) * ch_gap)
        z_norm = 2.0 * np.exp(uu / 2.0) * np.sqrt(c2_gap)
        yield ReducedChunk(
            r=float(r),
            r_weight=float(wr),
            u=uu,
            y=y,
            x_norm=x_norm,
            z_norm=z_norm,
            density=jac * wu[:, None] * wy,
        )


def integrate_reduced(
    alg: HTypeAlgebra,
    integrand: Callable[[ReducedChunk], np.ndarray],
    weight: WeightSpec = WeightSpec(),
    variant: Variant = Variant.FULL,
    r_min: float = 0.0,
    r_max: float = 20.0,
    rule: ReducedRule = DEFAULT_RULE,
) -> float:
    """Integral of delta^{1/2} w * integrand over the region, via reduced coordinates."""
    total = 0.0
    for chunk in reduced_chunks(alg, weight, variant, r_min, r_max, rule):
        total += chunk.r_weight * float(np.sum(np.asarray(integrand(chunk)) * chunk.density))
    return total


@lru_cache(maxsize=64)
def radial_density_table(
    alg: HTypeAlgebra,
    weight: WeightSpec = WeightSpec(),
    variant: Variant = Variant.FULL,
    r_max: float = 20.0,
    rule: ReducedRule = DEFAULT_RULE,
):
    """Radial nodes, radial weights and exact density values (read-only arrays)."""
    rows = [(c.r, c.r_weight, float(np.sum(c.density))) for c in reduced_chunks(alg, weight, variant, 0.0, r_max, rule)]
    table = np.array(rows).T if rows else np.zeros((3, 0))
    table.setflags(write=False)
    return table[0], table[1], table[2]


def exact_density(alg: HTypeAlgebra, weight: WeightSpec, variant: Variant, r: float, rule: ReducedRule = DEFAULT_RULE) -> float:
    """Exact radial density at a single radius."""
    for chunk in reduced_chunks(alg, weight, variant, max(r - 1e-9, 0.0), r + 1e-9, ReducedRule(1.0, 1, rule.u_panel, rule.u_order, rule.y_order)):
        return float(np.sum(chunk.density))
    return 0.0


def integrate_radial(
    alg: HTypeAlgebra,
    profile: RadialProfile,
    weight: WeightSpec = WeightSpec(),
    variant: Variant = Variant.FULL,
    r_max: float = 20.0,
) -> float:
    """Integral of delta^{1/2} F(|p|) w over the region, F given as a vectorised profile."""
    r, wr, dens = radial_density_table(alg, weight, variant, float(r_max))
    return float(np.sum(np.asarray(profile(r)) * dens * wr))


# ---------------------------------------------------- constant-free densities

def phi_density(weight: WeightSpec, alg: HTypeAlgebra, variant: Variant, r):
    """Constant-free radial density for the given weight and region."""
    r = np.asarray(r, dtype=float)
    b, c, s = weight.b, weight.c, weight.s
    low = alg.n + b + c + weight.gamma
    gt = weight.gamma_tilde
    sigma = weight.sigma
    flat = abs(sigma) <= 1e-12
    half_q = alg.Q / 2.0
    base = half_q + b / 4.0 + c / 2.0

    if variant is Variant.FULL:
        if flat:
            return bracket_power(r, low, 1.0 + gt) * np.exp(base * r)
        return bracket_power(r, low, gt) * np.exp((base + abs(sigma)) * r)
    if variant is Variant.MINUS:
        if flat:
            return bracket_power(r, low, 1.0 + gt) * np.exp((half_q - s) * r)
        if sigma < 0:
            return bracket_power(r, low, gt) * np.exp((half_q - s) * r)
        return bracket_power(r, low, 0.0) * np.exp(base * r)
    if variant is Variant.PLUS:
        if flat:
            return bracket_power(r, low, 1.0 + gt) * np.exp(base * r)
        if sigma > 0:
            return bracket_power(r, low, gt) * np.exp((half_q + b / 2.0 + c + s) * r)
        return bracket_power(r, low, 0.0) * np.exp(base * r)
    return bracket_power(r, low, 0.0) * np.exp(base * r)


# ----------------------------------------------------------- ratio tests

# the comparison densities change form at r = 1; each side has its own constant
REGIME_SPLIT = 1.0


def _spread(values: Sequence[float]) -> float:
    return max(values) / min(values) if values else 1.0


@dataclass
class RatioReport:
    """Exact over constant-free integrals, kept apart for r <= 1 (near) and r >= 1 (far)."""

    min_ratio: float
    max_ratio: float
    ratios: List[float]
    excluded: int = 0
    near: List[float] = field(default_factory=list)
    far: List[float] = field(default_factory=list)

    @property
    def band(self) -> float:
        """Worst max/min spread within one regime."""
        return max(_spread(self.near), _spread(self.far))


def indicator(lo: float, hi: float) -> RadialProfile:
    return lambda r: ((np.asarray(r) >= lo) & (np.asarray(r) <= hi)).astype(float)


def gaussian(width: float) -> RadialProfile:
    return lambda r: np.exp(-np.asarray(r) ** 2 / width)


def default_profiles() -> List[RadialProfile]:
    """Indicator windows and Gaussians used by the ratio-band checks."""
    return [indicator(0.0, 1.0), indicator(1.0, 2.0), indicator(3.0, 4.0), indicator(6.0, 7.0)] + [
        gaussian(w) for w in (0.25, 1.0, 4.0)
    ]


def _profile_cutoff(profile: RadialProfile, r_cap: float) -> float:
    grid = np.linspace(0.0, r_cap, 801)
    vals = np.abs(np.asarray(profile(grid), dtype=float))
    if not np.any(vals > 0):
        return 0.0
    peak = vals.max()
    significant = np.nonzero(vals > 1e-16 * peak)[0]
    return float(min(r_cap, grid[significant[-1]] + 1.0))


def _ratio(lhs: float, rhs: float) -> float:
    return lhs / rhs if rhs != 0.0 else math.inf


def _ratio_report(pieces: Sequence[Sequence[tuple[float, float]]]) -> RatioReport:
    """``pieces`` holds one (near, far) pair of (exact, comparison) integrals per profile."""
    near, far, excluded = [], [], 0
    for (near_lhs, near_rhs), (far_lhs, far_rhs) in pieces:
        empty = True
        if near_lhs != 0.0 or near_rhs != 0.0:
            near.append(_ratio(near_lhs, near_rhs))
            empty = False
        if far_lhs != 0.0 or far_rhs != 0.0:
            far.append(_ratio(far_lhs, far_rhs))
            empty = False
        excluded += empty
    ratios = near + far
    if not ratios:
        return RatioReport(1.0, 1.0, [], excluded)
    return RatioReport(min(ratios), max(ratios), ratios, excluded, near, far)


def _density_integral(profile: RadialProfile, density: Callable, lo: float, hi: float) -> float:
    # break at the indicator edges so indicator profiles are integrated exactly piecewise
    if hi <= lo:
        return 0.0
    breaks = panel_breaks(lo, hi, 0.25, extra=(1.0, 2.0, 3.0, 4.0, 6.0, 7.0))
    total = 0.0
    nodes, weights = gauss_legendre(12)
    for left, right in zip(breaks[:-1], breaks[1:]):
        x = left + 0.5 * (right - left) * (nodes + 1.0)
        total += float(np.sum(np.asarray(profile(x)) * density(x) * 0.5 * (right - left) * weights))
    return total


def _reduced_by_regime(alg, profile, integrand, weight, variant, r_max) -> tuple[float, float]:
    # panels aligned with integer radii keep indicator edges on panel boundaries
    near = far = 0.0
    edges = np.arange(0.0, math.ceil(r_max) + 1.0)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if not np.any(np.asarray(profile(np.linspace(lo, hi, 9))) != 0):
            continue
        value = integrate_reduced(alg, integrand, weight, variant, lo, hi)
        if hi <= REGIME_SPLIT:
            near += value
        else:
            far += value
    return near, far


def _compare(alg, profile, integrand, weight, variant, density, r_cap):
    cutoff = _profile_cutoff(profile, r_cap)
    if cutoff == 0.0:
        return (0.0, 0.0), (0.0, 0.0)
    near, far = _reduced_by_regime(alg, profile, integrand, weight, variant, cutoff)
    split = min(REGIME_SPLIT, cutoff)
    return (
        (near, _density_integral(profile, density, 0.0, split)),
        (far, _density_integral(profile, density, split, cutoff)),
    )


def radial_ratio_test(
    weight: WeightSpec,
    alg: HTypeAlgebra,
    variant: Variant = Variant.FULL,
    profiles: Optional[Sequence[RadialProfile]] = None,
    r_cap: float = 12.0,
) -> RatioReport:
    """Ratios of the exact weighted integral to the constant-free density integral."""
    profiles = default_profiles() if profiles is None else profiles
    density = lambda r: phi_density(weight, alg, variant, r)
    return _ratio_report([
        _compare(alg, profile, lambda ch, f=profile: f(np.array(ch.r)), weight, variant, density, r_cap)
        for profile in profiles
    ])


class MomentFormula(Enum):
    """Radial moment estimates with the exponent of the comparison density."""

    X_MOMENT_FULL = "x_moment_full"
    X_MOMENT_LOWER = "x_moment_lower"
    MODULAR_SLAB = "modular_slab"
    MODULAR_FULL = "modular_full"

    def exponent(self, alg: HTypeAlgebra) -> float:
        return {
            MomentFormula.X_MOMENT_FULL: (alg.Q + 2.0) / 2.0,
            MomentFormula.X_MOMENT_LOWER: alg.Q / 2.0 + 0.75,
            MomentFormula.MODULAR_SLAB: (alg.Q + 1.0) / 2.0,
            MomentFormula.MODULAR_FULL: (alg.Q + 2.0) / 2.0,
        }[self]

    def variant(self) -> Variant:
        return {
            MomentFormula.X_MOMENT_FULL: Variant.FULL,
            MomentFormula.X_MOMENT_LOWER: Variant.MINUS,
            MomentFormula.MODULAR_SLAB: Variant.ZERO,
            MomentFormula.MODULAR_FULL: Variant.FULL,
        }[self]

    def weight_factor(self, chunk: ReducedChunk) -> np.ndarray:
        a = chunk.a
        q = chunk.x_norm**2 / 4.0
        x = chunk.x_norm
        if self is MomentFormula.X_MOMENT_FULL:
            return a**-0.5 * ((1.0 + a + q) * x + x * chunk.z_norm)
        if self is MomentFormula.X_MOMENT_LOWER:
            return a**-0.5 * ((a + q) * x + x * chunk.z_norm)
        return np.abs(1.0 - 1.0 / a) * (1.0 + a + q)


def corollary_ratio_test(
    alg: HTypeAlgebra,
    formula: MomentFormula,
    profiles: Optional[Sequence[RadialProfile]] = None,
    r_cap: float = 12.0,
) -> RatioReport:
    """Exact moment integral of delta^{1/2} F against int F r^[n+1, 0] e^{kappa r} dr."""
    profiles = default_profiles() if profiles is None else profiles
    kappa = formula.exponent(alg)
    comparison = lambda r: bracket_power(r, alg.n + 1.0, 0.0) * np.exp(kappa * r)
    return _ratio_report([
        _compare(
            alg,
            profile,
            lambda ch, f=profile: f(np.array(ch.r)) * formula.weight_factor(ch),
            WeightSpec(),
            formula.variant(),
            comparison,
            r_cap,
        )
        for profile in profiles
    ])


def integrate_haar_qmc(
    alg: HTypeAlgebra,
    f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    box: HaarBox,
    log2_points: int = 12,
    seed: int = 0,
) -> float:
    """Scrambled Sobol estimate over the same cube as ``integrate_haar_full``, any dimension."""
    from scipy.stats import qmc

    dim = alg.dim_v + alg.dim_z + 1
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    unit = sampler.random_base2(m=log2_points)
    lower = np.array([-box.x_max] * alg.dim_v + [-box.z_max] * alg.dim_z + [box.u_min])
    upper = np.array([box.x_max] * alg.dim_v + [box.z_max] * alg.dim_z + [box.u_max])
    coords = qmc.scale(unit, lower, upper)
    volume = float(np.prod(upper - lower))
    x = coords[:, : alg.dim_v]
    z = coords[:, alg.dim_v : alg.dim_v + alg.dim_z]
    return volume * float(np.mean(np.asarray(f(x, z, np.exp(coords[:, -1])))))
