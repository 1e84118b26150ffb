"""
Riesz 变换核
Kernels of Delta^{-1/2} and of the Riesz transforms X_j Delta^{-1/2}, their
adjoints, and the main terms that describe the adjoint kernels at infinity.

All kernels are built from

    phi0(X) = 1 / (sqrt(X^2 - 1) log(X + sqrt(X^2 - 1))),   X = cosh(r/2),

through the derivations Dt = -(1/2X) d/dX and Et = -d/dX.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy import special

from .dr_space import (
    SPoint,
    Variant,
    WeightSpec,
    cosh2_half,
    distance_s,
    grad_cosh2,
    inverse_s,
    modular_fn,
)
from .errors import DomainError, ValidationError
from .haar_integration import ReducedChunk, integrate_reduced
from .heat_kernel import radial_heat
from .htype_group import (
    HTypeAlgebra,
    NPoint,
    involution_n,
    left_invariant_derivative_n,
)
from .jet import Jet, jet_apply_derivation
from .quadrature import DEFAULT_QUAD, QuadSpec, Substitution, gauss_legendre_interval, integrate, panel_breaks
from .specfun import gamma_fn

_PHI_TAIL = 40.0


def phi0(X: float, order: int) -> Jet:
    """Jet of phi0 at X > 1."""
    if not X > 1.0:
        raise DomainError("phi0 is defined for X > 1", argument="X", value=X)
    var = Jet.variable(X, order)
    root = (var * var - 1.0).sqrt()
    return 1.0 / (root * (var + root).log())


def _phi0_batch(X: np.ndarray, order: int) -> Jet:
    var = Jet.variable(X, order)
    root = (var * var - 1.0).sqrt()
    return 1.0 / (root * (var + root).log())


def _apply_chain(f: Jet, var: Jet, e_count: int, d_count: int) -> Jet:
    for _ in range(e_count):
        f = -f.derivative()
    for _ in range(d_count):
        f = jet_apply_derivation(f, var * 2.0)
    return f


def derivation_of_phi0(X: float, d_count: int, e_count: int, order: int = 0) -> Jet:
    """Jet of Dt^d_count Et^e_count phi0 at X."""
    f = phi0(X, order + d_count + e_count)
    return _apply_chain(f, Jet.variable(X, order + d_count + e_count), e_count, d_count)


def invsqrt_constant(dv: int, dz: int) -> float:
    """2^{-dv-dz-1} pi^{-(dv+dz+3)/2}."""
    return 2.0 ** (-dv - dz - 1) * math.pi ** (-(dv + dz + 3) / 2.0)


def main_term_constant(dv: int, dz: int) -> float:
    """Constant in front of the main terms of the adjoint Riesz kernels."""
    return (
        2.0 ** (1.0 - dv / 2.0)
        * math.pi ** (-(dv + dz + 3) / 2.0)
        * gamma_fn(dv / 4.0 + 0.5)
        * gamma_fn(dv / 4.0 + dz / 2.0 + 1.0)
    )


@lru_cache(maxsize=None)
def _v_rule(homogeneity: float) -> Tuple[np.ndarray, np.ndarray]:
    v_max = _PHI_TAIL / homogeneity + 2.0
    breaks = panel_breaks(0.0, v_max, 0.5)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        x, w = gauss_legendre_interval(lo, hi, 10)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class PhiEvaluator:
    """X -> Phi_{dv,dz}(X) on (1, inf)."""

    dv: int
    dz: int

    def __post_init__(self):
        if self.dv < 2 or self.dv % 2 or self.dz < 1:
            raise ValidationError("Phi needs even dv >= 2 and dz >= 1", field="dims")

    @property
    def homogeneity(self) -> float:
        return self.dv / 2.0 + self.dz

    @property
    def constant(self) -> float:
        return invsqrt_constant(self.dv, self.dz)

    @property
    def asymptotic_constant(self) -> float:
        """Limit of Phi(X) X^{dv/2+dz} log X."""
        return gamma_fn(self.dv / 4.0 + 0.5) * gamma_fn(self.dv / 4.0 + self.dz / 2.0)

    def eval_jet(self, X: float, order: int = 0) -> Jet:
        if not X > 1.0:
            raise DomainError("Phi is defined for X > 1", argument="X", value=X)
        e_count = self.dv // 2 - 1
        scale = 2.0 ** (1.0 - self.dv / 2.0)
        if self.dz % 2 == 0:
            f = derivation_of_phi0(X, self.dz // 2, e_count, order)
            return f * (scale * math.sqrt(math.pi))
        # X cosh v substitution of the half-derivative integral
        v, wv = _v_rule(self.homogeneity)
        c = np.cosh(v)
        d_count = (self.dz + 1) // 2
        total = order + d_count + e_count
        y = X * c
        inner = _apply_chain(_phi0_batch(y, total), Jet.variable(y, total), e_count, d_count)
        k = np.arange(order + 1)[:, None]
        composed = Jet(inner.coeffs * c[None, :] ** k)
        outer = Jet.variable(np.full_like(c, X), order) * (2.0 * c)
        summed = (composed * outer).coeffs @ wv
        return Jet(summed * scale)

    def __call__(self, X: float) -> float:
        return float(self.eval_jet(X).value)

    def eval_scaled(self, X: float) -> Tuple[float, float]:
        """(mantissa, exponent) with Phi(X) = mantissa * exp(exponent)."""
        log_x = math.log(X)
        exponent = -self.homogeneity * log_x - math.log(log_x)
        return self(X) * math.exp(-exponent), exponent

    def tabulate(self, xs: Sequence[float]) -> np.ndarray:
        return np.array([self(float(x)) for x in xs])

    def shifted(self) -> "PhiEvaluator":
        """Phi_{dv,dz+2}."""
        return PhiEvaluator(self.dv, self.dz + 2)


def phi_big(dv: int, dz: int, X: float) -> float:
    return PhiEvaluator(dv, dz)(X)


def _radius_and_x(alg: HTypeAlgebra, p: SPoint) -> Tuple[float, float]:
    r = distance_s(alg, p)
    if r < 1e-10:
        raise DomainError("kernel is singular at the identity", argument="p")
    return r, math.cosh(r / 2.0)


def kernel_invsqrt(alg: HTypeAlgebra, p: SPoint) -> float:
    """Convolution kernel of Delta^{-1/2} at p."""
    _, X = _radius_and_x(alg, p)
    phi = PhiEvaluator(alg.dim_v, alg.dim_z)
    return p.a ** (-alg.Q / 2.0) * phi.constant * phi(X)


def invsqrt_by_subordination(alg: HTypeAlgebra, r: float, spec: QuadSpec = DEFAULT_QUAD) -> float:
    """pi^{-1/2} int_0^inf t^{-1/2} delta^{-1/2} h_t(r) dt."""
    if not r > 0:
        raise DomainError("subordination needs r > 0", argument="r", value=r)
    integrand = lambda t: t**-0.5 * radial_heat(alg, t, r)
    value = integrate(integrand, (0.0, math.inf), spec.with_substitution(Substitution.EXP_HALFLINE))
    return value / math.sqrt(math.pi)


def riesz_kernel(alg: HTypeAlgebra, j: int, p: SPoint) -> float:
    """Kernel of R_j = X_j Delta^{-1/2}; for j = 0 the skew part R_0 - R_0*."""
    if not 0 <= j <= alg.n:
        raise ValidationError("Riesz index out of range", field="j")
    _, X = _radius_and_x(alg, p)
    phi = PhiEvaluator(alg.dim_v, alg.dim_z)
    shifted = phi.shifted()(X)
    root_delta = p.a ** (-alg.Q / 2.0)
    if j == 0:
        q = float(p.x @ p.x) / 4.0
        return -0.5 * phi.constant * root_delta * (1.0 - 1.0 / p.a) * (1.0 + p.a + q) * shifted
    return -phi.constant * root_delta * shifted * float(grad_cosh2(alg, p)[j])


def kernel_r0(alg: HTypeAlgebra, p: SPoint) -> float:
    """Full kernel of R_0 = X_0 Delta^{-1/2}."""
    _, X = _radius_and_x(alg, p)
    phi = PhiEvaluator(alg.dim_v, alg.dim_z)
    root_delta = p.a ** (-alg.Q / 2.0)
    q = float(p.x @ p.x) / 4.0
    gap = 1.0 + p.a + q - 2.0 * cosh2_half(alg, p)
    return -phi.constant * root_delta * (0.5 * alg.Q * phi(X) + 0.5 * gap * phi.shifted()(X))


def adjoint_riesz_kernel(alg: HTypeAlgebra, j: int, p: SPoint) -> float:
    """Kernel of R_j*: delta(p) k_{R_j}(p^{-1}) (the full R_0 kernel for j = 0)."""
    inv = inverse_s(alg, p)
    k = kernel_r0(alg, inv) if j == 0 else riesz_kernel(alg, j, inv)
    return modular_fn(alg, p) * k


# ------------------------------------------------------------ main terms

def h_norm(x, z) -> float:
    """H(x, z) = (1 + |x|^2/4)^2 + |z|^2."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    return float((1.0 + x @ x / 4.0) ** 2 + z @ z)


@dataclass(frozen=True)
class MainTerms:
    """The functions r_0, ..., r_n and H on N and the kernels built from them on S."""

    alg: HTypeAlgebra
    r_funcs: Tuple[Callable[[NPoint], float], ...] = field(repr=False)

    def H(self, p: NPoint) -> float:
        return h_norm(p.x, p.z)

    def r(self, j: int, p: NPoint) -> float:
        return self.r_funcs[j](p)

    def dilated_r0(self, lam: float, p: NPoint) -> float:
        """(r_0)_(lam)(x, z) = lam^{-Q} r_0(lam^{-1/2} x, lam^{-1} z)."""
        return lam ** (-self.alg.Q) * self.r(0, NPoint(p.x / math.sqrt(lam), p.z / lam))

    def k_tilde0(self, p: SPoint) -> float:
        u = p.u
        return self.r(0, NPoint(p.x, p.z)) / u if abs(u) >= 1.0 else 0.0

    def k0(self, p: SPoint) -> float:
        u = p.u
        if u < 1.0:
            return 0.0
        base = NPoint(p.x, p.z)
        return (self.dilated_r0(p.a, base) - self.r(0, base)) / u

    def k(self, j: int, p: SPoint) -> float:
        if not 1 <= j <= self.alg.n:
            raise ValidationError("main-term index out of range", field="j")
        u = p.u
        return self.r(j, NPoint(p.x, p.z)) / u if u <= -1.0 else 0.0

    def skew_main(self, p: SPoint) -> float:
        """-C~ (K~_0 + K_0), the main term of R_0 - R_0*."""
        return -main_term_constant(self.alg.dim_v, self.alg.dim_z) * (self.k_tilde0(p) + self.k0(p))

    def adjoint_main(self, j: int, p: SPoint) -> float:
        """-C~ K_j, the main term of R_j*."""
        return -main_term_constant(self.alg.dim_v, self.alg.dim_z) * self.k(j, p)


def main_terms(alg: HTypeAlgebra) -> MainTerms:
    power = (alg.Q + 2.0) / 2.0

    def r0(p: NPoint) -> float:
        return (1.0 + p.x @ p.x / 4.0) / h_norm(p.x, p.z) ** power

    def rv(j: int) -> Callable[[NPoint], float]:
        def f(p: NPoint) -> float:
            twist = np.einsum("i,ik,k->", p.x, alg.bracket[:, j - 1, :], p.z)
            return 0.5 * ((1.0 + p.x @ p.x / 4.0) * p.x[j - 1] - twist) / h_norm(p.x, p.z) ** power
        return f

    def rz(k: int) -> Callable[[NPoint], float]:
        return lambda p: p.z[k] / h_norm(p.x, p.z) ** power

    funcs: List[Callable[[NPoint], float]] = [r0]
    funcs += [rv(j) for j in range(1, alg.dim_v + 1)]
    funcs += [rz(k) for k in range(alg.dim_z)]
    return MainTerms(alg, tuple(funcs))


@dataclass
class RjIdentityReport:
    max_rel_err: float
    samples: int
    per_direction: Dict[int, float]


def verify_rj_identity(alg: HTypeAlgebra, samples: int = 100, seed: int = 0) -> RjIdentityReport:
    """Closed-form r_j against Q^{-1} (X_j H^{-Q/2})* at random points of N.

    Errors are relative to max(|r_j|, r_0).
    """
    if samples < 1:
        raise ValidationError("samples must be at least 1", field="samples")
    terms = main_terms(alg)
    rng = np.random.default_rng(seed)
    potential = lambda q: h_norm(q.x, q.z) ** (-alg.Q / 2.0)
    per_direction = {j: 0.0 for j in range(1, alg.n + 1)}
    for _ in range(samples):
        p = NPoint(rng.standard_normal(alg.dim_v), rng.standard_normal(alg.dim_z))
        scale = terms.r(0, p)
        for j in per_direction:
            derived = involution_n(lambda q: left_invariant_derivative_n(alg, j, potential, q))(p) / alg.Q
            exact = terms.r(j, p)
            err = abs(derived - exact) / max(abs(exact), scale)
            per_direction[j] = max(per_direction[j], err)
    return RjIdentityReport(max(per_direction.values()), samples, per_direction)


def leading_coeff_check(u: int, v: int, X: float) -> float:
    """[2^{-v} sqrt(pi) Dt^u Et^v phi0](X) X^{v+2u+1} log X / (Gamma(v/2+1) Gamma(v/2+u+1/2))."""
    if not X > 2.0:
        raise DomainError("leading coefficient check needs X > 2", argument="X", value=X)
    value = float(derivation_of_phi0(X, u, v).value)
    scaled = 2.0 ** (-v) * math.sqrt(math.pi) * value * X ** (v + 2 * u + 1) * math.log(X)
    return scaled / (gamma_fn(v / 2.0 + 1.0) * gamma_fn(v / 2.0 + u + 0.5))


def main_term_ratio(alg: HTypeAlgebra, j: int, p: SPoint) -> float:
    """Exact kernel over its main term: R_j* for j >= 1, R_0 - R_0* for j = 0."""
    terms = main_terms(alg)
    if j == 0:
        return riesz_kernel(alg, 0, p) / terms.skew_main(p)
    return adjoint_riesz_kernel(alg, j, p) / terms.adjoint_main(j, p)


def binomial_constant(dv: int, dz: int, terms: int = 100_000) -> Tuple[float, float]:
    """(sum_k binom(k-1/2, k) / (2k + dv/2 + dz), closed form).

    The series is summed to ``terms`` and the tail taken from its
    asymptotic expansion in Hurwitz zeta values.
    """
    c = dv / 2.0 + dz
    k = np.arange(terms, dtype=float)
    log_binom = special.gammaln(k + 0.5) - special.gammaln(k + 1.0) - 0.5 * math.log(math.pi)
    partial = float(np.sum(np.exp(log_binom) / (2.0 * k + c)))
    alpha = 0.125 + c / 2.0
    beta = 1.0 / 128.0 + c / 16.0 + c * c / 4.0
    tail = (
        special.zeta(1.5, terms) - alpha * special.zeta(2.5, terms) + beta * special.zeta(3.5, terms)
    ) / (2.0 * math.sqrt(math.pi))
    closed = math.sqrt(math.pi) * gamma_fn(dv / 4.0 + dz / 2.0) / (2.0 * gamma_fn(dv / 4.0 + (dz + 1) / 2.0))
    return partial + float(tail), closed


# ------------------------------------------------------- integrability scan

@dataclass
class IntegrabilityScan:
    radii: List[float]
    main: List[float]
    remainder: List[float]

    def main_increments(self) -> List[float]:
        return [b - a for a, b in zip(self.main[:-1], self.main[1:])]

    def remainder_increments(self) -> List[float]:
        return [b - a for a, b in zip(self.remainder[:-1], self.remainder[1:])]


def _sphere_abs_mean(d: int) -> float:
    # mean of |omega_1| over the unit sphere of R^d
    if d == 1:
        return 1.0
    return gamma_fn(d / 2.0) / (math.sqrt(math.pi) * gamma_fn((d + 1) / 2.0))


def integrability_scan(alg: HTypeAlgebra, radii: Sequence[float] = (4.0, 8.0, 16.0, 32.0), k: int = 1) -> IntegrabilityScan:
    """Truncated integrals over 1 <= |p| <= R of |K_{dv+k}| (on a <= 1/e) and of |R_{dv+k}* + C~ K_{dv+k}|."""
    if not 1 <= k <= alg.dim_z:
        raise ValidationError("central direction out of range", field="k")
    phi2 = PhiEvaluator(alg.dim_v, alg.dim_z).shifted()
    const = invsqrt_constant(alg.dim_v, alg.dim_z)
    c_main = main_term_constant(alg.dim_v, alg.dim_z)
    power = (alg.Q + 2.0) / 2.0
    mean_abs = _sphere_abs_mean(alg.dim_z)

    def main_part(chunk: ReducedChunk) -> np.ndarray:
        q = chunk.x_norm**2 / 4.0
        h = (1.0 + q) ** 2 + chunk.z_norm**2
        return np.where(chunk.u <= -1.0, h ** (-power) / np.where(chunk.u < 0, -chunk.u, 1.0), 0.0)

    def main_integrand(chunk: ReducedChunk) -> np.ndarray:
        return chunk.a ** (alg.Q / 2.0) * mean_abs * chunk.z_norm * main_part(chunk)

    def remainder_integrand(chunk: ReducedChunk) -> np.ndarray:
        # R_{dv+k}* = C a^{-Q/2-1} Phi_{dv,dz+2}(cosh(r/2)) z_k / 2; main term -C~ K = C~ z_k h^{-power}/|u|
        exact = const * chunk.a ** (-alg.Q / 2.0 - 1.0) * phi2(math.cosh(chunk.r / 2.0)) / 2.0
        diff = np.abs(exact - c_main * main_part(chunk))
        return chunk.a ** (alg.Q / 2.0) * mean_abs * chunk.z_norm * diff

    radii = sorted(float(r) for r in radii)
    main, remainder = [], []
    lo, acc_main, acc_rem = 1.0, 0.0, 0.0
    for radius in radii:
        acc_main += integrate_reduced(alg, main_integrand, WeightSpec(), Variant.MINUS, lo, radius)
        acc_rem += integrate_reduced(alg, remainder_integrand, WeightSpec(), Variant.FULL, lo, radius)
        main.append(acc_main)
        remainder.append(acc_rem)
        lo = radius
    return IntegrabilityScan(list(radii), main, remainder)
