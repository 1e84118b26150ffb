"""
Gelfand 变换与谱符号
Gelfand transform of radial functions on N and the Laplace-type symbols

    Xi_s(lam, mu) = A_s int_0^inf S(t|mu|)^{1+s} e^{-T(t|mu|)/t} e^{-t lam} t^{-s-1} dt,

with S(u) = u/sinh u and T(u) = u/tanh u, which are the Gelfand transforms of
Psi_s = H^{-(Q+s)/2} on the spectrum lam = (2l + dv/2)|mu|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .errors import ConvergenceError, DimensionError, DomainError, ValidationError
from .haar_integration import sphere_area
from .htype_group import HTypeAlgebra
from .quadrature import (
    DEFAULT_QUAD,
    QuadSpec,
    Substitution,
    composite_gauss_legendre,
    gauss_legendre_interval,
    integrate,
    panel_breaks,
)
from .specfun import bessel_k, gamma_fn, laguerre, laguerre_table, log_st_s, st_funcs

RadialProfile = Callable[[np.ndarray, np.ndarray], np.ndarray]

_LOG_T_STEP = 0.02
_LOG_T_LOW = math.log(1.0 / 80.0)


@dataclass(frozen=True)
class GelfandPoint:
    """Spectral coordinates (mu, l) of a character of the radial algebra."""

    mu: np.ndarray
    ell: int

    def __post_init__(self):
        object.__setattr__(self, "mu", np.atleast_1d(np.asarray(self.mu, dtype=float)))
        if self.ell < 0:
            raise ValidationError("Laguerre index must be nonnegative", field="ell")

    @property
    def mu_norm(self) -> float:
        return float(np.linalg.norm(self.mu))

    def spectral_lambda(self, alg: HTypeAlgebra) -> float:
        return (2.0 * self.ell + alg.dim_v / 2.0) * self.mu_norm


def _mu_norms(mus) -> np.ndarray:
    mus = np.asarray(mus, dtype=float)
    if mus.ndim >= 2:
        return np.linalg.norm(mus, axis=-1)
    return np.abs(mus)


def xi_prefactor(alg: HTypeAlgebra, s: float) -> float:
    """2^{dv} pi^{n/2} Gamma(dv/4 + s/2) / (Gamma((Q+s)/2) Gamma(dv/2 + s))."""
    if not s > -1.0:
        raise DomainError("Xi_s needs s > -1", argument="s", value=s)
    return (
        2.0**alg.dim_v
        * math.pi ** (alg.n / 2.0)
        * gamma_fn(alg.dim_v / 4.0 + s / 2.0)
        / (gamma_fn((alg.Q + s) / 2.0) * gamma_fn(alg.dim_v / 2.0 + s))
    )


def _log_integrand(t, s: float, lam, m):
    # log of S(t m)^{1+s} e^{-T(t m)/t} e^{-t lam} t^{-s-1}
    tm = t * m
    _, t_val = st_funcs(tm)
    return (1.0 + s) * log_st_s(tm) - t_val / t - t * lam - (s + 1.0) * np.log(t)


def _check_domain(s: float, lam, m, shift: float = 1.0) -> None:
    omega = np.asarray(lam) + (shift + s) * np.asarray(m)
    if np.any(omega <= 0):
        raise DomainError("the Laplace integral diverges for these (lambda, mu)", argument="lambda")


def xi_s_derivative(alg: HTypeAlgebra, s: float, k: int, lam: float, mu, spec: QuadSpec = DEFAULT_QUAD) -> float:
    """d^k/d lam^k Xi_s(lam, mu) by adaptive quadrature over t in (0, inf)."""
    m = float(np.linalg.norm(np.atleast_1d(np.asarray(mu, dtype=float))))
    _check_domain(s, lam, m)
    sign = (-1.0) ** k

    def f(t: float) -> float:
        if t <= 0.0:
            return 0.0
        return sign * t**k * math.exp(float(_log_integrand(t, s, lam, m)))

    value = integrate(f, (0.0, math.inf), spec.with_substitution(Substitution.EXP_HALFLINE))
    return xi_prefactor(alg, s) * value


def xi_s(alg: HTypeAlgebra, s: float, lam: float, mu, spec: QuadSpec = DEFAULT_QUAD) -> float:
    return xi_s_derivative(alg, s, 0, lam, mu, spec)


def _log_time_nodes(omega_min: float, k: int) -> np.ndarray:
    t_hi = (60.0 + 5.0 * k) / omega_min
    return np.arange(_LOG_T_LOW, math.log(t_hi) + 1.0, _LOG_T_STEP)


def xi_batch(alg: HTypeAlgebra, s: float, lams, mus, k: int = 0) -> np.ndarray:
    """Vectorised d^k/d lam^k Xi_s on a fixed trapezoid rule in log t."""
    lam = np.atleast_1d(np.asarray(lams, dtype=float))
    m = np.broadcast_to(np.atleast_1d(_mu_norms(mus)), lam.shape)
    _check_domain(s, lam, m)
    omega = lam + (1.0 + s) * m
    v = _log_time_nodes(float(omega.min()), k)
    t = np.exp(v)[None, :]
    log_f = _log_integrand(t, s, lam[:, None], m[:, None]) + (k + 1.0) * np.log(t)
    values = (-1.0) ** k * np.exp(log_f).sum(axis=1) * _LOG_T_STEP
    return xi_prefactor(alg, s) * values


def xi_tilde(alg: HTypeAlgebra, s: float, lam: float, mu, order: int = 32) -> float:
    """Xi_s - lam Xi_s^(2) - (dv/4) Xi_s^(1), with the v-averages by Gauss-Legendre."""
    m = float(np.linalg.norm(np.atleast_1d(np.asarray(mu, dtype=float))))
    _check_domain(s, lam, m, shift=-1.0)
    v_neg, w_neg = gauss_legendre_interval(-1.0, 0.0, order)
    v_pos, w_pos = gauss_legendre_interval(0.0, 1.0, order)
    v = np.concatenate([v_neg, v_pos])
    w = np.concatenate([w_neg, w_pos])
    shifted = lam + 2.0 * v * m
    first = xi_batch(alg, s, shifted, np.full_like(shifted, m), k=1)
    second = xi_batch(alg, s, shifted, np.full_like(shifted, m), k=2)
    xi1 = float(np.sum(w * first))
    xi2 = float(np.sum(w * (1.0 - np.abs(v)) * second))
    base = float(xi_batch(alg, s, [lam], [m])[0])
    return base - lam * xi2 - alg.dim_v / 4.0 * xi1


def xi_tilde_batch(alg: HTypeAlgebra, s: float, lams, mus) -> np.ndarray:
    """Vectorised Xi~_s with the v-averages carried out inside the t-integral.

    int_{-1}^{1} e^{-2vtm} dv = 2 / S(2tm) and int (1-|v|) e^{-2vtm} dv = S(tm)^{-2}.
    """
    lam = np.atleast_1d(np.asarray(lams, dtype=float))
    m = np.broadcast_to(np.atleast_1d(_mu_norms(mus)), lam.shape)
    _check_domain(s, lam, m, shift=-1.0)
    omega = lam + (s - 1.0) * m
    v = _log_time_nodes(float(omega.min()), 2)
    t = np.exp(v)[None, :]
    lam_c, m_c = lam[:, None], m[:, None]
    log_base = _log_integrand(t, s, lam_c, m_c) + np.log(t)
    base = np.exp(log_base)
    second = np.exp(log_base + 2.0 * np.log(t) - 2.0 * log_st_s(t * m_c))
    first = np.exp(log_base + np.log(2.0 * t) - log_st_s(2.0 * t * m_c))
    total = base - lam_c * second + alg.dim_v / 4.0 * first
    return xi_prefactor(alg, s) * total.sum(axis=1) * _LOG_T_STEP


def f_symbols(alg: HTypeAlgebra, which: str, lams, mus) -> np.ndarray:
    """F0 = Xi~_2, Fv = lam^{1/2} Xi_0, Fz = lam Xi_0 (vectorised)."""
    lam = np.atleast_1d(np.asarray(lams, dtype=float))
    if np.any(lam <= 0):
        raise DomainError("symbols need lambda > 0", argument="lambda")
    if which == "F0":
        return xi_tilde_batch(alg, 2.0, lam, mus)
    if which == "Fv":
        return np.sqrt(lam) * xi_batch(alg, 0.0, lam, mus)
    if which == "Fz":
        return lam * xi_batch(alg, 0.0, lam, mus)
    raise ValidationError(f"unknown symbol {which!r}", field="which")


# ------------------------------------------------------------ profiles on N

def psi_profile(alg: HTypeAlgebra, s: float, x_weight: str = "none") -> RadialProfile:
    """H^{-(Q+s)/2} as a function of (|x|, z), optionally times (1 + |x|^2/4) or |x|^2."""
    power = -(alg.Q + s) / 2.0

    def f(rho, z):
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        q = 1.0 + rho * rho / 4.0
        base = (q * q + z * z) ** power
        if x_weight == "one_plus_quarter":
            return q * base
        if x_weight == "square":
            return rho * rho * base
        return base

    return f


def _laguerre_weight(alg: HTypeAlgebra, gp: GelfandPoint, rho):
    m = gp.mu_norm
    arg = m * np.asarray(rho) ** 2
    return laguerre(gp.ell, alg.dim_v / 2.0 - 1.0, arg / 2.0) * np.exp(-arg / 4.0)


def _binom(ell: int, dv: int) -> float:
    return float(special.binom(ell + dv / 2.0 - 1.0, ell))


def _quad(f, lo, hi, **kwargs) -> float:
    result = sp_integrate.quad(f, lo, hi, limit=400, full_output=1, **kwargs)
    value, err = float(result[0]), float(result[1])
    if len(result) > 3:
        raise ConvergenceError(f"Gelfand quadrature failed: {result[3].splitlines()[0]}", estimate=value, error_bound=err)
    return value


def gelfand_radial(alg: HTypeAlgebra, f: RadialProfile, gp: GelfandPoint) -> complex:
    """Gelfand transform of a function radial in x (and in z when dz = 3)."""
    if alg.dim_z not in (1, 3):
        raise DimensionError("the reduced Gelfand path supports dz = 1 or dz = 3", expected=(1, 3), got=alg.dim_z)
    omega_v = sphere_area(alg.dim_v)
    m = gp.mu_norm

    def x_integral(z: float) -> float:
        g = lambda rho: float(f(rho, z)) * rho ** (alg.dim_v - 1) * float(_laguerre_weight(alg, gp, rho))
        return omega_v * _quad(g, 0.0, math.inf)

    if alg.dim_z == 1:
        even = lambda z: x_integral(z) + x_integral(-z)
        odd = lambda z: x_integral(z) - x_integral(-z)
        if m == 0.0:
            return complex(_quad(even, 0.0, math.inf), 0.0) / _binom(gp.ell, alg.dim_v)
        sign = math.copysign(1.0, float(gp.mu[0]))
        re = _quad(even, 0.0, math.inf, weight="cos", wvar=m)
        im = -sign * _quad(odd, 0.0, math.inf, weight="sin", wvar=m)
        return complex(re, im) / _binom(gp.ell, alg.dim_v)

    # dz = 3, f radial in z: int g(|z|) e^{-i mu.z} dz = (4 pi / |mu|) int g(r) r sin(|mu| r) dr
    if m == 0.0:
        value = 4.0 * math.pi * _quad(lambda r: x_integral(r) * r * r, 0.0, math.inf)
    else:
        value = 4.0 * math.pi / m * _quad(lambda r: x_integral(r) * r, 0.0, math.inf, weight="sin", wvar=m)
    return complex(value / _binom(gp.ell, alg.dim_v), 0.0)


def weight_recurrence(alg: HTypeAlgebra, s: float, ell: int, mu) -> Tuple[float, float]:
    """(|mu|/2) G(|x|^2 Psi_s)(l) and (2l+dv/2) G Psi(l) - l G Psi(l-1) - (l+dv/2) G Psi(l+1)."""
    m = float(np.linalg.norm(np.atleast_1d(mu)))
    psi = psi_profile(alg, s)
    g = lambda k: gelfand_radial(alg, psi, GelfandPoint(mu, k)).real
    lhs = 0.5 * m * gelfand_radial(alg, psi_profile(alg, s, "square"), GelfandPoint(mu, ell)).real
    lower = ell * g(ell - 1) if ell > 0 else 0.0
    rhs = (2 * ell + alg.dim_v / 2.0) * g(ell) - lower - (ell + alg.dim_v / 2.0) * g(ell + 1)
    return lhs, rhs


# ---------------------------------------------------------------- Plancherel

@dataclass
class PlancherelReport:
    lhs: float
    rhs: float
    rel_err: float
    tail: float
    inconclusive: bool


@dataclass(frozen=True)
class ProfileGrid:
    """Fixed quadrature grid for Schwartz-type profiles."""

    rho_max: float = 8.0
    z_max: float = 8.0
    panels: int = 32
    order: int = 12

    def rho_rule(self):
        return composite_gauss_legendre(panel_breaks(0.0, self.rho_max, self.rho_max / self.panels), self.order)

    def z_rule(self, symmetric: bool):
        lo = -self.z_max if symmetric else 0.0
        return composite_gauss_legendre(panel_breaks(lo, self.z_max, self.z_max / self.panels), self.order)


def l2_norm_squared(alg: HTypeAlgebra, f: RadialProfile, grid: ProfileGrid = ProfileGrid()) -> float:
    rho, w_rho = grid.rho_rule()
    symmetric = alg.dim_z == 1
    z, w_z = grid.z_rule(symmetric)
    values = np.asarray(f(rho[:, None], z[None, :]), dtype=float) ** 2
    radial_x = sphere_area(alg.dim_v) * rho ** (alg.dim_v - 1) * w_rho
    radial_z = w_z if symmetric else sphere_area(alg.dim_z) * z ** (alg.dim_z - 1) * w_z
    return float(radial_x @ values @ radial_z)


def gelfand_grid(alg: HTypeAlgebra, f: RadialProfile, mu_norm: float, ell_max: int, grid: ProfileGrid = ProfileGrid()) -> np.ndarray:
    """|G f(mu, l)| for l = 0..ell_max on a fixed grid (f even in z, or radial in z)."""
    rho, w_rho = grid.rho_rule()
    symmetric = alg.dim_z == 1
    z, w_z = grid.z_rule(symmetric)
    values = np.asarray(f(rho[:, None], z[None, :]), dtype=float)
    if symmetric:
        z_weights = w_z * np.cos(mu_norm * z)
    else:
        z_weights = sphere_area(alg.dim_z) * z * z * w_z * np.sinc(mu_norm * z / math.pi)
    z_part = values @ z_weights
    arg = mu_norm * rho * rho
    table = laguerre_table(ell_max, alg.dim_v / 2.0 - 1.0, arg / 2.0) * np.exp(-arg / 4.0)
    x_weights = sphere_area(alg.dim_v) * rho ** (alg.dim_v - 1) * w_rho * z_part
    ells = np.arange(ell_max + 1)
    binoms = special.binom(ells + alg.dim_v / 2.0 - 1.0, ells)
    return (table @ x_weights) / binoms


def plancherel_check(
    alg: HTypeAlgebra,
    f: RadialProfile,
    L_max: int = 30,
    mu_max: float = 12.0,
    mu_panels: int = 48,
    lambda_cut: float = 60.0,
    grid: ProfileGrid = ProfileGrid(),
    tolerance: float = 1e-3,
) -> PlancherelReport:
    """Compare ||f||_2^2 with (2 pi)^{-Q} int sum_l |G f|^2 binom |mu|^{dv/2} dmu.

    At each |mu| the l-sum runs to max(L_max, lambda_cut / (2|mu|)) so that the
    spectral range lam <= lambda_cut is covered; the reported tail is the
    share of the sum carried by the top tenth of the l range.
    """
    if alg.dim_z not in (1, 3):
        raise DimensionError("Plancherel check supports dz = 1 or dz = 3", expected=(1, 3), got=alg.dim_z)
    lhs = l2_norm_squared(alg, f, grid)
    mus, w_mu = composite_gauss_legendre(panel_breaks(0.0, mu_max, mu_max / mu_panels), 8)
    total, tail = 0.0, 0.0
    for m, w in zip(mus, w_mu):
        ell_max = int(min(20_000, max(L_max, math.ceil(lambda_cut / (2.0 * m)))))
        g = gelfand_grid(alg, f, float(m), ell_max, grid)
        ells = np.arange(ell_max + 1)
        terms = g * g * special.binom(ells + alg.dim_v / 2.0 - 1.0, ells)
        shell = 2.0 if alg.dim_z == 1 else 4.0 * math.pi * m * m
        weight = w * shell * m ** (alg.dim_v / 2.0)
        total += weight * float(terms.sum())
        tail += weight * float(terms[int(0.9 * ell_max) :].sum())
    rhs = (2.0 * math.pi) ** (-alg.Q) * total
    tail *= (2.0 * math.pi) ** (-alg.Q)
    if lhs == 0.0 and rhs == 0.0:
        return PlancherelReport(0.0, 0.0, 0.0, 0.0, False)
    rel_err = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return PlancherelReport(lhs, rhs, rel_err, tail, tail > tolerance * max(abs(lhs), 1e-300))


# ---------------------------------------------------------------- envelopes

def xi_mu_zero_oracle(alg: HTypeAlgebra, s: float, lam: float) -> float:
    """Xi_s(lam, 0) = A_s 2 lam^{s/2} K_s(2 sqrt(lam))."""
    return xi_prefactor(alg, s) * 2.0 * lam ** (s / 2.0) * bessel_k(s, 2.0 * math.sqrt(lam))


def xi_envelope(s: float, order: int, lam, m, c: float = 0.9):
    """Bessel-type bound shape for a derivative of total order ``order`` of Xi_s."""
    omega = np.asarray(lam) + (s + 1.0) * np.asarray(m)
    decay = np.exp(-2.0 * c * np.sqrt(omega))
    if abs(order - s) < 1e-12:
        return np.log(math.e + 1.0 / omega) * decay
    return omega ** (-max(order - s, 0.0)) * decay


def xi_partial(alg: HTypeAlgebra, s: float, lam_order: int, mu_order: int, lams, ms, step: float = 1e-3) -> np.ndarray:
    """d^lam_order/dlam d^mu_order/dmu_1 Xi_s along mu = (m, 0, ..., 0); mu-derivatives by central differences."""
    lams = np.asarray(lams, dtype=float)
    ms = np.asarray(ms, dtype=float)
    if mu_order == 0:
        return xi_batch(alg, s, lams, ms, k=lam_order)
    h = step * (1.0 + np.abs(ms))
    if mu_order == 1:
        plus = xi_batch(alg, s, lams, np.abs(ms + h), k=lam_order)
        minus = xi_batch(alg, s, lams, np.abs(ms - h), k=lam_order)
        return (plus - minus) / (2.0 * h)
    if mu_order == 2:
        plus = xi_batch(alg, s, lams, np.abs(ms + h), k=lam_order)
        mid = xi_batch(alg, s, lams, ms, k=lam_order)
        minus = xi_batch(alg, s, lams, np.abs(ms - h), k=lam_order)
        return (plus - 2.0 * mid + minus) / (h * h)
    raise ValidationError("mu derivatives are available up to order 2", field="mu_order")


def xi_envelope_sweep(
    alg: HTypeAlgebra,
    s: float,
    kappa: float,
    c: float = 0.9,
    lambdas: Optional[Sequence[float]] = None,
    ratios: Sequence[float] = (0.0, 0.25, 0.5, 1.0),
    max_order: int = 2,
) -> Dict[str, float]:
    """Largest ratio |d^alpha Xi_s| / envelope over (lam, mu) with lam + (s+1)|mu| >= kappa |mu|.

    Keys are "lam_order,mu_order".
    """
    lambdas = np.logspace(-2, 2, 9) if lambdas is None else np.asarray(lambdas, dtype=float)
    lam_grid, m_grid = [], []
    for lam in lambdas:
        for ratio in ratios:
            m = ratio * lam / max(kappa, 1e-12)
            if lam + (s + 1.0) * m >= kappa * m:
                lam_grid.append(lam)
                m_grid.append(m)
    lam_grid = np.array(lam_grid)
    m_grid = np.array(m_grid)
    out: Dict[str, float] = {}
    for total in range(max_order + 1):
        for mu_order in range(min(total, 2) + 1):
            lam_order = total - mu_order
            values = np.abs(xi_partial(alg, s, lam_order, mu_order, lam_grid, m_grid))
            env = xi_envelope(s, total, lam_grid, m_grid, c)
            out[f"{lam_order},{mu_order}"] = float(np.max(values / env))
    return out
