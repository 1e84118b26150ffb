"""
特殊函数
Special functions: Gamma, Laguerre polynomials, modified Bessel K and the
even analytic functions S(u) = u / sinh u, T(u) = u / tanh u with their jets.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import integrate, optimize, special

from .errors import ConvergenceError, DomainError
from .jet import Jet

# series switch for S and T near the origin
_ST_SERIES_RADIUS = 1e-4
# jets of S, T about points closer than this are re-expanded from the Maclaurin series
_ST_JET_SERIES_RADIUS = 0.5
_ST_MACLAURIN_TERMS = 48
_BESSEL_CUTOFF = math.log(1e-18)


def gamma_fn(x: float) -> float:
    """Gamma function for real x > 0."""
    if not x > 0:
        raise DomainError("gamma_fn is defined here for x > 0 only", argument="x", value=x)
    return float(special.gamma(x))


def laguerre(ell: int, a: float, t):
    """Generalised Laguerre polynomial L_ell^a(t) by the three-term recurrence."""
    if ell < 0:
        raise DomainError("Laguerre degree must be nonnegative", argument="ell", value=ell)
    return laguerre_table(ell, a, t)[ell]


def laguerre_table(ell_max: int, a: float, t) -> np.ndarray:
    """Rows L_0^a(t), ..., L_{ell_max}^a(t); ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    table = np.empty((ell_max + 1,) + t.shape)
    table[0] = 1.0
    if ell_max >= 1:
        table[1] = 1.0 + a - t
    for k in range(1, ell_max):
        table[k + 1] = ((2 * k + 1 + a - t) * table[k] - (k + a) * table[k - 1]) / (k + 1)
    return table


def _log_bessel_integrand(theta: float, nu: float, x: float) -> float:
    # log of exp(-x cosh(theta)) * cosh(nu theta), overflow-free
    nt = nu * theta
    return -x * math.cosh(theta) + nt + math.log1p(math.exp(-2.0 * nt)) - math.log(2.0)


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function K_nu(x) from its cosh integral representation.

    The integrand is normalised by its maximum and truncated where it falls
    below 1e-18 of that maximum.
    """
    if not x > 0:
        raise DomainError("bessel_k needs x > 0", argument="x", value=x)
    nu = abs(float(nu))

    theta_peak = 0.0
    if nu * nu > x:
        # stationary point of -x cosh(t) + log cosh(nu t)
        slope = lambda th: -x * math.sinh(th) + nu * math.tanh(nu * th)
        upper = math.asinh(nu / x) + 1.0
        theta_peak = optimize.brentq(slope, 1e-12, upper, xtol=1e-14)
    log_peak = _log_bessel_integrand(theta_peak, nu, x)

    drop = lambda th: _log_bessel_integrand(th, nu, x) - log_peak - _BESSEL_CUTOFF
    theta_hi = theta_peak + 1.0
    while drop(theta_hi) > 0:
        theta_hi = 2.0 * theta_hi + 1.0
    theta_cut = optimize.brentq(drop, theta_peak, theta_hi, xtol=1e-12)

    integrand = lambda th: math.exp(_log_bessel_integrand(th, nu, x) - log_peak)
    points = [theta_peak] if 0.0 < theta_peak < theta_cut else None
    value, abserr, info = integrate.quad(
        integrand, 0.0, theta_cut, points=points, epsabs=0.0, epsrel=1e-13, limit=200, full_output=1
    )[:3]
    if info["last"] >= 200 and abserr > 1e-10 * abs(value):
        raise ConvergenceError("bessel_k quadrature did not converge", estimate=value, error_bound=abserr)
    return value * math.exp(log_peak)


def st_funcs(u):
    """S(u) = u/sinh(u) and T(u) = u/tanh(u), stable for all real u (even in u)."""
    u = np.abs(np.asarray(u, dtype=float))
    small = u < _ST_SERIES_RADIUS
    safe = np.where(small, 1.0, u)
    e2 = np.exp(-2.0 * safe)
    s_val = np.where(small, 1.0 - u**2 / 6.0, 2.0 * safe * np.exp(-safe) / -np.expm1(-2.0 * safe))
    t_val = np.where(small, 1.0 + u**2 / 3.0, safe * (1.0 + e2) / -np.expm1(-2.0 * safe))
    if s_val.ndim == 0:
        return float(s_val), float(t_val)
    return s_val, t_val


@lru_cache(maxsize=None)
def st_maclaurin(terms: int = _ST_MACLAURIN_TERMS) -> Tuple[np.ndarray, np.ndarray]:
    """Maclaurin coefficients of S and T (odd coefficients vanish)."""
    bern = special.bernoulli(terms)
    s_coeffs = np.zeros(terms + 1)
    t_coeffs = np.zeros(terms + 1)
    for k in range(terms // 2 + 1):
        n = 2 * k
        scale = bern[n] / math.factorial(n)
        s_coeffs[n] = (2.0 - 2.0**n) * scale
        t_coeffs[n] = 2.0**n * scale
    return s_coeffs, t_coeffs


def _reexpand(coeffs: np.ndarray, u0: float, order: int) -> np.ndarray:
    # Taylor coefficients at u0 of the polynomial sum_j coeffs[j] u^j
    out = np.zeros(order + 1)
    degrees = np.arange(coeffs.shape[0])
    for k in range(order + 1):
        tail = degrees[k:]
        out[k] = np.sum(coeffs[k:] * special.comb(tail, k) * u0 ** (tail - k))
    return out


def st_jets(u0: float, order: int) -> Tuple[Jet, Jet]:
    """Taylor jets of S and T at ``u0``."""
    if abs(u0) < _ST_JET_SERIES_RADIUS:
        s_coeffs, t_coeffs = st_maclaurin()
        return Jet(_reexpand(s_coeffs, u0, order)), Jet(_reexpand(t_coeffs, u0, order))
    var = Jet.variable(u0, order)
    return var / var.sinh(), var * var.cosh() / var.sinh()


def fit_st_envelopes(k_max: int = 6, u_grid=None) -> dict:
    """Fit constants C_k with |S^(k)(u)| <= C_k (1+u) e^{-u} and |T^(k)(u)| <= C_k (1+u)^{1-k}."""
    if u_grid is None:
        u_grid = np.linspace(0.0, 30.0, 601)
    s_ratio = np.zeros(k_max + 1)
    t_ratio = np.zeros(k_max + 1)
    for u in u_grid:
        s_jet, t_jet = st_jets(float(u), k_max)
        s_der = s_jet.derivative_values()
        t_der = t_jet.derivative_values()
        s_env = (1.0 + u) * math.exp(-u)
        for k in range(k_max + 1):
            s_ratio[k] = max(s_ratio[k], abs(s_der[k]) / s_env)
            t_ratio[k] = max(t_ratio[k], abs(t_der[k]) / (1.0 + u) ** (1 - k))
    return {"S": s_ratio.tolist(), "T": t_ratio.tolist()}


def log_st_s(u):
    """log S(u) = log(u / sinh u) without overflow for large |u|."""
    u = np.abs(np.asarray(u, dtype=float))
    small = u < _ST_SERIES_RADIUS
    safe = np.where(small, 1.0, u)
    out = np.where(small, -u * u / 6.0, np.log(2.0 * safe) - safe - np.log1p(-np.exp(-2.0 * safe)))
    return float(out) if out.ndim == 0 else out
