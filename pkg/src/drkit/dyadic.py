"""
二进分解
Dyadic partition of unity, the modulated bumps E_{k,m} and torus Fourier
coefficients of localised multiplier symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import ValidationError

SymbolFn = Callable[[np.ndarray], np.ndarray]


def _smooth_step(x):
    # C-infinity step: 0 for x <= 0, 1 for x >= 1
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    inner = (x > 0) & (x < 1)
    safe = np.where(inner, x, 0.5)
    a = np.exp(-1.0 / safe)
    b = np.exp(-1.0 / (1.0 - safe))
    return np.where(inner, a / (a + b), (x >= 1).astype(float))


def smooth_cutoff(t, inner: float, outer: float):
    """1 for t <= inner, 0 for t >= outer, smooth and monotone in between."""
    if not outer > inner:
        raise ValidationError("cutoff needs outer > inner", field="outer")
    return 1.0 - _smooth_step((np.asarray(t, dtype=float) - inner) / (outer - inner))


def _radius(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return np.abs(xi) if xi.ndim <= 1 else np.linalg.norm(xi, axis=-1)


def eta(xi):
    """Partition function supported in 1/2 <= |xi| <= 2; sum_m eta(2^m xi) = 1 for xi != 0."""
    r = _radius(xi)
    return smooth_cutoff(r, 1.0, 2.0) - smooth_cutoff(2.0 * r, 1.0, 2.0)


def chi(xi):
    """Bump equal to 1 on 1/2 <= |xi| <= 2 and supported in 1/4 <= |xi| <= 3."""
    r = _radius(xi)
    return smooth_cutoff(r, 2.0, 3.0) - smooth_cutoff(r, 0.25, 0.5)


def partition_sum(xi, m_max: int = 40):
    return sum(eta(2.0**m * np.asarray(xi, dtype=float)) for m in range(-m_max, m_max + 1))


def e_km(k, m: int, xi):
    """E_{k,m}(xi) = chi(2^m xi) e^{i k . 2^m xi}; ``xi`` has shape (..., d) or (...,) when d = 1."""
    scaled = 2.0**m * np.asarray(xi, dtype=float)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    phase = scaled * k[0] if scaled.ndim <= 1 and k.size == 1 else scaled @ k
    return chi(scaled) * np.exp(1j * phase)


def dyadic_tools(m: int, k, xi) -> Tuple[np.ndarray, np.ndarray]:
    """(eta(2^m xi), E_{k,m}(xi))."""
    return eta(2.0**m * np.asarray(xi, dtype=float)), e_km(k, m, xi)


@dataclass
class FourierCoefficients:
    """Coefficients c_k of eta(xi) M(2^{-m} xi) on the torus [-pi, pi]^d."""

    m: int
    modes: np.ndarray      # (K, d) integer frequencies
    values: np.ndarray     # (K, ...) coefficients

    def shell_maxima(self) -> np.ndarray:
        """max |c_k| over each shell |k|_inf = s."""
        shells = np.abs(self.modes).max(axis=1)
        mags = np.abs(self.values).reshape(len(self.modes), -1).max(axis=1)
        out = np.zeros(int(shells.max()) + 1)
        np.maximum.at(out, shells, mags)
        return out

    def reconstruct(self, xi) -> np.ndarray:
        """sum_k c_k E_{k,m}(xi), which equals eta(2^m xi) M(xi)."""
        xi = np.asarray(xi, dtype=float)
        points = xi[..., None] if xi.ndim <= 1 and self.modes.shape[1] == 1 else xi
        scaled = 2.0**self.m * points
        phases = np.exp(1j * scaled @ self.modes.T)
        series = np.tensordot(phases, self.values, axes=(-1, 0))
        bump = chi(scaled if self.modes.shape[1] > 1 else scaled[..., 0])
        return bump.reshape(bump.shape + (1,) * (series.ndim - bump.ndim)) * series


def fourier_coefficients(symbol: SymbolFn, m: int, n: int = 64, dim: int = 1) -> FourierCoefficients:
    """FFT coefficients of eta(xi) M(2^{-m} xi) sampled on n^dim torus points.

    ``symbol`` maps points of shape (..., dim), or (...) when dim = 1, to values
    of shape (...) or (..., extra).
    """
    if n < 4 or n % 2:
        raise ValidationError("use an even number of torus samples, at least 4", field="n")
    axis = -np.pi + 2.0 * np.pi * np.arange(n) / n
    mesh = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1)
    points = mesh if dim > 1 else mesh[..., 0]
    samples = np.asarray(symbol(2.0 ** (-m) * points), dtype=complex)
    local = eta(points)
    values = samples * local.reshape(local.shape + (1,) * (samples.ndim - local.ndim))
    coeffs = np.fft.fftn(values, axes=tuple(range(dim))) / n**dim
    freqs = np.rint(np.fft.fftfreq(n) * n).astype(int)
    grids = np.meshgrid(*([freqs] * dim), indexing="ij")
    modes = np.stack([g.ravel() for g in grids], axis=1)
    # sampling starts at -pi: shift by (-1)^{k_1 + ... + k_d}
    sign = np.where(modes.sum(axis=1) % 2 == 0, 1.0, -1.0)
    flat = coeffs.reshape((n**dim,) + coeffs.shape[dim:])
    return FourierCoefficients(m, modes, flat * sign.reshape((-1,) + (1,) * (flat.ndim - 1)))
