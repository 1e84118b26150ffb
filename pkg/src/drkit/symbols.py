"""
算子值符号
Operator-valued symbols M0, Mv, Mz as integral operators on L^2(R+, da/a),
written in the variable u = log a, with weighted norms, derivative envelopes
and a Rademacher R-bound estimator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, ValidationError
from .gelfand import f_symbols
from .htype_group import HTypeAlgebra

SYMBOL_NAMES = ("F0", "Fv", "Fz")
OPERATOR_NAMES = ("M0", "Mv", "Mz")


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid on [-U, U] in u = log a."""

    U: float = 15.0
    N: int = 301

    def __post_init__(self):
        if self.N < 2:
            raise ValidationError("a log grid needs at least two points", field="N")
        if not self.U > 0:
            raise ValidationError("grid half-width must be positive", field="U")

    @property
    def h(self) -> float:
        return 2.0 * self.U / (self.N - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.U, self.U, self.N)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.N, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def refined(self, factor: int = 2) -> "LogGrid":
        """Same window, spacing divided by ``factor``."""
        return LogGrid(self.U, (self.N - 1) * factor + 1)

    def widened(self, U: float) -> "LogGrid":
        """Window [-U, U] at (about) the same spacing."""
        return LogGrid(U, int(round(2.0 * U / self.h)) + 1)

    def refined(self, U: Optional[float] = None, N: Optional[int] = None) -> "LogGrid":
        return LogGrid(self.U if U is None else U, self.N if N is None else N)


@dataclass
class OperatorMatrix:
    """(T phi)_i = sum_j entries[i, j] phi_j; quadrature weights already folded in."""

    grid: LogGrid
    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.shape != (self.grid.N, self.grid.N):
            raise DimensionError("operator matrix does not match its grid", expected=(self.grid.N,) * 2, got=self.entries.shape)
        if not np.all(np.isfinite(self.entries)):
            raise ValidationError("operator matrix has non-finite entries", field="entries")

    @classmethod
    def identity(cls, grid: LogGrid) -> "OperatorMatrix":
        return cls(grid, np.eye(grid.N), "I")

    @classmethod
    def diagonal(cls, grid: LogGrid, values) -> "OperatorMatrix":
        return cls(grid, np.diag(np.broadcast_to(np.asarray(values, dtype=float), (grid.N,))), "diag")

    def __mul__(self, scalar: float) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, scalar * self.entries, self.label)

    __rmul__ = __mul__

    def apply(self, phi: np.ndarray) -> np.ndarray:
        return self.entries @ phi


# ------------------------------------------------------------------ weights

def _power_antiderivative(u, beta: float):
    u = np.asarray(u, dtype=float)
    return np.sign(u) * np.abs(u) ** (beta + 1.0) / (beta + 1.0)


def power_average(lo, hi, beta: float):
    """Mean of |u|^beta over [lo, hi] (beta > -1)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return (_power_antiderivative(hi, beta) - _power_antiderivative(lo, beta)) / (hi - lo)


@dataclass(frozen=True)
class A2Weight:
    """Weight w(e^u) on R+; ``power`` means w(e^u) = |u|^alpha, A2 exactly when |alpha| < 1."""

    kind: str = "flat"
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("flat", "power"):
            raise ValidationError(f"unknown weight kind {self.kind!r}", field="kind")
        if self.kind == "power" and not abs(self.alpha) < 1.0:
            raise ValidationError("power weights need |alpha| < 1", field="alpha")

    @classmethod
    def flat(cls) -> "A2Weight":
        return cls("flat", 0.0)

    @classmethod
    def power(cls, alpha: float) -> "A2Weight":
        return cls("power", float(alpha))

    @classmethod
    def parse(cls, text: str) -> "A2Weight":
        """'flat' or 'power(0.5)'."""
        text = text.strip()
        if text == "flat":
            return cls.flat()
        if text.startswith("power(") and text.endswith(")"):
            return cls.power(float(text[6:-1]))
        raise ValidationError(f"cannot parse weight {text!r}", field="weight")

    @property
    def label(self) -> str:
        return "flat" if self.kind == "flat" else f"power({self.alpha:g})"

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "flat":
            return np.ones_like(u)
        return np.abs(u) ** self.alpha

    def cell_values(self, grid: LogGrid) -> np.ndarray:
        """Averages over the cells [u_i - h/2, u_i + h/2]; finite where |u|^alpha is not."""
        if self.kind == "flat":
            return np.ones(grid.N)
        u = grid.nodes
        return power_average(u - grid.h / 2.0, u + grid.h / 2.0, self.alpha)

    def characteristic_estimate(self, levels: Sequence[int] = tuple(range(-3, 6))) -> float:
        """Largest <w>_I <w^{-1}>_I over I = [c - L, c + L], L = 2^j, c in {0, +-L/2, +-L, +-2L}.

        A lower estimate of the A2 characteristic.
        """
        if self.kind == "flat":
            return 1.0
        best = 1.0
        for j in levels:
            L = 2.0**j
            for c in (0.0, 0.5 * L, -0.5 * L, L, -L, 2.0 * L, -2.0 * L):
                lo, hi = c - L, c + L
                ratio = float(power_average(lo, hi, self.alpha) * power_average(lo, hi, -self.alpha))
                best = max(best, ratio)
        return best


# ------------------------------------------------------------------ operators

def _j_kernel(which: str, d: np.ndarray) -> np.ndarray:
    if which == "M0":
        mask = d >= 1.0
    else:
        mask = d <= -1.0
    safe = np.where(mask, d, 1.0)
    return np.where(mask, 1.0 / safe, 0.0)


def _mu_vector(alg: HTypeAlgebra, mu) -> np.ndarray:
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if mu.shape == (1,) and alg.dim_z > 1:
        mu = np.concatenate([mu, np.zeros(alg.dim_z - 1)])
    if mu.shape != (alg.dim_z,):
        raise DimensionError("mu must live in the centre", expected=alg.dim_z, got=mu.shape)
    return mu


def symbol_along_orbit(alg: HTypeAlgebra, which: str, lam: float, mu, grid: LogGrid) -> np.ndarray:
    """F(e^u lam, e^u mu) at the grid nodes."""
    scale = np.exp(grid.nodes)
    m = float(np.linalg.norm(_mu_vector(alg, mu)))
    return f_symbols(alg, which, scale * lam, scale * m)


def build_m_operator(alg: HTypeAlgebra, which: str, lam: float, mu, grid: LogGrid = LogGrid()) -> OperatorMatrix:
    """Discretise M0, Mv or Mz with trapezoid weights in u'."""
    if which not in OPERATOR_NAMES:
        raise ValidationError(f"unknown operator {which!r}", field="which")
    if not lam > 0:
        raise ValidationError("symbols need lambda > 0", field="lambda")
    u = grid.nodes
    diff = u[:, None] - u[None, :]
    kernel = _j_kernel(which, diff)
    symbol = symbol_along_orbit(alg, {"M0": "F0", "Mv": "Fv", "Mz": "Fz"}[which], lam, mu, grid)
    if which == "M0":
        values = (symbol[:, None] - symbol[None, :]) * kernel
    else:
        values = symbol[None, :] * kernel
    return OperatorMatrix(grid, values * grid.weights[None, :], f"{which}({lam:g},{np.linalg.norm(_mu_vector(alg, mu)):g})")


@dataclass
class NormResult:
    norm: float
    iterations: int
    converged: bool
    vector: np.ndarray = field(repr=False)


def op_norm(
    T: OperatorMatrix,
    w: A2Weight = A2Weight(),
    tol: float = 1e-8,
    max_iter: int = 10_000,
    seed: int = 0,
) -> NormResult:
    """Norm of T on L^2(w da/a), by power iteration on A^T A with A = W^{1/2} T W^{-1/2}.

    The returned vector is the top right singular vector of T in the weighted
    space, expressed in the plain grid coordinates.
    """
    d = np.sqrt(T.grid.weights * w.cell_values(T.grid))
    A = d[:, None] * T.entries / d[None, :]
    x = np.random.default_rng(seed).standard_normal(T.grid.N)
    x /= np.linalg.norm(x)
    value, previous = 0.0, None
    for it in range(1, max_iter + 1):
        y = A.T @ (A @ x)
        value = float(np.linalg.norm(y))
        if value == 0.0:
            return NormResult(0.0, it, True, x / d)
        x = y / value
        if previous is not None and abs(value - previous) <= tol * value:
            return NormResult(math.sqrt(value), it, True, x / d)
        previous = value
    return NormResult(math.sqrt(value), max_iter, False, x / d)


def cone_grid(kappa: float, lambdas: Optional[Sequence[float]] = None, ratios: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0)):
    """(lam, |mu|) pairs on the cone lam >= kappa |mu|."""
    lambdas = np.logspace(-2, 2, 9) if lambdas is None else lambdas
    return [(float(lam), float(r * lam / kappa)) for lam in lambdas for r in ratios]


@dataclass
class NormSweep:
    which: str
    weight: str
    points: List[Tuple[float, float]]
    norms: np.ndarray
    converged: bool

    @property
    def band(self) -> float:
        positive = self.norms[self.norms > 0]
        if positive.size == 0:
            return math.inf
        return float(positive.max() / positive.min())

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"which": self.which, "weight": self.weight, "lambda": lam, "mu": m, "norm": float(n)}
            for (lam, m), n in zip(self.points, self.norms)
        ]


def norm_sweep(
    alg: HTypeAlgebra,
    which: str,
    weight: A2Weight = A2Weight(),
    grid: LogGrid = LogGrid(),
    kappa: Optional[float] = None,
    lambdas: Optional[Sequence[float]] = None,
    ratios: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
) -> NormSweep:
    kappa = alg.dim_v / 4.0 if kappa is None else kappa
    points = cone_grid(kappa, lambdas, ratios)
    results = [op_norm(build_m_operator(alg, which, lam, m, grid), weight) for lam, m in points]
    return NormSweep(
        which,
        weight.label,
        points,
        np.array([r.norm for r in results]),
        all(r.converged for r in results),
    )


# ------------------------------------------------------------------ envelopes

def symbol_envelope(which: str, order: int, lam, m, c: float = 0.9):
    """Envelope for lam^{|alpha|} |d^alpha F| with |alpha| = order."""
    lam = np.asarray(lam, dtype=float)
    decay = np.exp(-2.0 * c * np.sqrt(lam + np.asarray(m, dtype=float)))
    log_factor = np.log(math.e + 1.0 / lam)
    if which == "Fv":
        return np.sqrt(lam) * log_factor * decay
    if which == "Fz":
        return lam * log_factor * decay
    if which == "F0":
        if order == 0:
            return decay
        if order == 1:
            return lam * log_factor * decay
        return lam * decay
    raise ValidationError(f"unknown symbol {which!r}", field="which")


_STENCILS = {
    0: (np.array([0]), np.array([1.0])),
    1: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2, -1, 1, 2]), np.array([-0.5, 1.0, -1.0, 0.5])),
}


def symbol_partial(alg: HTypeAlgebra, which: str, lam_order: int, mu_order: int, lams, ms, step: float = 0.02) -> np.ndarray:
    """d^lam_order/dlam d^mu_order/dmu_1 F at mu = (m, 0, ...), central differences with step ``step * lam``."""
    if lam_order + mu_order > 3:
        raise ValidationError("symbol derivatives are available up to total order 3", field="order")
    lams = np.asarray(lams, dtype=float)
    ms = np.asarray(ms, dtype=float)
    h = step * lams
    off_l, w_l = _STENCILS[lam_order]
    off_m, w_m = _STENCILS[mu_order]
    total = np.zeros_like(lams)
    for (i, wi), (j, wj) in itertools.product(zip(off_l, w_l), zip(off_m, w_m)):
        values = f_symbols(alg, which, lams + i * h, np.abs(ms + j * h))
        total += wi * wj * values
    return total / h ** (lam_order + mu_order)


@dataclass
class EnvelopeReport:
    which: str
    ratios: Dict[str, float]
    drift: Dict[str, float]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios.values())

    @property
    def max_drift(self) -> float:
        return max(self.drift.values()) if self.drift else 0.0


def symbol_derivative_sweep(
    alg: HTypeAlgebra,
    which: str,
    max_order: int = 2,
    kappa: Optional[float] = None,
    points: Optional[Sequence[Tuple[float, float]]] = None,
    c: float = 0.9,
    step: float = 0.02,
) -> EnvelopeReport:
    """max over the cone grid of lam^{|alpha|} |d^alpha F| / envelope, per "lam_order,mu_order".

    ``drift`` is the relative change of each ratio when the difference step is halved.
    """
    if which not in SYMBOL_NAMES:
        raise ValidationError(f"unknown symbol {which!r}", field="which")
    kappa = alg.dim_v / 4.0 if kappa is None else kappa
    if not 0.0 < kappa <= alg.dim_v / 2.0:
        raise ValidationError("cone aperture must lie in (0, dv/2]", field="kappa")
    if points is None:
        points = cone_grid(kappa, lambdas=np.logspace(-2, 1.5, 8))
    lams = np.array([p[0] for p in points])
    ms = np.array([p[1] for p in points])
    ratios: Dict[str, float] = {}
    drift: Dict[str, float] = {}
    for order in range(max_order + 1):
        env = symbol_envelope(which, order, lams, ms, c)
        for mu_order in range(order + 1):
            lam_order = order - mu_order
            key = f"{lam_order},{mu_order}"
            coarse = lams**order * np.abs(symbol_partial(alg, which, lam_order, mu_order, lams, ms, step))
            ratios[key] = float(np.max(coarse / env))
            if order > 0:
                fine = lams**order * np.abs(symbol_partial(alg, which, lam_order, mu_order, lams, ms, step / 2.0))
                r_fine = float(np.max(fine / env))
                drift[key] = abs(r_fine - ratios[key]) / max(r_fine, 1e-300)
    return EnvelopeReport(which, ratios, drift)


def holder_check(
    alg: HTypeAlgebra,
    which: str = "F0",
    epsilon: float = 0.5,
    pairs: int = 64,
    seed: int = 0,
    kappa: Optional[float] = None,
    spread: float = 0.05,
    max_order: int = 0,
) -> float:
    """max |G(p) - G(p')| / |p - p'|^epsilon over random nearby pairs in the cone, lam in [0.05, 5].

    G runs over F and, up to ``max_order`` (0 or 1), the scaled first partials lam dF/dlam and lam dF/dmu_1.
    """
    if which not in SYMBOL_NAMES:
        raise ValidationError(f"unknown symbol {which!r}", field="which")
    if max_order not in (0, 1):
        raise ValidationError("Hoelder checks are available for |alpha| <= 1", field="max_order")
    kappa = alg.dim_v / 4.0 if kappa is None else kappa
    rng = np.random.default_rng(seed)
    lam = np.exp(rng.uniform(math.log(0.05), math.log(5.0), pairs))
    m = rng.uniform(0.0, 1.0, pairs) * lam / kappa
    dl = rng.uniform(-spread, spread, pairs) * lam
    dm = rng.uniform(-spread, spread, pairs) * lam
    lam2 = lam + dl
    m2 = np.clip(m + dm, 0.0, lam2 / kappa)
    delta = np.hypot(lam2 - lam, m2 - m)
    keep = delta > 0
    lam, m, lam2, m2, delta = lam[keep], m[keep], lam2[keep], m2[keep], delta[keep]
    orders = [(0, 0)] + ([(1, 0), (0, 1)] if max_order == 1 else [])
    worst = 0.0
    for lam_order, mu_order in orders:
        if lam_order + mu_order == 0:
            g1, g2 = f_symbols(alg, which, lam, m), f_symbols(alg, which, lam2, m2)
        else:
            g1 = lam * symbol_partial(alg, which, lam_order, mu_order, lam, m)
            g2 = lam2 * symbol_partial(alg, which, lam_order, mu_order, lam2, m2)
        worst = max(worst, float(np.max(np.abs(g1 - g2) / delta**epsilon)))
    return worst


# ------------------------------------------------------------------ R-bounds

def _discrete_lp(values: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    return (np.abs(values) ** p @ weights) ** (1.0 / p)


def _sign_vectors(count: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    if count <= 10:
        return np.array(list(itertools.product((-1.0, 1.0), repeat=count)))
    return rng.choice((-1.0, 1.0), size=(trials, count))


def _rademacher_moment(g: np.ndarray, signs: np.ndarray, weights: np.ndarray, p: float) -> float:
    sums = signs @ g
    norms = _discrete_lp(sums, weights, p)
    return float(np.mean(norms**p) ** (1.0 / p))


@dataclass
class RBoundEstimate:
    estimate: float
    max_norm: float
    tuples: int


def r_bound_estimate(
    family: Sequence[OperatorMatrix],
    p: float = 2.0,
    trials: int = 64,
    seed: int = 0,
) -> RBoundEstimate:
    """Largest observed ratio (E||sum eps_k T_k f_k||_p^p)^{1/p} / (E||sum eps_k f_k||_p^p)^{1/p}.

    Test tuples are each operator's top singular vector placed alone, plus
    ``trials`` Gaussian tuples. Signs are enumerated exactly for families of at
    most ten operators and sampled otherwise.
    """
    if not family:
        raise ValidationError("empty operator family", field="family")
    if not p > 1.0:
        raise ValidationError("R-bounds need p > 1", field="p")
    grid = family[0].grid
    if any(T.grid != grid for T in family):
        raise ValidationError("operators must share a grid", field="family")
    weights = grid.weights
    K = len(family)
    best, max_norm, count = 0.0, 0.0, 0
    for k, T in enumerate(family):
        top = op_norm(T, seed=seed)
        max_norm = max(max_norm, top.norm)
        f = np.zeros((K, grid.N))
        f[k] = top.vector
        g = np.zeros_like(f)
        g[k] = T.apply(top.vector)
        signs = np.ones((1, K))
        best = max(best, _rademacher_moment(g, signs, weights, p) / _rademacher_moment(f, signs, weights, p))
        count += 1
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        f = rng.standard_normal((K, grid.N))
        g = np.stack([T.apply(f[k]) for k, T in enumerate(family)])
        signs = _sign_vectors(K, 256, rng)
        denom = _rademacher_moment(f, signs, weights, p)
        if denom > 0:
            best = max(best, _rademacher_moment(g, signs, weights, p) / denom)
            count += 1
    return RBoundEstimate(best, max_norm, count)
