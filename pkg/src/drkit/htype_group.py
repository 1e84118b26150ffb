"""
H 型 Lie 代数与群
H-type Lie algebras and groups: bracket tensors, J-maps, the group law on N,
dilations and numerically applied left-invariant vector fields.

Conventions: ``bracket[i, j, k]`` is the coefficient of the k-th central basis
vector in [e_i, e_j] (0-based internally, 1-based in JSON files), and
``<J_mu x, y> = mu . [x, y]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, FileIOError, ValidationError

_ANTISYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HTypeAlgebra:
    """Bracket data of a 2-step nilpotent algebra v + z."""

    dim_v: int
    dim_z: int
    bracket: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        bracket = np.asarray(self.bracket, dtype=float)
        expected = (self.dim_v, self.dim_v, self.dim_z)
        if bracket.shape != expected:
            raise DimensionError("bracket tensor has the wrong shape", expected=expected, got=bracket.shape)
        skew = np.max(np.abs(bracket + bracket.transpose(1, 0, 2))) if bracket.size else 0.0
        if skew > _ANTISYMMETRY_TOL:
            raise ValidationError(f"bracket is not antisymmetric (defect {skew:.3g})", field="bracket")
        bracket.setflags(write=False)
        object.__setattr__(self, "bracket", bracket)

    @property
    def Q(self) -> float:
        """Homogeneous dimension (dv + 2 dz) / 2."""
        return (self.dim_v + 2 * self.dim_z) / 2.0

    @property
    def n(self) -> int:
        return self.dim_v + self.dim_z

    @property
    def key(self) -> tuple:
        """Hashable identity used by caches."""
        return (self.dim_v, self.dim_z, self.bracket.tobytes())

    def __hash__(self) -> int:
        return hash(self.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, HTypeAlgebra) and self.key == other.key

    def bracket_of(self, x, y) -> np.ndarray:
        """[x, y] for (batches of) vectors in v."""
        return np.einsum("...i,...j,ijk->...k", np.asarray(x, float), np.asarray(y, float), self.bracket)

    def j_matrix(self, mu) -> np.ndarray:
        """Matrix of J_mu on v: (J_mu)[j, i] = sum_k mu_k b[i, j, k]."""
        mu = np.asarray(mu, dtype=float)
        if mu.shape != (self.dim_z,):
            raise DimensionError("mu has the wrong length", expected=self.dim_z, got=mu.shape)
        return np.einsum("k,ijk->ji", mu, self.bracket)

    def is_surjective(self) -> bool:
        """Whether [v, v] spans the centre."""
        flat = self.bracket.reshape(self.dim_v * self.dim_v, self.dim_z)
        return bool(np.linalg.matrix_rank(flat) == self.dim_z)


@dataclass(frozen=True)
class NPoint:
    """Point (x, z) of N in exponential coordinates."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "z", np.atleast_1d(np.asarray(self.z, dtype=float)))
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.z))):
            raise ValidationError("NPoint coordinates must be finite", field="NPoint")

    def norm(self) -> float:
        return float(np.sqrt(self.x @ self.x + self.z @ self.z))


# ----------------------------------------------------------------- builders

def heisenberg(d: int) -> HTypeAlgebra:
    """Heisenberg algebra of dimension 2d+1 with [e_{2i-1}, e_{2i}] = e_z."""
    if d < 1:
        raise ValidationError("heisenberg(d) needs d >= 1", field="d")
    bracket = np.zeros((2 * d, 2 * d, 1))
    for i in range(d):
        bracket[2 * i, 2 * i + 1, 0] = 1.0
        bracket[2 * i + 1, 2 * i, 0] = -1.0
    return HTypeAlgebra(2 * d, 1, bracket, label=f"heisenberg({d})")


def _quaternion_left_multiplications() -> list[np.ndarray]:
    # left multiplication by i, j, k on H = R^4 with basis (1, i, j, k)
    li = np.zeros((4, 4))
    li[1, 0], li[0, 1], li[3, 2], li[2, 3] = 1.0, -1.0, 1.0, -1.0
    lj = np.zeros((4, 4))
    lj[2, 0], lj[3, 1], lj[0, 2], lj[1, 3] = 1.0, -1.0, -1.0, 1.0
    lk = np.zeros((4, 4))
    lk[3, 0], lk[2, 1], lk[1, 2], lk[0, 3] = 1.0, 1.0, -1.0, -1.0
    return [li, lj, lk]


def quaternionic(n_quat: int) -> HTypeAlgebra:
    """Quaternionic H-type algebra with v = H^n, z = Im H (dv = 4n, dz = 3)."""
    if n_quat < 1:
        raise ValidationError("quaternionic(n) needs n >= 1", field="n_quat")
    dv = 4 * n_quat
    bracket = np.zeros((dv, dv, 3))
    for k, block in enumerate(_quaternion_left_multiplications()):
        big = np.kron(np.eye(n_quat), block)
        # b[i, j, k] = (J_k)[j, i]
        bracket[:, :, k] = big.T
    return HTypeAlgebra(dv, 3, bracket, label=f"quaternionic({n_quat})")


def custom(bracket, label: str = "custom") -> HTypeAlgebra:
    bracket = np.asarray(bracket, dtype=float)
    if bracket.ndim != 3 or bracket.shape[0] != bracket.shape[1]:
        raise DimensionError("custom bracket must have shape (dv, dv, dz)", got=bracket.shape)
    return HTypeAlgebra(bracket.shape[0], bracket.shape[2], bracket, label=label)


def build_algebra(kind: str, size: Optional[int] = None, bracket=None) -> HTypeAlgebra:
    """Dispatch on ``kind`` in {"heisenberg", "quaternionic", "custom"}."""
    if kind == "heisenberg":
        return heisenberg(1 if size is None else size)
    if kind == "quaternionic":
        return quaternionic(1 if size is None else size)
    if kind == "custom":
        if bracket is None:
            raise ValidationError("custom algebra needs a bracket tensor", field="bracket")
        return custom(bracket)
    raise ValidationError(f"unknown algebra kind {kind!r}", field="kind")


def load_algebra_json(path: str | Path) -> HTypeAlgebra:
    """Read ``{dim_v, dim_z, entries: [[i, j, k, value], ...]}`` with 1-based indices.

    Entries list each bracket coefficient explicitly; antisymmetry is checked,
    not imposed.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise FileIOError("bracket file not found", file_path=str(path), cause=exc) from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bracket file is not valid JSON: {exc}", field="bracket_file") from exc
    try:
        dv, dz = int(data["dim_v"]), int(data["dim_z"])
        entries = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("bracket file needs dim_v, dim_z and entries", field="bracket_file") from exc
    bracket = np.zeros((dv, dv, dz))
    for entry in entries:
        i, j, k, value = entry
        if not (1 <= i <= dv and 1 <= j <= dv and 1 <= k <= dz):
            raise DimensionError("bracket entry index out of range", expected=(dv, dv, dz), got=(i, j, k))
        bracket[i - 1, j - 1, k - 1] = float(value)
    return HTypeAlgebra(dv, dz, bracket, label=data.get("label", path.stem))


# -------------------------------------------------------------- structure

@dataclass
class HTypeReport:
    max_violation: float
    samples: int
    surjective: bool
    square_violation: float = 0.0

    @property
    def is_htype(self) -> bool:
        return self.surjective and self.max_violation <= 1e-10


def j_map(alg: HTypeAlgebra, mu, x) -> np.ndarray:
    """J_mu x, defined by <J_mu x, y> = mu . [x, y]."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != alg.dim_v:
        raise DimensionError("x has the wrong length", expected=alg.dim_v, got=x.shape)
    return alg.j_matrix(mu) @ x


def verify_htype(alg: HTypeAlgebra, samples: int = 10_000, seed: int = 0) -> HTypeReport:
    """Largest relative defect of |J_mu x| = |mu| |x| over random (x, mu)."""
    if samples < 1:
        raise ValidationError("samples must be at least 1", field="samples")
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((samples, alg.dim_v))
    mus = rng.standard_normal((samples, alg.dim_z))
    jx = np.einsum("sk,ijk,si->sj", mus, alg.bracket, xs)
    scale = np.linalg.norm(mus, axis=1) * np.linalg.norm(xs, axis=1)
    violation = np.abs(np.linalg.norm(jx, axis=1) - scale) / scale

    # basis directions: |J_mu e_i| = 1 for unit mu; degenerate directions show up here
    basis_defect = max(
        float(np.max(np.abs(np.linalg.norm(alg.j_matrix(mu), axis=0) - 1.0))) for mu in np.eye(alg.dim_z)
    )
    square_violation = max(
        float(np.max(np.abs(alg.j_matrix(mu) @ alg.j_matrix(mu) + np.eye(alg.dim_v)))) for mu in np.eye(alg.dim_z)
    )
    return HTypeReport(
        max_violation=float(max(np.max(violation), basis_defect)),
        samples=samples,
        surjective=alg.is_surjective(),
        square_violation=square_violation,
    )


# --------------------------------------------------------------- group law

def _check_dims(alg: HTypeAlgebra, *points: NPoint) -> None:
    for p in points:
        if p.x.shape != (alg.dim_v,) or p.z.shape != (alg.dim_z,):
            raise DimensionError(
                "point dimensions do not match the algebra",
                expected=(alg.dim_v, alg.dim_z),
                got=(p.x.shape, p.z.shape),
            )


def compose_n(alg: HTypeAlgebra, p: NPoint, q: NPoint) -> NPoint:
    """(x, z)(x', z') = (x + x', z + z' + [x, x'] / 2)."""
    _check_dims(alg, p, q)
    return NPoint(p.x + q.x, p.z + q.z + 0.5 * alg.bracket_of(p.x, q.x))


def inverse_n(p: NPoint) -> NPoint:
    return NPoint(-p.x, -p.z)


def identity_n(alg: HTypeAlgebra) -> NPoint:
    return NPoint(np.zeros(alg.dim_v), np.zeros(alg.dim_z))


def dilate_n(a: float, p: NPoint) -> NPoint:
    """Automorphic dilation (x, z) -> (a^{1/2} x, a z)."""
    return NPoint(np.sqrt(a) * p.x, a * p.z)


def involution_n(f: Callable[[NPoint], float]) -> Callable[[NPoint], float]:
    """f*(p) = f(p^{-1}) for real f on the unimodular group N."""
    return lambda p: f(inverse_n(p))


# --------------------------------------------------------- vector fields

def central_difference(g: Callable[[float], float], h: float) -> float:
    """Fourth-order central difference of g at 0."""
    return (-g(2 * h) + 8 * g(h) - 8 * g(-h) + g(-2 * h)) / (12 * h)


def richardson_derivative(g: Callable[[float], float], h: float) -> float:
    """Richardson-extrapolated fourth-order difference (error O(h^6))."""
    coarse = central_difference(g, h)
    fine = central_difference(g, 0.5 * h)
    return (16.0 * fine - coarse) / 15.0


def flow_n(alg: HTypeAlgebra, p: NPoint, j: int, s: float) -> NPoint:
    """p . exp(s Y_j) for the basis vector Y_j (1-based, j <= n)."""
    if not 1 <= j <= alg.n:
        raise DimensionError("vector field index out of range", expected=(1, alg.n), got=j)
    step_x = np.zeros(alg.dim_v)
    step_z = np.zeros(alg.dim_z)
    if j <= alg.dim_v:
        step_x[j - 1] = s
    else:
        step_z[j - 1 - alg.dim_v] = s
    return compose_n(alg, p, NPoint(step_x, step_z))


def default_step(p: NPoint) -> float:
    return 1e-4 * (1.0 + p.norm())


def left_invariant_derivative_n(
    alg: HTypeAlgebra,
    j: int,
    f: Callable[[NPoint], float],
    p: NPoint,
    step: Optional[float] = None,
) -> float:
    """X_j f(p) by differencing along the flow s -> p exp(s Y_j)."""
    h = default_step(p) if step is None else step
    return richardson_derivative(lambda s: f(flow_n(alg, p, j, s)), h)


def sub_laplacian_n(alg: HTypeAlgebra, f: Callable[[NPoint], float], p: NPoint, step: float = 1e-3) -> float:
    """L_N f(p) = -sum_{j <= dv} X_j^2 f(p) by fourth-order second differences."""
    total = 0.0
    for j in range(1, alg.dim_v + 1):
        g = lambda s: f(flow_n(alg, p, j, s))
        total += (-g(2 * step) + 16 * g(step) - 30 * g(0.0) + 16 * g(-step) - g(-2 * step)) / (12 * step**2)
    return -total
