"""Numerical toolkit for harmonic analysis on Damek-Ricci spaces."""

from .cli import main, run_sweep, run_verify
from .config_manager import RunConfig, RunConfigManager, parse_model
from .dr_space import SPoint, Variant, WeightSpec, compose_s, distance_s, inverse_s
from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    DrkitError,
    FileIOError,
    JetOrderError,
    ValidationError,
)
from .gelfand import GelfandPoint, gelfand_radial, plancherel_check, xi_s, xi_tilde
from .heat_kernel import RadialKernel, heat_at_point, mass, radial_heat, weighted_l1
from .htype_group import HTypeAlgebra, NPoint, build_algebra, heisenberg, quaternionic, verify_htype
from .riesz_kernels import PhiEvaluator, kernel_invsqrt, riesz_kernel
from .settings import Settings, get_settings
from .symbols import A2Weight, LogGrid, OperatorMatrix, build_m_operator, op_norm, r_bound_estimate

__all__ = [
    "main",
    "run_sweep",
    "run_verify",
    "RunConfig",
    "RunConfigManager",
    "parse_model",
    "SPoint",
    "Variant",
    "WeightSpec",
    "compose_s",
    "distance_s",
    "inverse_s",
    "ConfigError",
    "ConvergenceError",
    "DimensionError",
    "DomainError",
    "DrkitError",
    "FileIOError",
    "JetOrderError",
    "ValidationError",
    "GelfandPoint",
    "gelfand_radial",
    "plancherel_check",
    "xi_s",
    "xi_tilde",
    "RadialKernel",
    "heat_at_point",
    "mass",
    "radial_heat",
    "weighted_l1",
    "HTypeAlgebra",
    "NPoint",
    "build_algebra",
    "heisenberg",
    "quaternionic",
    "verify_htype",
    "PhiEvaluator",
    "kernel_invsqrt",
    "riesz_kernel",
    "Settings",
    "get_settings",
    "A2Weight",
    "LogGrid",
    "OperatorMatrix",
    "build_m_operator",
    "op_norm",
    "r_bound_estimate",
]
