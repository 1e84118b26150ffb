"""
验证套件
Named verification checks, grouped by suite, and the sweep quantities.

Every check measures one number and compares it with a threshold taken from
the run configuration; a check passes when value <= threshold.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .config_manager import SUITE_NAMES, RunConfig
from .dr_space import (
    SPoint,
    Variant,
    WeightSpec,
    compose_s,
    distance_s,
    eikonal_check,
    inverse_s,
    sample_spoints,
)
from .dyadic import chi, e_km, fourier_coefficients, eta, partition_sum
from .errors import ConfigError, DrkitError, ErrorCategory, ValidationError, validate_input
from .gelfand import (
    GelfandPoint,
    gelfand_radial,
    plancherel_check,
    psi_profile,
    weight_recurrence,
    xi_envelope_sweep,
    xi_s,
    xi_tilde,
    xi_batch,
)
from .haar_integration import MomentFormula, corollary_ratio_test, radial_ratio_test
from .heat_kernel import (
    envelope_band,
    heat_equation_residual,
    mass,
    second_derivative_local_l1,
    weighted_l1,
)
from .htype_group import HTypeAlgebra, NPoint, compose_n, dilate_n, verify_htype
from .riesz_kernels import (
    PhiEvaluator,
    binomial_constant,
    integrability_scan,
    invsqrt_by_subordination,
    main_term_ratio,
    verify_rj_identity,
)
from .settings import Settings, get_settings
from .symbols import (
    A2Weight,
    LogGrid,
    OperatorMatrix,
    build_m_operator,
    holder_check,
    norm_sweep,
    op_norm,
    r_bound_estimate,
    symbol_derivative_sweep,
)

PASS, FAIL, INCONCLUSIVE, ERROR = "pass", "fail", "inconclusive", "error"


@dataclass
class CheckResult:
    """One row of the verification report."""

    suite: str
    name: str
    anchor: str
    value: float
    threshold: float
    status: str
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in (PASS, INCONCLUSIVE)

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def judge(value: float, threshold: float) -> str:
    return PASS if (not math.isnan(value)) and value <= threshold else FAIL


@dataclass
class SuiteContext:
    """What a check needs: the algebra, tolerances, grids and a place for tables."""

    alg: HTypeAlgebra
    config: RunConfig
    suite: str
    settings: Settings = field(default_factory=get_settings)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)

    def tol(self, name: str) -> float:
        return self.config.tolerance(name, self.settings)

    def grid(self, key: str, default: Any = None) -> Any:
        return self.settings.get(f"grids.{self.suite}.{key}", default)

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, SUITE_NAMES.index(self.suite), stream])

    def result(self, name: str, anchor: str, value: float, tol_name: str, **details) -> CheckResult:
        threshold = self.tol(tol_name)
        value = float(value)
        return CheckResult(self.suite, name, anchor, value, threshold, judge(value, threshold), details)

    def add_rows(self, table: str, rows: Iterable[Dict[str, Any]]) -> None:
        self.tables.setdefault(table, []).extend(rows)


Check = Callable[[SuiteContext], List[CheckResult]]


@dataclass(frozen=True)
class RegisteredCheck:
    name: str
    anchor: str
    func: Check


_REGISTRY: Dict[str, List[RegisteredCheck]] = {name: [] for name in SUITE_NAMES}


def register(suite: str, name: str, anchor: str) -> Callable[[Check], Check]:
    def decorator(func: Check) -> Check:
        _REGISTRY[suite].append(RegisteredCheck(name, anchor, func))
        return func

    return decorator


def registered_checks(suite: str) -> List[RegisteredCheck]:
    if suite not in _REGISTRY:
        raise ValidationError(f"unknown suite {suite!r}", field="suite")
    return list(_REGISTRY[suite])


def run_suite(suite: str, ctx: SuiteContext) -> List[CheckResult]:
    """Run every check of ``suite``; any exception raised by a check becomes an error row."""
    results: List[CheckResult] = []
    for check in registered_checks(suite):
        try:
            results.extend(check.func(ctx))
        except Exception as exc:
            error = exc if isinstance(exc, DrkitError) else DrkitError(str(exc), ErrorCategory.INTERNAL, cause=exc)
            results.append(
                CheckResult(suite, check.name, check.anchor, math.nan, math.nan, ERROR, {"error": error.message, "category": error.category.value})
            )
    return results


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _mu(alg: HTypeAlgebra, m: float) -> np.ndarray:
    mu = np.zeros(alg.dim_z)
    mu[0] = m
    return mu


# ===================================================================== group

@register("group", "htype_identity", "|J_mu x| = |mu| |x| on v x z")
def _htype_identity(ctx: SuiteContext) -> List[CheckResult]:
    report = verify_htype(ctx.alg, samples=10_000, seed=ctx.config.seed)
    value = report.max_violation if report.surjective else math.inf
    return [ctx.result("htype_identity", "|J_mu x| = |mu| |x| on v x z", value, "htype", surjective=report.surjective, square_violation=report.square_violation)]


@register("group", "group_axioms", "associativity, inverses, dilations, |p^-1| = |p| >= |log a|")
def _group_axioms(ctx: SuiteContext) -> List[CheckResult]:
    alg = ctx.alg
    rng = ctx.rng()
    count = int(ctx.settings.get("grids.geometry.samples", 1000))
    ps = sample_spoints(alg, count, rng)
    qs = sample_spoints(alg, count, rng)
    ws = sample_spoints(alg, count, rng)
    errors = {"associativity": 0.0, "inverse": 0.0, "dilation": 0.0, "symmetry": 0.0, "log_bound": 0.0}
    for p, q, w in zip(ps, qs, ws):
        left = compose_s(alg, compose_s(alg, p, q), w).as_array()
        right = compose_s(alg, p, compose_s(alg, q, w)).as_array()
        errors["associativity"] = max(errors["associativity"], float(np.max(np.abs(left - right))) / (1.0 + float(np.max(np.abs(left)))))
        unit = compose_s(alg, p, inverse_s(alg, p)).as_array()
        target = np.zeros_like(unit)
        target[-1] = 1.0
        errors["inverse"] = max(errors["inverse"], float(np.max(np.abs(unit - target))) / (1.0 + float(np.max(np.abs(p.as_array())))))
        pn, qn = NPoint(p.x, p.z), NPoint(q.x, q.z)
        lhs = dilate_n(w.a, compose_n(alg, pn, qn))
        rhs = compose_n(alg, dilate_n(w.a, pn), dilate_n(w.a, qn))
        scale = 1.0 + max(float(np.max(np.abs(lhs.x))), float(np.max(np.abs(lhs.z))))
        dil_err = max(float(np.max(np.abs(lhs.x - rhs.x))), float(np.max(np.abs(lhs.z - rhs.z)))) / scale
        errors["dilation"] = max(errors["dilation"], dil_err)
        r = distance_s(alg, p)
        errors["symmetry"] = max(errors["symmetry"], abs(distance_s(alg, inverse_s(alg, p)) - r) / max(r, 1.0))
        errors["log_bound"] = max(errors["log_bound"], max(0.0, abs(p.u) - r) / max(r, 1.0))
    return [ctx.result("group_axioms", "associativity, inverses, dilations, |p^-1| = |p| >= |log a|", max(errors.values()), "group_axioms", **errors)]


# ================================================================== geometry

@register("geometry", "eikonal", "|grad r| = 1 through sum_j (X_j cosh^2(r/2))^2 = sinh^2(r)/4")
def _eikonal(ctx: SuiteContext) -> List[CheckResult]:
    value = eikonal_check(ctx.alg, int(ctx.grid("samples", 1000)), rng=ctx.rng())
    return [ctx.result("eikonal", "|grad r| = 1 through sum_j (X_j cosh^2(r/2))^2 = sinh^2(r)/4", value, "eikonal")]


@register("geometry", "radial_density_bands", "exact weighted radial integrals against constant-free densities")
def _radial_bands(ctx: SuiteContext) -> List[CheckResult]:
    out = []
    for values in ctx.grid("weight_specs", [[0, 0, 0, 0, 0]]):
        weight = WeightSpec.from_sequence(values)
        report = radial_ratio_test(weight, ctx.alg, Variant.FULL)
        label = "radial_band[" + ",".join(f"{v:g}" for v in weight.as_list()) + "]"
        out.append(ctx.result(label, "exact weighted radial integrals against constant-free densities", report.band, "ratio_band", min_ratio=report.min_ratio, max_ratio=report.max_ratio))
        ctx.add_rows("radial_bands", [{"weight": label, "profile": i, "ratio": r} for i, r in enumerate(report.ratios)])
    return out


@register("geometry", "moment_bands", "radial moment estimates with exponential comparison densities")
def _moment_bands(ctx: SuiteContext) -> List[CheckResult]:
    out = []
    for formula in MomentFormula:
        report = corollary_ratio_test(ctx.alg, formula)
        out.append(ctx.result(f"moment_band[{formula.value}]", "radial moment estimates with exponential comparison densities", report.band, "ratio_band", min_ratio=report.min_ratio, max_ratio=report.max_ratio))
    return out


# ====================================================================== heat

@register("heat", "heat_equation", "(d_t + Delta) h_t = 0")
def _heat_equation(ctx: SuiteContext) -> List[CheckResult]:
    alg = ctx.alg
    count = int(ctx.grid("residual_points", 50))
    points = sample_spoints(alg, count, ctx.rng(), scale=0.5)
    out = []
    for t in ctx.grid("residual_times", [0.5, 1.0, 2.0]):
        residuals = [heat_equation_residual(alg, float(t), p) for p in points]
        ctx.add_rows("heat_residual", [{"t": t, "point": i, "residual": r} for i, r in enumerate(residuals)])
        out.append(ctx.result(f"heat_equation[t={t:g}]", "(d_t + Delta) h_t = 0", max(residuals), "heat_residual"))

    # the spatial stencil is fourth order: halving the step divides the defect by about 16
    ratios = []
    for p in points[:5]:
        coarse = heat_equation_residual(alg, 1.0, p, step=0.2)
        fine = heat_equation_residual(alg, 1.0, p, step=0.1)
        if fine > 0:
            ratios.append(coarse / fine)
    order = math.log2(float(np.median(ratios))) if ratios else math.nan
    out.append(ctx.result("heat_equation_refinement", "(d_t + Delta) h_t = 0", abs(order - 4.0), "heat_refinement", observed_order=order))
    return out


@register("heat", "mass", "||h_t||_1 = 1")
def _mass(ctx: SuiteContext) -> List[CheckResult]:
    out = []
    for t in ctx.grid("mass_times", [0.25, 1.0, 4.0]):
        m = mass(ctx.alg, float(t))
        ctx.add_rows("heat_mass", [{"t": t, "mass": m}])
        out.append(ctx.result(f"mass[t={t:g}]", "||h_t||_1 = 1", abs(m - 1.0), "mass", mass=m))
    return out


@register("heat", "gradient_l1", "t^{1/2} int |grad h_t| e^{eps |p|^2 / 4t} stays bounded in t")
def _gradient_l1(ctx: SuiteContext) -> List[CheckResult]:
    out = []
    times = ctx.grid("gradient_times", [0.25, 1.0, 4.0, 16.0])
    for eps in ctx.grid("gradient_epsilons", [0.0, 0.5]):
        values = [math.sqrt(t) * weighted_l1(ctx.alg, float(t), float(eps), "gradient") for t in times]
        ctx.add_rows("gradient_l1", [{"epsilon": eps, "t": t, "value": v} for t, v in zip(times, values)])
        band = max(values) / min(values) if min(values) > 0 else math.inf
        out.append(ctx.result(f"gradient_l1[eps={eps:g}]", "t^{1/2} int |grad h_t| e^{eps |p|^2 / 4t} stays bounded in t", band, "gradient_band", values=values))
    return out


@register("heat", "pointwise_envelopes", "pointwise kernel and gradient envelopes")
def _pointwise_envelopes(ctx: SuiteContext) -> List[CheckResult]:
    times = ctx.grid("envelope_times", [0.25, 1.0, 4.0])
    radii = ctx.grid("envelope_radii", [0.5, 1.0, 2.0, 5.0, 10.0])
    out = []
    for which in ("kernel", "gradient"):
        lo, hi = envelope_band(ctx.alg, times, radii, which)
        out.append(ctx.result(f"envelope[{which}]", "pointwise kernel and gradient envelopes", hi / lo if lo > 0 else math.inf, "envelope_band", min_ratio=lo, max_ratio=hi))
    return out


@register("heat", "local_second_derivatives", "X_j X_k h_t is locally integrable")
def _local_second(ctx: SuiteContext) -> List[CheckResult]:
    value = second_derivative_local_l1(ctx.alg, 1.0, j=0, k=1)
    return [ctx.result("local_second_derivatives", "X_j X_k h_t is locally integrable", value, "local_second_derivative")]


# ===================================================================== riesz

@register("riesz", "phi_asymptotics", "Phi(X) X^{dv/2+dz} log X tends to Gamma(dv/4+1/2) Gamma(dv/4+dz/2)")
def _phi_asymptotics(ctx: SuiteContext) -> List[CheckResult]:
    phi = PhiEvaluator(ctx.alg.dim_v, ctx.alg.dim_z)
    errors, scaled = [], []
    for log_x in ctx.grid("phi_log_x", [10.0, 20.0]):
        mantissa, _ = phi.eval_scaled(math.exp(log_x))
        ratio = mantissa / phi.asymptotic_constant
        errors.append(abs(ratio - 1.0))
        scaled.append(abs(ratio - 1.0) * log_x)
    decreasing = all(b < a for a, b in zip(errors[:-1], errors[1:]))
    value = max(scaled) if decreasing else math.inf
    ctx.add_rows("phi_asymptotics", [{"log_x": lx, "error": e} for lx, e in zip(ctx.grid("phi_log_x", [10.0, 20.0]), errors)])
    return [ctx.result("phi_asymptotics", "Phi(X) X^{dv/2+dz} log X tends to Gamma(dv/4+1/2) Gamma(dv/4+dz/2)", value, "phi_asymptotic", errors=errors)]


@register("riesz", "derivation_identity", "-(1/2X) d/dX Phi_{dv,dz} = Phi_{dv,dz+2}")
def _derivation_identity(ctx: SuiteContext) -> List[CheckResult]:
    phi = PhiEvaluator(ctx.alg.dim_v, ctx.alg.dim_z)
    shifted = phi.shifted()
    worst = 0.0
    for X in ctx.grid("derivation_points", [1.5, 3.0, 10.0]):
        derivative = float(phi.eval_jet(float(X), 1).derivative_values()[1])
        worst = max(worst, _rel(-derivative / (2.0 * X), shifted(float(X))))
    return [ctx.result("derivation_identity", "-(1/2X) d/dX Phi_{dv,dz} = Phi_{dv,dz+2}", worst, "derivation_identity")]


@register("riesz", "subordination", "Delta^{-1/2} = pi^{-1/2} int t^{-1/2} e^{-t Delta} dt")
def _subordination(ctx: SuiteContext) -> List[CheckResult]:
    phi = PhiEvaluator(ctx.alg.dim_v, ctx.alg.dim_z)
    worst, rows = 0.0, []
    for r in ctx.grid("subordination_radii", [1.0, 2.0, 5.0]):
        closed = phi.constant * phi(math.cosh(r / 2.0))
        integral = invsqrt_by_subordination(ctx.alg, float(r))
        err = _rel(integral, closed)
        rows.append({"r": r, "closed": closed, "subordination": integral, "rel_err": err})
        worst = max(worst, err)
    ctx.add_rows("subordination", rows)
    return [ctx.result("subordination", "Delta^{-1/2} = pi^{-1/2} int t^{-1/2} e^{-t Delta} dt", worst, "subordination")]


@register("riesz", "rj_identity", "r_j = Q^{-1} (X_j H^{-Q/2})*")
def _rj_identity(ctx: SuiteContext) -> List[CheckResult]:
    report = verify_rj_identity(ctx.alg, samples=int(ctx.grid("rj_samples", 100)), seed=ctx.config.seed)
    return [ctx.result("rj_identity", "r_j = Q^{-1} (X_j H^{-Q/2})*", report.max_rel_err, "rj_identity", per_direction=report.per_direction)]


@register("riesz", "binomial_constant", "sum_k binom(k-1/2, k)/(2k+dv/2+dz) in closed form")
def _binomial(ctx: SuiteContext) -> List[CheckResult]:
    series, closed = binomial_constant(ctx.alg.dim_v, ctx.alg.dim_z)
    return [ctx.result("binomial_constant", "sum_k binom(k-1/2, k)/(2k+dv/2+dz) in closed form", _rel(series, closed), "binomial_constant", series=series, closed=closed)]


@register("riesz", "main_terms", "adjoint Riesz kernels approach -C~ K_j at infinity")
def _main_terms(ctx: SuiteContext) -> List[CheckResult]:
    alg = ctx.alg
    x = np.full(alg.dim_v, 0.5)
    z = np.full(alg.dim_z, 0.3)
    depths = sorted((abs(u) for u in ctx.grid("main_term_u", [-12.0, -16.0])))
    out = []
    for j in (0, 1, alg.dim_v + 1):
        errors = []
        for depth in depths:
            u = depth if j == 0 else -depth
            errors.append(abs(main_term_ratio(alg, j, SPoint(x, z, math.exp(u))) - 1.0))
        decreasing = all(b <= a for a, b in zip(errors[:-1], errors[1:]))
        ctx.add_rows("main_terms", [{"j": j, "depth": d, "error": e} for d, e in zip(depths, errors)])
        out.append(ctx.result(f"main_term[j={j}]", "adjoint Riesz kernels approach -C~ K_j at infinity", errors[-1] if decreasing else math.inf, "main_term", errors=errors))
    return out


# =================================================================== gelfand

def _gelfand_points(ctx: SuiteContext):
    for ell in ctx.grid("ells", [0, 1, 2]):
        for m in ctx.grid("mu_norms", [0.5, 1.0, 2.0]):
            yield int(ell), float(m)


@register("gelfand", "psi_transform", "G Psi_2 (mu, l) = Xi_2((2l + dv/2)|mu|, mu)")
def _psi_transform(ctx: SuiteContext) -> List[CheckResult]:
    alg = ctx.alg
    worst, rows = 0.0, []
    for ell, m in _gelfand_points(ctx):
        gp = GelfandPoint(_mu(alg, m), ell)
        lhs = gelfand_radial(alg, psi_profile(alg, 2.0), gp).real
        rhs = xi_s(alg, 2.0, gp.spectral_lambda(alg), gp.mu)
        err = _rel(lhs, rhs)
        rows.append({"s": 2, "ell": ell, "mu": m, "lhs": lhs, "rhs": rhs, "rel_err": err})
        worst = max(worst, err)
    ctx.add_rows("gelfand_identity", rows)
    return [ctx.result("psi_transform", "G Psi_2 (mu, l) = Xi_2((2l + dv/2)|mu|, mu)", worst, "gelfand_identity")]


@register("gelfand", "weighted_transform", "G((1+|x|^2/4) Psi_2) = Xi~_2 and the |x|^2 recurrence")
def _weighted_transform(ctx: SuiteContext) -> List[CheckResult]:
    alg = ctx.alg
    worst_tilde, worst_rec, rows = 0.0, 0.0, []
    for ell, m in _gelfand_points(ctx):
        gp = GelfandPoint(_mu(alg, m), ell)
        lhs = gelfand_radial(alg, psi_profile(alg, 2.0, "one_plus_quarter"), gp).real
        rhs = xi_tilde(alg, 2.0, gp.spectral_lambda(alg), gp.mu)
        rec_lhs, rec_rhs = weight_recurrence(alg, 2.0, ell, gp.mu)
        err_tilde, err_rec = _rel(lhs, rhs), _rel(rec_lhs, rec_rhs)
        rows.append({"ell": ell, "mu": m, "tilde_lhs": lhs, "tilde_rhs": rhs, "recurrence_lhs": rec_lhs, "recurrence_rhs": rec_rhs})
        worst_tilde, worst_rec = max(worst_tilde, err_tilde), max(worst_rec, err_rec)
    ctx.add_rows("gelfand_weighted", rows)
    return [
        ctx.result("xi_tilde_identity", "G((1+|x|^2/4) Psi_2) = Xi~_2", worst_tilde, "xi_tilde_identity"),
        ctx.result("weight_recurrence", "(|mu|/2) G(|x|^2 f)(l) three-term recurrence", worst_rec, "weight_recurrence"),
    ]


@register("gelfand", "plancherel", "||f||_2^2 = (2 pi)^{-Q} int sum_l |G f|^2 binom |mu|^{dv/2} dmu")
def _plancherel(ctx: SuiteContext) -> List[CheckResult]:
    profile = lambda rho, z: np.exp(-rho * rho - z * z)
    report = plancherel_check(ctx.alg, profile, L_max=int(ctx.grid("plancherel_l_max", 30)))
    result = ctx.result("plancherel", "||f||_2^2 = (2 pi)^{-Q} int sum_l |G f|^2 binom |mu|^{dv/2} dmu", report.rel_err, "plancherel", lhs=report.lhs, rhs=report.rhs, tail=report.tail)
    if result.status == FAIL and report.inconclusive:
        result.status = INCONCLUSIVE
    return [result]


@register("gelfand", "xi_envelopes", "|d^alpha Xi_s| bounded by K-Bessel shaped envelopes on cones")
def _xi_envelopes(ctx: SuiteContext) -> List[CheckResult]:
    out = []
    for s in (0.0, 2.0):
        ratios = xi_envelope_sweep(ctx.alg, s, kappa=ctx.alg.dim_v / 4.0)
        out.append(ctx.result(f"xi_envelope[s={s:g}]", "|d^alpha Xi_s| bounded by K-Bessel shaped envelopes on cones", max(ratios.values()), "symbol_envelope", ratios=ratios))
    return out


# =================================================================== symbols

def _log_grid(ctx: SuiteContext) -> LogGrid:
    return LogGrid(float(ctx.grid("grid_u", 15.0)), int(ctx.grid("grid_n", 301)))


@register("symbols", "operator_norms", "M_0, M_v, M_z uniformly bounded on weighted L^2(da/a)")
def _operator_norms(ctx: SuiteContext) -> List[CheckResult]:
    grid = _log_grid(ctx)
    lambdas = np.logspace(-2, 2, int(ctx.grid("lambdas_count", 9)))
    out = []
    for which in ("M0", "Mv", "Mz"):
        for label in ctx.grid("weights", ["flat"]):
            sweep = norm_sweep(ctx.alg, which, A2Weight.parse(label), grid, lambdas=lambdas)
            ctx.add_rows("operator_norms", sweep.rows())
            band = sweep.band if sweep.converged else math.inf
            out.append(ctx.result(f"norm_band[{which},{label}]", "M_0, M_v, M_z uniformly bounded on weighted L^2(da/a)", band, "symbol_norm_band", max_norm=float(sweep.norms.max())))
    return out


@register("symbols", "grid_refinement", "operator norms stable under grid refinement")
def _grid_refinement(ctx: SuiteContext) -> List[CheckResult]:
    coarse = _log_grid(ctx)
    fine = coarse.refined(int(ctx.grid("refine_factor", 2)))
    wide = coarse.widened(float(ctx.grid("wide_u", 20.0)))
    worst, rows = 0.0, []
    for which in ("M0", "Mv", "Mz"):
        for lam in (0.1, 1.0, 10.0):
            a = op_norm(build_m_operator(ctx.alg, which, lam, 0.0, coarse)).norm
            b = op_norm(build_m_operator(ctx.alg, which, lam, 0.0, fine)).norm
            c = op_norm(build_m_operator(ctx.alg, which, lam, 0.0, wide)).norm
            worst = max(worst, _rel(a, b))
            # the window drift is tabulated only: M0 has a slowly converging tail in |u|
            rows.append({"which": which, "lambda": lam, "coarse": a, "fine": b, "wide": c, "spacing_drift": _rel(a, b), "window_drift": _rel(a, c)})
    ctx.add_rows("grid_refinement", rows)
    window = max(r["window_drift"] for r in rows)
    return [ctx.result("grid_refinement", "operator norms stable under grid refinement", worst, "grid_drift", window_drift=window)]


@register("symbols", "mz_mv_consistency", "M_z kernel = (e^{u'} lambda)^{1/2} M_v kernel")
def _consistency(ctx: SuiteContext) -> List[CheckResult]:
    grid = _log_grid(ctx)
    lam, m = 1.0, 0.5
    mv = build_m_operator(ctx.alg, "Mv", lam, m, grid).entries
    mz = build_m_operator(ctx.alg, "Mz", lam, m, grid).entries
    scaled = mv * np.sqrt(np.exp(grid.nodes) * lam)[None, :]
    value = float(np.max(np.abs(mz - scaled)) / max(float(np.max(np.abs(mz))), 1e-300))
    return [ctx.result("mz_mv_consistency", "M_z kernel = (e^{u'} lambda)^{1/2} M_v kernel", value, "symbol_consistency")]


@register("symbols", "symbol_envelopes", "lambda^{|alpha|} d^alpha F bounded by the stated envelopes")
def _symbol_envelopes(ctx: SuiteContext) -> List[CheckResult]:
    out = []
    for which in ("F0", "Fv", "Fz"):
        report = symbol_derivative_sweep(ctx.alg, which, max_order=2)
        out.append(ctx.result(f"symbol_envelope[{which}]", "lambda^{|alpha|} d^alpha F bounded by the stated envelopes", report.max_ratio, "symbol_envelope", ratios=report.ratios, drift=report.drift))
    out.append(ctx.result("holder[F0]", "F0 and its scaled first partials are Hoelder continuous on the cone", holder_check(ctx.alg, "F0", 0.5, seed=ctx.config.seed, max_order=1), "holder"))
    return out


@register("symbols", "r_bounds", "Rademacher R-bounds of operator families")
def _r_bounds(ctx: SuiteContext) -> List[CheckResult]:
    grid = _log_grid(ctx)
    trials = int(ctx.grid("r_bound_trials", 32))
    scalars = [OperatorMatrix.identity(grid) * 2.0, OperatorMatrix.identity(grid) * 0.5]
    est = r_bound_estimate(scalars, 2.0, trials, ctx.config.seed)
    single = build_m_operator(ctx.alg, "Mv", 1.0, 0.0, grid)
    single_est = r_bound_estimate([single], 2.0, trials, ctx.config.seed)
    family = [build_m_operator(ctx.alg, "Mv", 2.0**k, 0.0, grid) for k in range(-2, 3)]
    fam_est = r_bound_estimate(family, 2.0, trials, ctx.config.seed)
    ctx.add_rows("r_bounds", [
        {"family": "scalars", "estimate": est.estimate, "max_norm": est.max_norm},
        {"family": "single", "estimate": single_est.estimate, "max_norm": single_est.max_norm},
        {"family": "dyadic_Mv", "estimate": fam_est.estimate, "max_norm": fam_est.max_norm},
    ])
    return [
        ctx.result("r_bound[scalars]", "Rademacher R-bounds of operator families", _rel(est.estimate, 2.0), "r_bound"),
        ctx.result("r_bound[single]", "Rademacher R-bounds of operator families", _rel(single_est.estimate, single_est.max_norm), "r_bound"),
        ctx.result("r_bound[dyadic_Mv]", "Rademacher R-bounds of operator families", _rel(fam_est.estimate, fam_est.max_norm), "r_bound_family"),
    ]


@register("symbols", "dyadic_partition", "sum_m eta(2^m xi) = 1 and the E_{k,m} expansion")
def _dyadic(ctx: SuiteContext) -> List[CheckResult]:
    xi = np.logspace(-6, 6, 401)
    partition = float(np.max(np.abs(partition_sum(xi) - 1.0)))
    base = float(np.max(np.abs(e_km(0, 0, xi) - chi(xi))))
    symbol = lambda q: 1.0 / (1.0 + q * q)
    coeffs = fourier_coefficients(symbol, m=1, n=1024)
    xs = np.linspace(0.3, 0.9, 25)
    recon = float(np.max(np.abs(coeffs.reconstruct(xs) - eta(2.0 * xs) * symbol(xs))))
    return [
        ctx.result("partition_of_unity", "sum_m eta(2^m xi) = 1 and the E_{k,m} expansion", max(partition, base), "partition"),
        ctx.result("fourier_reconstruction", "sum_k M^_m(k) E_{k,m} = eta(2^m .) M", recon, "fourier_reconstruction"),
    ]


# ==================================================================== sweeps

def _fixed(fixed: Dict[str, str], name: str, default: Any, cast: Callable = float) -> Any:
    if name not in fixed:
        return default
    try:
        return cast(fixed[name])
    except ValueError as exc:
        raise ConfigError(f"--set {name}={fixed[name]!r} is not a valid {cast.__name__}", details={"parameter": name}) from exc


def _sweep_weighted_l1(alg, values, fixed):
    eps = _fixed(fixed, "epsilon", 0.0)
    which = _fixed(fixed, "which", "kernel", str)
    return [{"t": t, "epsilon": eps, "value": weighted_l1(alg, t, eps, which)} for t in values]


def _sweep_mass(alg, values, fixed):
    return [{"t": t, "value": mass(alg, t)} for t in values]


def _sweep_phi_ratio(alg, values, fixed):
    phi = PhiEvaluator(alg.dim_v, alg.dim_z)
    rows = []
    for log_x in values:
        mantissa, _ = phi.eval_scaled(math.exp(log_x))
        ratio = mantissa / phi.asymptotic_constant
        rows.append({"log_x": log_x, "ratio": ratio, "error": abs(ratio - 1.0)})
    return rows


def _sweep_op_norm(alg, values, fixed):
    which = _fixed(fixed, "which", "Mv", str)
    m = _fixed(fixed, "mu", 0.0)
    weight = A2Weight.parse(_fixed(fixed, "weight", "flat", str))
    grid = LogGrid(_fixed(fixed, "U", 15.0), _fixed(fixed, "N", 301, int))
    return [{"lambda": lam, "mu": m, "which": which, "weight": weight.label, "norm": op_norm(build_m_operator(alg, which, lam, m, grid), weight).norm} for lam in values]


def _sweep_xi(alg, values, fixed):
    s = _fixed(fixed, "s", 0.0)
    m = _fixed(fixed, "mu", 0.0)
    if not values:
        return []
    xs = xi_batch(alg, s, np.asarray(values, dtype=float), np.full(len(values), m))
    return [{"lambda": lam, "mu": m, "s": s, "value": float(v)} for lam, v in zip(values, xs)]


def _sweep_integrability(alg, values, fixed):
    if not values:
        return []
    scan = integrability_scan(alg, values, int(_fixed(fixed, "k", 1, int)))
    return [{"radius": r, "main": a, "remainder": b} for r, a, b in zip(scan.radii, scan.main, scan.remainder)]


@dataclass(frozen=True)
class SweepQuantity:
    parameter: str
    columns: Sequence[str]
    func: Callable[[HTypeAlgebra, List[float], Dict[str, str]], List[Dict[str, Any]]]
    fixed_names: Sequence[str] = ()


SWEEPS: Dict[str, SweepQuantity] = {
    "weighted_l1": SweepQuantity("t", ("t", "epsilon", "value"), _sweep_weighted_l1, ("epsilon", "which")),
    "mass": SweepQuantity("t", ("t", "value"), _sweep_mass),
    "phi_ratio": SweepQuantity("log_x", ("log_x", "ratio", "error"), _sweep_phi_ratio),
    "op_norm": SweepQuantity("lambda", ("lambda", "mu", "which", "weight", "norm"), _sweep_op_norm, ("which", "mu", "weight", "U", "N")),
    "xi": SweepQuantity("lambda", ("lambda", "mu", "s", "value"), _sweep_xi, ("s", "mu")),
    "integrability": SweepQuantity("radius", ("radius", "main", "remainder"), _sweep_integrability, ("k",)),
}


@validate_input({"quantity": {"choices": set(SWEEPS)}})
def evaluate_sweep(alg: HTypeAlgebra, *, quantity: str, values: Sequence[float], fixed: Optional[Dict[str, str]] = None) -> List[Dict[str, Any]]:
    """Rows of ``quantity`` over ``values`` in the given order."""
    sweep = SWEEPS[quantity]
    fixed = dict(fixed or {})
    unknown = sorted(set(fixed) - set(sweep.fixed_names))
    if unknown:
        known = ", ".join(sweep.fixed_names) or "none"
        raise ConfigError(f"{quantity} does not take {', '.join(unknown)}; fixed parameters: {known}", details={"unknown": unknown})
    return sweep.func(alg, [float(v) for v in values], fixed)
