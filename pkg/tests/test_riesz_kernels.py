import math

import numpy as np
import pytest

from src.drkit.dr_space import SPoint, identity_s
from src.drkit.errors import DomainError, ValidationError
from src.drkit.htype_group import NPoint
from src.drkit.riesz_kernels import (
    PhiEvaluator,
    adjoint_riesz_kernel,
    binomial_constant,
    integrability_scan,
    invsqrt_by_subordination,
    leading_coeff_check,
    main_term_ratio,
    main_terms,
    phi0,
    riesz_kernel,
    verify_rj_identity,
)


def test_phi0_closed_value():
    # X = cosh(1/2): sqrt(X^2 - 1) = sinh(1/2) and log(X + sinh(1/2)) = 1/2
    assert float(phi0(math.cosh(0.5), 0).value) == pytest.approx(2.0 / math.sinh(0.5), rel=1e-13)
    with pytest.raises(DomainError):
        phi0(1.0, 2)


def test_phi_constants():
    assert PhiEvaluator(4, 2).asymptotic_constant == pytest.approx(math.sqrt(math.pi) / 2.0)
    assert PhiEvaluator(2, 1).homogeneity == 2.0
    assert PhiEvaluator(2, 1).shifted() == PhiEvaluator(2, 3)
    with pytest.raises(ValidationError):
        PhiEvaluator(3, 1)


@pytest.mark.parametrize("dims", [(2, 1), (2, 2), (4, 3)])
def test_phi_asymptotics(dims):
    phi = PhiEvaluator(*dims)
    log_x = 20.0
    mantissa, exponent = phi.eval_scaled(math.exp(log_x))
    assert exponent == pytest.approx(-phi.homogeneity * log_x - math.log(log_x))
    assert abs(mantissa / phi.asymptotic_constant - 1.0) <= 2.0 / log_x


@pytest.mark.parametrize("u, v", [(1, 0), (0, 2), (2, 1)])
def test_leading_coefficients(u, v):
    log_x = 20.0
    assert abs(leading_coeff_check(u, v, math.exp(log_x)) - 1.0) <= 2.0 / log_x
    with pytest.raises(DomainError):
        leading_coeff_check(u, v, 1.5)


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_subordination_matches_closed_kernel(heis, r):
    phi = PhiEvaluator(heis.dim_v, heis.dim_z)
    closed = phi.constant * phi(math.cosh(r / 2.0))
    assert invsqrt_by_subordination(heis, r) == pytest.approx(closed, rel=1e-4)


def test_riesz_kernel_symmetries(heis):
    on_axis = SPoint([0.0, 0.0], [0.0], 2.0)
    assert riesz_kernel(heis, 1, on_axis) == 0.0
    assert riesz_kernel(heis, 3, on_axis) == 0.0
    assert riesz_kernel(heis, 0, SPoint([1.0, 0.5], [0.3], 1.0)) == 0.0
    with pytest.raises(ValidationError):
        riesz_kernel(heis, 4, on_axis)
    with pytest.raises(DomainError):
        riesz_kernel(heis, 1, identity_s(heis))


def test_main_term_values(heis):
    terms = main_terms(heis)
    assert terms.H(NPoint([0, 0], [0])) == 1.0
    assert terms.r(3, NPoint([0, 0], [1.0])) == pytest.approx(0.25)
    assert terms.r(1, NPoint([2.0, 0.0], [0.0])) == pytest.approx(0.125)
    assert terms.k(3, SPoint([0, 0], [1.0], math.exp(-0.5))) == 0.0
    with pytest.raises(ValidationError):
        terms.k(0, SPoint([0, 0], [1.0], 0.1))


@pytest.mark.parametrize("model", ["heis", "quat"])
def test_rj_identity(model, request):
    alg = request.getfixturevalue(model)
    assert verify_rj_identity(alg, samples=20, seed=3).max_rel_err <= 1e-6


@pytest.mark.parametrize("dims", [(2, 1), (4, 3), (8, 3)])
def test_binomial_constant(dims):
    series, closed = binomial_constant(*dims)
    assert series == pytest.approx(closed, rel=1e-8)


def test_binomial_constant_simple_case():
    assert binomial_constant(2, 1)[1] == pytest.approx(1.0)


@pytest.mark.slow
def test_adjoint_kernel_approaches_main_term(heis):
    j = heis.dim_v + 1
    errors = [abs(main_term_ratio(heis, j, SPoint([0.5, 0.0], [0.3], math.exp(u))) - 1.0) for u in (-12.0, -16.0)]
    assert errors[1] < errors[0]
    assert errors[1] <= 0.25


def test_adjoint_kernel_is_finite(heis):
    value = adjoint_riesz_kernel(heis, 1, SPoint([0.5, -0.2], [0.3], 0.5))
    assert np.isfinite(value)


def test_integrability_scan_index_guard(heis):
    with pytest.raises(ValidationError):
        integrability_scan(heis, k=2)


@pytest.mark.slow
def test_integrability_scan_accumulates(heis):
    scan = integrability_scan(heis, radii=(4.0, 8.0), k=1)
    assert scan.radii == [4.0, 8.0]
    assert all(step >= 0 for step in scan.main_increments())
    assert all(step >= 0 for step in scan.remainder_increments())
