import math

import mpmath
import numpy as np
import pytest

from src.drkit.dr_space import SPoint, identity_s, inverse_s, left_invariant_derivative_s, modular_fn
from src.drkit.errors import DomainError, ValidationError
from src.drkit.heat_kernel import (
    SMALL_RADIUS,
    RadialKernel,
    derivation_chain,
    envelope_band,
    grad_heat,
    heat_at_point,
    heat_equation_residual,
    mass,
    radial_heat,
    weighted_l1,
)

POINT = SPoint([0.4, -0.3], [0.5], 1.4)


def test_single_derivation_against_mpmath():
    t, r = 1.0, 1.0
    gauss = lambda s: mpmath.exp(-s * s / (4 * t)) / mpmath.sqrt(4 * mpmath.pi * t)
    expected = -mpmath.diff(gauss, r) / mpmath.sinh(r / 2)
    assert float(derivation_chain(np.array([r]), t, 1, 0)[0, 0]) == pytest.approx(float(expected), rel=1e-10)


def test_chain_is_continuous_across_origin_switch():
    r = np.array([SMALL_RADIUS - 1e-9, SMALL_RADIUS + 1e-9])
    for e_count, d_count in ((1, 0), (2, 1), (1, 2)):
        values, slopes = derivation_chain(r, 0.7, e_count, d_count, nderiv=1)
        assert values[0] == pytest.approx(values[1], rel=1e-7)
        assert slopes[0] == pytest.approx(slopes[1], rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("model", ["heis", "quat"])
def test_kernel_is_positive_and_decreasing(model, request):
    alg = request.getfixturevalue(model)
    r = np.linspace(0.0, 8.0, 33)
    values = RadialKernel(alg, 1.0).value(r)
    assert np.all(values > 0)
    assert np.all(np.diff(values) < 0)


def test_radius_and_time_guards(heis):
    with pytest.raises(DomainError):
        radial_heat(heis, 1.0, -0.1)
    with pytest.raises(DomainError):
        RadialKernel(heis, 0.0)
    with pytest.raises(ValidationError):
        RadialKernel(heis, 1.0).evaluate(1.0, nderiv=2)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_heat_equation_holds(heis, t):
    assert heat_equation_residual(heis, t, POINT) <= 1e-3


def test_non_solution_breaks_heat_equation(heis):
    wrong = lambda s, q: math.exp(s) * heat_at_point(heis, s, q)
    assert heat_equation_residual(heis, 1.0, POINT, kernel=wrong) > 0.05


def test_inversion_picks_up_modular_function(heis):
    h, h_inv = heat_at_point(heis, 1.0, POINT), heat_at_point(heis, 1.0, inverse_s(heis, POINT))
    assert h_inv / h == pytest.approx(1.0 / modular_fn(heis, POINT), rel=1e-12)


def test_gradient_at_identity_is_modular(heis):
    grad = grad_heat(heis, 1.0, identity_s(heis))
    assert grad[0] == pytest.approx(-0.5 * heis.Q * radial_heat(heis, 1.0, 0.0))
    assert np.allclose(grad[1:], 0.0)


def test_gradient_matches_flows(heis):
    h = lambda q: heat_at_point(heis, 1.0, q)
    numeric = [left_invariant_derivative_s(heis, j, h, POINT) for j in range(heis.n + 1)]
    assert np.allclose(grad_heat(heis, 1.0, POINT), numeric, rtol=1e-6, atol=1e-10)


@pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
def test_mass_is_one(heis, t):
    assert mass(heis, t) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.slow
def test_mass_is_one_on_odd_centre(quat):
    assert mass(quat, 1.0) == pytest.approx(1.0, abs=1e-3)


def test_weighted_l1_grows_with_epsilon(heis):
    assert weighted_l1(heis, 1.0, 0.5) > weighted_l1(heis, 1.0, 0.0)
    with pytest.raises(DomainError):
        weighted_l1(heis, 1.0, 1.0)
    with pytest.raises(ValidationError):
        weighted_l1(heis, 1.0, 0.0, which="hessian")


def test_envelope_band_is_bounded(heis):
    low, high = envelope_band(heis, [0.5, 1.0, 4.0], [0.5, 1.0, 2.0, 5.0])
    assert 0 < low <= high < 1e3
    low, high = envelope_band(heis, [1.0], [0.0, 1.0, 3.0], which="gradient")
    assert 0 < low <= high < 1e3


def test_residual_drops_sixteenfold_when_step_halves(heis):
    points = [POINT, SPoint([-0.2, 0.1], [-0.3], 0.8), SPoint([0.1, 0.3], [0.2], 1.1)]
    ratios = [heat_equation_residual(heis, 1.0, p, step=0.2) / heat_equation_residual(heis, 1.0, p, step=0.1) for p in points]
    assert abs(math.log2(float(np.median(ratios))) - 4.0) <= 0.5


@pytest.mark.slow
@pytest.mark.parametrize("epsilon", [0.0, 0.5])
def test_gradient_l1_band_stays_below_ten(heis, epsilon):
    values = [math.sqrt(t) * weighted_l1(heis, t, epsilon, "gradient") for t in (0.25, 1.0, 4.0, 16.0)]
    assert min(values) > 0
    assert max(values) / min(values) <= 10.0
