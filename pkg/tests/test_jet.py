import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.drkit.errors import DomainError, JetOrderError
from src.drkit.jet import MAX_ORDER, Jet, jet_apply_derivation

coeff_lists = st.lists(st.floats(min_value=-3, max_value=3, allow_nan=False), min_size=5, max_size=5)


@given(coeff_lists, coeff_lists)
@settings(max_examples=50, deadline=None)
def test_product_matches_truncated_polynomial_product(p, q):
    product = (Jet(p) * Jet(q)).coeffs
    exact = np.convolve(p, q)[:5]
    scale = 1.0 + np.max(np.abs(exact))
    assert np.max(np.abs(product - exact)) <= 1e-13 * scale


@given(coeff_lists, st.floats(min_value=0.5, max_value=3.0))
@settings(max_examples=50, deadline=None)
def test_division_inverts_multiplication(p, c0):
    q = Jet([c0, 0.3, -0.2, 0.1, 0.05])
    back = (Jet(p) * q) / q
    assert np.allclose(back.coeffs, p, atol=1e-11)


def test_elementary_jets_against_mpmath():
    x0 = 0.7
    var = Jet.variable(x0, 6)
    cases = {
        "exp": (var.exp(), mpmath.exp),
        "log": (var.log(), mpmath.log),
        "sinh": (var.sinh(), mpmath.sinh),
        "cosh": (var.cosh(), mpmath.cosh),
        "power": (var.power(1.5), lambda x: x**1.5),
    }
    for name, (jet, fn) in cases.items():
        derivs = jet.derivative_values()
        for k in range(7):
            expected = float(mpmath.diff(fn, x0, k))
            assert derivs[k] == pytest.approx(expected, rel=1e-9, abs=1e-12), name


def test_jet_batches_carry_through():
    xs = np.array([0.5, 1.0, 2.0])
    jet = Jet.variable(xs, 3).exp()
    assert jet.batch_shape == (3,)
    assert np.allclose(jet.derivative_values()[3], np.exp(xs))


def test_apply_derivation_on_square():
    # -(r^2)'/1 at r = 1
    f = Jet.variable(1.0, 2) * Jet.variable(1.0, 2)
    out = jet_apply_derivation(f, Jet.constant(1.0, 2))
    assert out.order == 1
    assert out.derivative_values()[0] == pytest.approx(-2.0)
    assert out.derivative_values()[1] == pytest.approx(-2.0)


def test_half_sinh_derivation_of_gauss():
    t, r = 1.0, 1.3
    var = Jet.variable(r, 2)
    gauss = (-(var * var) / (4.0 * t)).exp() * (4.0 * math.pi * t) ** -0.5
    out = jet_apply_derivation(gauss, (var * 0.5).sinh())
    expected = (4 * math.pi * t) ** -0.5 * (r / (2 * t)) * math.exp(-r * r / (4 * t)) / math.sinh(r / 2)
    assert float(out.value) == pytest.approx(expected, rel=1e-13)


def test_order_is_consumed_and_exhausted():
    f = Jet.variable(1.0, 1)
    once = jet_apply_derivation(f, Jet.constant(1.0, 1))
    with pytest.raises(JetOrderError):
        jet_apply_derivation(once, Jet.constant(1.0, 0))


def test_guards():
    with pytest.raises(JetOrderError):
        Jet(np.zeros(MAX_ORDER + 2))
    with pytest.raises(DomainError):
        Jet.variable(-1.0, 2).log()
    with pytest.raises(DomainError):
        Jet.variable(1.0, 2) / Jet.variable(0.0, 2)


def test_evaluate_is_taylor_polynomial():
    jet = Jet.variable(0.0, 12).exp()
    assert float(jet.evaluate(0.1)) == pytest.approx(math.exp(0.1), rel=1e-14)


def test_scalars_broadcast_against_batches():
    x = Jet.variable(np.array([0.5, 1.0, 2.0]), 2)
    assert np.allclose((x - 1.0).coeffs[0], [-0.5, 0.0, 1.0])
    assert np.allclose((1.0 - x).coeffs[1], -1.0)
    assert (Jet.constant(1.0, 2) + x).coeffs.shape == (3, 3)
    square = x * x - 1.0
    assert np.allclose(square.coeffs[0], [-0.75, 0.0, 3.0])
    assert np.allclose(square.coeffs[1], [1.0, 2.0, 4.0])
    inverse = 1.0 / (x * x + 1.0)
    assert np.allclose(inverse.coeffs[0], 1.0 / np.array([1.25, 2.0, 5.0]))
    scaled = x * np.array([[1.0], [2.0]])
    assert scaled.coeffs.shape == (3, 2, 3)
    assert np.allclose(scaled.coeffs[0, 1], [1.0, 2.0, 4.0])
