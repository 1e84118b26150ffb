import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.drkit.dr_space import (
    SPoint,
    Variant,
    WeightSpec,
    compose_s,
    distance_from_norms,
    distance_s,
    eikonal_check,
    eikonal_defect,
    grad_cosh2,
    identity_s,
    inverse_s,
    laplacian_s,
    left_invariant_derivative_s,
    modular_fn,
    sample_spoints,
)
from src.drkit.errors import DimensionError, ValidationError
from src.drkit.htype_group import quaternionic


def test_point_needs_positive_a():
    with pytest.raises(ValidationError):
        SPoint([0, 0], [0], 0.0)


def test_composition_example(heis):
    p = compose_s(heis, SPoint([1, 0], [0], 4.0), SPoint([0, 1], [0], 1.0))
    assert np.allclose(p.x, [1, 2]) and np.allclose(p.z, [1]) and p.a == 4.0


def test_dimension_mismatch(heis):
    with pytest.raises(DimensionError):
        compose_s(heis, SPoint([1, 0, 0], [0], 1.0), identity_s(heis))


@given(
    st.lists(st.floats(min_value=-3, max_value=3, allow_nan=False), min_size=7, max_size=7),
    st.floats(min_value=-2, max_value=2),
    st.floats(min_value=-2, max_value=2),
)
@settings(max_examples=40, deadline=None)
def test_inverse_and_associativity(values, u1, u2):
    alg = quaternionic(1)
    v = np.array(values)
    p = SPoint(v[:4], v[4:7], math.exp(u1))
    q = SPoint(v[3::-1], v[6:3:-1], math.exp(u2))
    unit = compose_s(alg, p, inverse_s(alg, p))
    assert np.allclose(unit.x, 0, atol=1e-10) and np.allclose(unit.z, 0, atol=1e-10) and unit.a == pytest.approx(1.0)
    left = compose_s(alg, compose_s(alg, p, q), p)
    right = compose_s(alg, p, compose_s(alg, q, p))
    assert np.allclose(left.as_array(), right.as_array(), rtol=1e-10, atol=1e-9)


def test_modular_function(quat):
    assert modular_fn(quat, SPoint(np.zeros(4), np.zeros(3), 2.0)) == pytest.approx(2.0**-5)


@pytest.mark.parametrize(
    "x, z, a, expected",
    [([0, 0], [0], math.e, 1.0), ([0, 0], [0], 1 / math.e, 1.0), ([2, 0], [0], 1.0, 1.9248473002384139)],
)
def test_distance_examples(heis, x, z, a, expected):
    assert distance_s(heis, SPoint(x, z, a)) == pytest.approx(expected, rel=1e-12)


def test_distance_is_inversion_invariant_and_dominates_log_a(quat, rng):
    for p in sample_spoints(quat, 50, rng, scale=1.5):
        r = distance_s(quat, p)
        assert distance_s(quat, inverse_s(quat, p)) == pytest.approx(r, rel=1e-10, abs=1e-12)
        assert r >= abs(p.u) - 1e-12


def test_distance_near_identity_has_no_cancellation():
    assert float(distance_from_norms(1e-9, 0.0, 1.0)) == pytest.approx(1e-9, rel=1e-6)


def test_grad_cosh2_matches_flows(quat, rng):
    cosh2 = lambda p: math.cosh(distance_s(quat, p) / 2.0) ** 2
    for p in sample_spoints(quat, 5, rng):
        grad = grad_cosh2(quat, p)
        numeric = [left_invariant_derivative_s(quat, j, cosh2, p) for j in range(quat.n + 1)]
        assert np.allclose(grad, numeric, rtol=1e-7, atol=1e-8)


def test_eikonal_identity(heis, quat, rng):
    for alg in (heis, quat):
        assert max(eikonal_defect(alg, p) for p in sample_spoints(alg, 200, rng)) <= 1e-10
    assert eikonal_check(heis, samples=50, seed=3) == eikonal_check(heis, samples=50, seed=3) <= 1e-10


def test_a_derivative_of_root_modular_function(quat):
    f = lambda p: modular_fn(quat, p) ** 0.5
    p = SPoint([0.2, 0.1, -0.3, 0.4], [0.5, 0.0, 1.0], 1.7)
    assert left_invariant_derivative_s(quat, 0, f, p) == pytest.approx(-2.5 * f(p), rel=1e-9)


def test_laplacian_of_radial_exponential(heis):
    f = lambda p: math.exp(-distance_s(heis, p))
    p = SPoint([0.4, -0.2], [0.3], 1.3)
    fine, coarse = laplacian_s(heis, f, p, step=0.02), laplacian_s(heis, f, p, step=0.04)
    assert fine == pytest.approx(coarse, rel=1e-4)


def test_weight_spec_and_variants():
    spec = WeightSpec.from_sequence([2, 1, 0.5, 1, 2])
    assert spec.sigma == pytest.approx(1.5)
    assert spec.as_list() == [2.0, 1.0, 0.5, 1.0, 2.0]
    with pytest.raises(ValidationError):
        WeightSpec(b=-1.0)
    with pytest.raises(ValidationError):
        WeightSpec.from_sequence([1, 2])
    assert Variant.ZERO.bounds() == (-1.0, 1.0)
    assert list(Variant.MINUS.contains([-5.0, 1.0, 1.5])) == [True, True, False]
