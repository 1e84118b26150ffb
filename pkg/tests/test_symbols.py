import math

import numpy as np
import pytest

from src.drkit.errors import DimensionError, ValidationError
from src.drkit.symbols import (
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

SMALL = LogGrid(6.0, 61)


def test_log_grid():
    grid = LogGrid(1.0, 5)
    assert grid.h == 0.5
    assert list(grid.nodes) == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert grid.weights.sum() == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        LogGrid(1.0, 1)


def test_refined_grid_keeps_window_and_widened_keeps_spacing():
    grid = LogGrid(15.0, 301)
    fine = grid.refined()
    assert (fine.U, fine.N) == (15.0, 601)
    assert fine.h == pytest.approx(grid.h / 2.0)
    wide = grid.widened(20.0)
    assert wide.U == 20.0
    assert wide.h == pytest.approx(grid.h)


def test_norm_of_identity_and_diagonal():
    assert op_norm(OperatorMatrix.identity(SMALL)).norm == pytest.approx(1.0)
    values = np.where(np.arange(SMALL.N) % 2 == 0, 2.0, 0.5)
    result = op_norm(OperatorMatrix.diagonal(SMALL, values), A2Weight.power(0.5))
    assert result.converged
    assert result.norm == pytest.approx(2.0, rel=1e-6)


def test_operator_shape_guard():
    with pytest.raises(DimensionError):
        OperatorMatrix(SMALL, np.eye(3))


def test_m_operator_structure(heis):
    u = SMALL.nodes
    diff = u[:, None] - u[None, :]
    m0 = build_m_operator(heis, "M0", 1.0, 0.5, SMALL).entries
    mv = build_m_operator(heis, "Mv", 1.0, 0.5, SMALL).entries
    assert np.all(np.diag(m0) == 0.0)
    assert np.all(m0[diff < 1.0] == 0.0)
    assert np.all(mv[diff > -1.0] == 0.0)
    assert np.any(mv != 0.0)


def test_central_operator_rescales_vertical_one(quat):
    lam = 2.0
    mv = build_m_operator(quat, "Mv", lam, [0.3, 0.4, 0.0], SMALL).entries
    mz = build_m_operator(quat, "Mz", lam, [0.3, 0.4, 0.0], SMALL).entries
    expected = mv * np.sqrt(np.exp(SMALL.nodes) * lam)[None, :]
    assert np.allclose(mz, expected, rtol=1e-12, atol=0.0)


def test_m_operator_guards(heis):
    with pytest.raises(ValidationError):
        build_m_operator(heis, "Mx", 1.0, 0.5, SMALL)
    with pytest.raises(ValidationError):
        build_m_operator(heis, "Mv", 0.0, 0.5, SMALL)
    with pytest.raises(DimensionError):
        build_m_operator(heis, "Mv", 1.0, [0.5, 0.5], SMALL)


def test_a2_weights():
    weight = A2Weight.parse("power(0.5)")
    assert weight == A2Weight.power(0.5) and weight.label == "power(0.5)"
    assert A2Weight.parse("flat").characteristic_estimate() == 1.0
    assert weight.characteristic_estimate() > 1.0
    assert np.all(np.isfinite(weight.cell_values(LogGrid(1.0, 3))))
    with pytest.raises(ValidationError):
        A2Weight.power(1.0)
    with pytest.raises(ValidationError):
        A2Weight.parse("gauss(1)")


def test_norm_sweep_is_bounded(heis):
    sweep = norm_sweep(heis, "Mv", grid=SMALL, lambdas=[0.1, 1.0, 10.0], ratios=(0.0, 0.5))
    assert sweep.converged
    assert len(sweep.rows()) == 6
    assert sweep.band <= 20.0


def test_r_bound_of_scalars_is_max_norm():
    family = [OperatorMatrix.identity(SMALL) * c for c in (1.0, 2.0, 0.5)]
    estimate = r_bound_estimate(family, p=2.0, trials=8)
    assert estimate.max_norm == pytest.approx(2.0)
    assert estimate.estimate == pytest.approx(2.0, rel=1e-9)


def test_r_bound_guards():
    with pytest.raises(ValidationError):
        r_bound_estimate([])
    with pytest.raises(ValidationError):
        r_bound_estimate([OperatorMatrix.identity(SMALL)], p=1.0)
    with pytest.raises(ValidationError):
        r_bound_estimate([OperatorMatrix.identity(SMALL), OperatorMatrix.identity(LogGrid(6.0, 31))])


def test_symbol_sweep_guards(heis):
    with pytest.raises(ValidationError):
        symbol_derivative_sweep(heis, "Fx")
    with pytest.raises(ValidationError):
        symbol_derivative_sweep(heis, "Fv", kappa=2.0)


def test_symbol_sweep_reports_orders(heis):
    report = symbol_derivative_sweep(heis, "Fz", max_order=1, points=[(0.5, 0.2), (2.0, 1.0)])
    assert set(report.ratios) == {"0,0", "1,0", "0,1"}
    assert set(report.drift) == {"1,0", "0,1"}
    assert math.isfinite(report.max_ratio)


def test_holder_quotient_is_finite(heis):
    value = holder_check(heis, "F0", epsilon=0.5, pairs=16)
    assert 0.0 < value < 1e3


def test_holder_covers_first_partials(heis):
    plain = holder_check(heis, "F0", epsilon=0.5, pairs=16)
    with_partials = holder_check(heis, "F0", epsilon=0.5, pairs=16, max_order=1)
    assert plain <= with_partials < 1e3
    with pytest.raises(ValidationError):
        holder_check(heis, "F0", max_order=2)
    with pytest.raises(ValidationError):
        holder_check(heis, "Fx")


@pytest.mark.slow
@pytest.mark.parametrize("which", ["M0", "Mv", "Mz"])
def test_norm_is_stable_when_spacing_halves(heis, which):
    coarse = LogGrid(15.0, 301)
    a = op_norm(build_m_operator(heis, which, 1.0, 0.0, coarse)).norm
    b = op_norm(build_m_operator(heis, which, 1.0, 0.0, coarse.refined())).norm
    assert abs(a - b) / b < 0.05


@pytest.mark.slow
def test_r_bound_of_single_operator_matches_its_norm(heis):
    single = build_m_operator(heis, "Mv", 1.0, 0.0, LogGrid(15.0, 301))
    estimate = r_bound_estimate([single], p=2.0, trials=32)
    assert estimate.estimate == pytest.approx(estimate.max_norm, rel=0.05)


@pytest.mark.slow
def test_r_bound_of_dyadic_family_is_near_max_norm(heis):
    grid = LogGrid(15.0, 301)
    family = [build_m_operator(heis, "Mv", 2.0**k, 0.0, grid) for k in range(-2, 3)]
    estimate = r_bound_estimate(family, p=2.0, trials=32)
    assert estimate.estimate == pytest.approx(estimate.max_norm, rel=0.10)
