import math

import numpy as np
import pytest

from src.drkit.errors import DimensionError, DomainError, ValidationError
from src.drkit.gelfand import (
    GelfandPoint,
    f_symbols,
    gelfand_radial,
    plancherel_check,
    psi_profile,
    weight_recurrence,
    xi_batch,
    xi_envelope_sweep,
    xi_mu_zero_oracle,
    xi_s,
    xi_tilde,
    xi_tilde_batch,
)
from src.drkit.htype_group import custom, heisenberg
from src.drkit.specfun import bessel_k


def test_xi_at_zero_mu_is_bessel(heis):
    # A_0 = 4 pi^2 on the three-dimensional model
    assert xi_s(heis, 0.0, 1.0, [0.0]) == pytest.approx(8.0 * math.pi**2 * bessel_k(0.0, 2.0), rel=1e-8)
    assert xi_s(heis, 2.0, 3.0, [0.0]) == pytest.approx(xi_mu_zero_oracle(heis, 2.0, 3.0), rel=1e-8)


def test_batch_rule_agrees_with_adaptive(heis):
    lams, ms = np.array([0.3, 2.0, 10.0]), np.array([0.1, 0.5, 4.0])
    batch = xi_batch(heis, 0.0, lams, ms)
    adaptive = [xi_s(heis, 0.0, lam, [m]) for lam, m in zip(lams, ms)]
    assert np.allclose(batch, adaptive, rtol=1e-6)


def test_xi_decreases_in_lambda(quat):
    values = xi_batch(quat, 2.0, np.linspace(0.5, 20.0, 12), np.full(12, 0.7))
    assert np.all(np.diff(values) < 0)


def test_laplace_domain_guard(heis):
    with pytest.raises(DomainError):
        xi_s(heis, 0.0, -1.0, [0.0])
    with pytest.raises(DomainError):
        xi_s(heis, -1.0, 1.0, [0.0])


def test_symbol_relations(heis):
    lams, mus = np.array([0.5, 2.0, 8.0]), np.array([0.2, 1.0, 0.5])
    fv, fz = f_symbols(heis, "Fv", lams, mus), f_symbols(heis, "Fz", lams, mus)
    assert np.allclose(fz, np.sqrt(lams) * fv, rtol=1e-12)
    with pytest.raises(DomainError):
        f_symbols(heis, "Fv", [0.0], [0.1])
    with pytest.raises(ValidationError):
        f_symbols(heis, "Fx", [1.0], [0.1])


def test_xi_tilde_paths_agree(heis):
    lam, m = 3.0, 0.8
    assert float(xi_tilde_batch(heis, 2.0, [lam], [m])[0]) == pytest.approx(xi_tilde(heis, 2.0, lam, [m]), rel=1e-3)


def test_gelfand_point():
    gp = GelfandPoint([3.0, 4.0, 0.0], 2)
    assert gp.mu_norm == 5.0
    with pytest.raises(ValidationError):
        GelfandPoint([1.0], -1)


@pytest.mark.parametrize("ell, m", [(0, 1.0), (1, 0.5)])
def test_transform_of_psi(heis, ell, m):
    gp = GelfandPoint([m], ell)
    lhs = gelfand_radial(heis, psi_profile(heis, 2.0), gp).real
    assert lhs == pytest.approx(xi_s(heis, 2.0, gp.spectral_lambda(heis), gp.mu), rel=1e-3)


def test_recurrence_for_x_weight(heis):
    lhs, rhs = weight_recurrence(heis, 2.0, 1, [1.0])
    assert lhs == pytest.approx(rhs, rel=1e-3)


def test_gelfand_path_needs_small_centre():
    bracket = np.zeros((2, 2, 2))
    bracket[0, 1, :] = 1.0
    bracket[1, 0, :] = -1.0
    with pytest.raises(DimensionError):
        gelfand_radial(custom(bracket), psi_profile(heisenberg(1), 2.0), GelfandPoint([1.0, 0.0], 0))


@pytest.mark.slow
def test_plancherel_for_gaussian(heis):
    report = plancherel_check(heis, lambda rho, z: np.exp(-rho * rho - z * z))
    assert report.rel_err <= 1e-3 or report.inconclusive


@pytest.mark.slow
def test_plancherel_for_zero(heis):
    report = plancherel_check(heis, lambda rho, z: 0.0 * rho * z)
    assert (report.lhs, report.rhs, report.rel_err) == (0.0, 0.0, 0.0)
    assert not report.inconclusive


def test_envelope_sweep_keys(heis):
    ratios = xi_envelope_sweep(heis, 0.0, kappa=0.5, lambdas=[0.5, 5.0], ratios=(0.0, 0.5), max_order=1)
    assert set(ratios) == {"0,0", "1,0", "0,1"}
    assert all(np.isfinite(v) and v > 0 for v in ratios.values())
