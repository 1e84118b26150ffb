import math

import mpmath
import numpy as np
import pytest
from scipy import special

from src.drkit.errors import DomainError
from src.drkit.specfun import bessel_k, fit_st_envelopes, gamma_fn, laguerre, laguerre_table, log_st_s, st_funcs, st_jets


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (5.0, 24.0)])
def test_gamma_values(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


def test_gamma_domain():
    with pytest.raises(DomainError):
        gamma_fn(0.0)


@pytest.mark.parametrize("ell, a, t, expected", [(0, 0.3, 5.0, 1.0), (1, 0.0, 2.0, -1.0), (2, 0.0, 2.0, -1.0)])
def test_laguerre_examples(ell, a, t, expected):
    assert laguerre(ell, a, t) == pytest.approx(expected, abs=1e-14)


def test_laguerre_table_against_scipy():
    t = np.linspace(0.0, 20.0, 41)
    table = laguerre_table(12, 1.5, t)
    for ell in range(13):
        assert np.allclose(table[ell], special.eval_genlaguerre(ell, 1.5, t), rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("nu, x", [(0.5, 1.0), (0.5, 4.0), (0.0, 2.0), (2.0, 0.3), (3.0, 25.0), (1.0, 1e-3)])
def test_bessel_k_against_mpmath(nu, x):
    assert bessel_k(nu, x) == pytest.approx(float(mpmath.besselk(nu, x)), rel=1e-10)


def test_bessel_k_closed_form():
    x = 4.0
    assert bessel_k(0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-12)
    assert bessel_k(0.0, 2.0) == pytest.approx(0.11389387274953344, rel=1e-10)


def test_st_funcs_values_and_evenness():
    assert st_funcs(0.0) == (1.0, 1.0)
    s, t = st_funcs(1.0)
    assert s == pytest.approx(0.8509181282393216, rel=1e-14)
    assert t == pytest.approx(1.3130352854993312, rel=1e-14)
    assert st_funcs(-1.0) == st_funcs(1.0)
    big_s, big_t = st_funcs(800.0)
    assert big_s == 0.0 and big_t == pytest.approx(800.0)


def test_log_st_s_is_overflow_free():
    u = np.array([0.0, 1e-6, 1.0, 50.0, 2000.0])
    expected = [0.0, math.log(float(1e-6 / mpmath.sinh(1e-6))), math.log(1.0 / math.sinh(1.0)), float(mpmath.log(50 / mpmath.sinh(50))), float(mpmath.log(2000 / mpmath.sinh(2000)))]
    assert np.allclose(log_st_s(u), expected, rtol=1e-12, atol=1e-15)




def test_st_jets_at_origin_are_maclaurin():
    s_jet, t_jet = st_jets(0.0, 6)
    # u/sinh u = 1 - u^2/6 + 7u^4/360 - 31u^6/15120, u coth u = 1 + u^2/3 - u^4/45 + 2u^6/945
    assert np.allclose(s_jet.coeffs, [1, 0, -1 / 6, 0, 7 / 360, 0, -31 / 15120], atol=1e-15)
    assert np.allclose(t_jet.coeffs, [1, 0, 1 / 3, 0, -1 / 45, 0, 2 / 945], atol=1e-15)


@pytest.mark.parametrize("u0", [0.3, 2.0])
def test_st_jets_against_mpmath(u0):
    s_jet, t_jet = st_jets(u0, 6)
    s_der, t_der = s_jet.derivative_values(), t_jet.derivative_values()
    with mpmath.workdps(30):
        point = mpmath.mpf(u0)
        for k in range(7):
            s_exact = mpmath.diff(lambda u: u / mpmath.sinh(u), point, k)
            t_exact = mpmath.diff(lambda u: u / mpmath.tanh(u), point, k)
            assert s_der[k] == pytest.approx(float(s_exact), abs=1e-9)
            assert t_der[k] == pytest.approx(float(t_exact), abs=1e-9)


def test_envelope_fit_is_finite():
    fits = fit_st_envelopes(k_max=3, u_grid=np.linspace(0, 10, 51))
    assert all(math.isfinite(c) and c > 0 for c in fits["S"] + fits["T"][:1])
