import math

import numpy as np
import pytest

from src.drkit.errors import ConvergenceError, DomainError, ValidationError
from src.drkit.quadrature import (
    DEFAULT_QUAD,
    QuadSpec,
    Substitution,
    composite_gauss_legendre,
    gauss_legendre,
    integrate,
    panel_breaks,
)
from src.drkit.specfun import bessel_k


def test_exponential_halfline():
    assert integrate(lambda t: math.exp(-t), (0.0, math.inf)) == pytest.approx(1.0, rel=1e-10)


def test_sqrt_endpoint_singularity():
    spec = DEFAULT_QUAD.with_substitution(Substitution.SQRT_ENDPOINT)
    assert integrate(lambda u: u**-0.5, (0.0, 1.0), spec) == pytest.approx(2.0, rel=1e-10)


def test_exp_halfline_bessel_oracle():
    spec = DEFAULT_QUAD.with_substitution(Substitution.EXP_HALFLINE)
    value = integrate(lambda t: math.exp(-1.0 / t - t) / t, (0.0, math.inf), spec)
    assert value == pytest.approx(2.0 * bessel_k(0.0, 2.0), rel=1e-9)


def test_empty_and_reversed_domains():
    assert integrate(math.sin, (1.0, 1.0)) == 0.0
    with pytest.raises(DomainError):
        integrate(math.sin, (2.0, 1.0))


def test_failure_carries_estimate():
    spec = QuadSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=1)
    with pytest.raises(ConvergenceError) as info:
        integrate(lambda x: math.sin(1.0 / x), (1e-4, 1.0), spec)
    assert "estimate" in info.value.details


def test_spec_validation():
    with pytest.raises(ValidationError):
        QuadSpec(abs_tol=0.0)
    with pytest.raises(ValidationError):
        QuadSpec(max_subdivisions=0)


def test_gauss_legendre_rules():
    nodes, weights = gauss_legendre(8)
    assert weights.sum() == pytest.approx(2.0)
    assert not nodes.flags.writeable
    x, w = composite_gauss_legendre(panel_breaks(0.0, 3.0, 0.5, extra=(1.25,)), 6)
    assert np.sum(w * x**5) == pytest.approx(3.0**6 / 6.0, rel=1e-13)


def test_panel_breaks_include_extras():
    breaks = panel_breaks(0.0, 1.0, 0.5, extra=(0.3, 5.0))
    assert list(breaks) == [0.0, 0.3, 0.5, 1.0]
