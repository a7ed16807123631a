import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from selberg.errors import DomainError
from selberg.special import _hankel, _miller, bessel_j, bessel_j_scaled, digamma, hankel_threshold


def test_j3_at_one():
    assert bessel_j(3, 1.0) == pytest.approx(0.0195633539826684, abs=1e-15)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 3, 5.5, 10, 23.03, 50])
def test_bessel_against_scipy(nu):
    t = np.concatenate([np.linspace(0.01, 60, 900), np.linspace(60, 3000, 300)])
    ours = bessel_j(nu, t)
    ref = sp.jv(nu, t)
    assert np.max(np.abs(ours - ref)) < 1e-13


@pytest.mark.parametrize("nu,t", [(3, 0.3), (4.5, 7.0), (10, 33.3), (20, 120.0), (3, 900.0)])
def test_bessel_against_mpmath(nu, t):
    assert bessel_j(nu, t) == pytest.approx(float(mpmath.besselj(nu, t)), abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(3, 40), st.floats(0.5, 200))
def test_bessel_ode(nu, t):
    # t^2 J'' + t J' + (t^2 - nu^2) J = 0, checked by central differences
    step = 1e-3
    jm, j0, jp = (bessel_j(nu, t + d) for d in (-step, 0.0, step))
    d1 = (jp - jm) / (2 * step)
    d2 = (jp - 2 * j0 + jm) / step**2
    residual = t * t * d2 + t * d1 + (t * t - nu * nu) * j0
    assert abs(residual) < 1e-6 * max(1.0, t * t)


def test_miller_and_hankel_agree_in_overlap():
    for nu in (3, 5.5, 10):
        t = np.linspace(max(40.0, hankel_threshold(nu)), 80.0, 50)
        assert np.max(np.abs(_miller(nu, t) - _hankel(nu, t))) < 1e-9


def test_scaled_bessel_limit_at_zero():
    for nu in (3, 5.5, 10):
        assert bessel_j_scaled(nu, 0.0) == pytest.approx(1 / math.gamma(nu + 1), rel=1e-15)
        small = bessel_j_scaled(nu, 1e-6)
        assert small == pytest.approx(1 / math.gamma(nu + 1), rel=1e-10)


def test_scaled_bessel_is_even():
    t = np.linspace(0.1, 30, 50)
    assert np.array_equal(bessel_j_scaled(4.5, t), bessel_j_scaled(4.5, -t))


def test_negative_argument_needs_integer_order():
    assert bessel_j(3, -2.0) == pytest.approx(-bessel_j(3, 2.0))
    with pytest.raises(DomainError):
        bessel_j(2.5, -1.0)


@pytest.mark.parametrize("z", [0.25, 1.0, 3.7 + 2.1j, 0.25 + 40j, 0.5 + 1000j, 12.5 - 3j, -2.5 + 0.5j])
def test_digamma_against_mpmath(z):
    assert abs(complex(digamma(z)) - complex(mpmath.digamma(z))) < 1e-12 * max(1, abs(mpmath.digamma(z)))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 30), st.floats(-500, 500))
def test_digamma_recurrence(x, y):
    z = complex(x, y)
    assert abs(digamma(z + 1) - digamma(z) - 1 / z) < 1e-11 * max(1, abs(digamma(z)))


def test_digamma_vectorised():
    z = np.array([0.5 + 1j, 2.0 + 0j, 0.25 + 80j])
    ref = sp.psi(z)
    assert np.max(np.abs(digamma(z) - ref)) < 1e-13
