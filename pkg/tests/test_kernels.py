import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from selberg.errors import DomainError, NumericError
from selberg.kernels import KernelParams, asymp_bound, constants, g, h, h_complex, h_complex_with_error

mus = st.floats(min_value=3.0, max_value=40.0)


def test_g_value_at_zero_mu3():
    exact = mpmath.gamma(4) / (mpmath.sqrt(3 * mpmath.pi) * mpmath.gamma(3.5))
    assert g(KernelParams(3), 0.0) == pytest.approx(float(exact), rel=1e-14)
    assert g(KernelParams(3), 0.0) == pytest.approx(0.588085, abs=1e-6)


def test_g_prefactor_matches_gamma_form():
    for mu in (3, 4.25, 10, 31.5):
        k = constants(KernelParams(mu))
        ref = mpmath.gamma(mu + 1) / (mpmath.sqrt(mpmath.pi * mu) * mpmath.gamma(mu + 0.5))
        assert k.g0 == pytest.approx(float(ref), rel=1e-13)


def test_mu_below_three_rejected():
    with pytest.raises(DomainError):
        KernelParams(2.5)
    with pytest.raises(DomainError):
        KernelParams(3, L=0)


def test_g_support():
    p = KernelParams(4)
    assert g(p, 1.0) == 0.0
    assert g(p, -1.5) == 0.0
    assert np.all(g(p, np.array([1.01, 2.0, -7.0])) == 0)


@settings(max_examples=40, deadline=None)
@given(mus, st.floats(-60, 60))
def test_fourier_pair(mu, t):
    p = KernelParams(mu)
    ref, _ = quad(lambda x: g(p, x), -1, 1, weight="cos", wvar=t, epsabs=1e-14, epsrel=1e-13, limit=200)
    assert h(p, t) == pytest.approx(ref, abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(mus)
def test_normalisation(mu):
    p = KernelParams(mu)
    assert h(p, 0.0) == pytest.approx(1 / math.sqrt(mu), abs=1e-14)
    total, _ = quad(lambda x: g(p, x), -1, 1, epsabs=1e-14, epsrel=1e-13)
    assert total == pytest.approx(1 / math.sqrt(mu), abs=1e-11)


def test_inverse_transform_recovers_g():
    # g(x) = (1/2pi) int h(t) e^{-ixt} dt, truncated where C_mu t^-mu is tiny
    p = KernelParams(10)
    for x in (0.0, 0.3, 0.8):
        val, _ = quad(lambda t: h(p, t) * math.cos(x * t), 0, 400, limit=800)
        assert val / math.pi == pytest.approx(g(p, x), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(mus, st.floats(0.1, 2000))
def test_asymp_bound_holds(mu, t):
    p = KernelParams(mu)
    assert abs(h(p, t)) <= asymp_bound(p, t)


def test_asymp_bound_rejects_zero():
    with pytest.raises(DomainError):
        asymp_bound(KernelParams(3), 0.0)


@settings(max_examples=40, deadline=None)
@given(mus, st.floats(-1, 1))
def test_peak_at_origin(mu, x):
    p = KernelParams(mu)
    assert g(p, x) <= constants(p).g0


@pytest.mark.parametrize("mu", [10, 20, 50, 100])
def test_peak_close_to_gaussian_normalisation(mu):
    g0 = constants(KernelParams(mu)).g0
    assert abs(g0 * math.sqrt(math.pi) - 1) <= 1 / (4 * mu)
    assert g0 * math.sqrt(math.pi) - 1 == pytest.approx(1 / (8 * mu), rel=0.05)


def test_h_is_even():
    p = KernelParams(5.5)
    t = np.linspace(0, 40, 81)
    assert np.array_equal(h(p, t), h(p, -t))


@pytest.mark.parametrize("z", [0.5j, 3 + 0.5j, -20 - 2j, 10j, 55 + 0.5j])
def test_h_complex_against_mpmath(z):
    p = KernelParams(4)
    k = constants(p)
    ref = mpmath.quad(lambda x: k.g0 * (1 - x * x) ** 3.5 * mpmath.cos(z * x), [-1, 0, 1])
    val, err = h_complex_with_error(p, z)
    assert abs(val - complex(ref)) < 1e-12 * max(1, abs(ref))
    assert err < 1e-12 * max(1, abs(ref))


def test_h_complex_agrees_with_real_h_on_axis():
    p = KernelParams(6)
    for t in (0.0, 1.3, 17.0, 80.0):
        assert h_complex(p, t) == pytest.approx(h(p, t), abs=1e-13)


def test_h_complex_overflow_guard():
    with pytest.raises(NumericError):
        h_complex(KernelParams(3), 1000j)
