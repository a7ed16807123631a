import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selberg.errors import DomainError
from selberg.kernels import KernelParams, constants
from selberg.lfunc import SelbergDatum, chi4, dirichlet_l, one, perturbed, primes_up_to, zeta
from selberg.verify import (
    asymp_violations,
    condition_ii_ratio,
    g_lower_bound_check,
    lemma_one_check,
    lemma_two_check,
    mean_square_check,
    schedule,
    tail_integral_check,
    thin_set_density_check,
)


def test_schedule_mode_ii():
    s = schedule(math.exp(100), 10, "ii")
    assert s.rho == pytest.approx(100, rel=1e-12)
    assert s.L == pytest.approx(46051.7, rel=1e-6)
    assert s.mu == pytest.approx(23.0259, rel=1e-5)
    assert s.eps == 0.005
    assert s.L / (s.W * s.rho) == 2 * s.mu
    assert s.valid


def test_schedule_mode_i():
    s = schedule(math.exp(100), 10, "i")
    assert s.rho == pytest.approx(21.715, abs=1e-3)
    assert s.L == pytest.approx(6684, rel=1e-3)
    assert s.mu == pytest.approx(15.39, abs=1e-2)
    assert s.L / (s.W * s.rho) == 2 * s.mu


@settings(max_examples=100)
@given(st.floats(5, 700), st.floats(1, 50), st.sampled_from(["i", "ii"]))
def test_schedule_identities(log_T, W, mode):
    try:
        s = schedule(None, W, mode, log_T=log_T)
    except DomainError:
        return
    assert s.L / (s.W * s.rho) == 2 * s.mu
    assert s.eps == 1 / (2 * W * W)
    assert s.valid == (s.mu >= 3)


def test_schedule_domain():
    with pytest.raises(DomainError):
        schedule(3, 10, "ii")
    with pytest.raises(DomainError):
        schedule(math.exp(100), 0.5, "ii")


def test_invalid_schedule_exposed():
    s = schedule(math.exp(5), 1, "ii")
    assert not s.valid
    with pytest.raises(DomainError):
        s.kernel_params()


def test_lemma_one_constant_datum():
    F = SelbergDatum("bare", 0, 1.0, 1.0, (), {}, 0.0, 1)
    for r in lemma_one_check(F, KernelParams(4, 10), [100, 150], 100):
        assert r.measured_H == 0 and r.predicted == 0 and r.scaled_residual == 0


def test_lemma_one_zeta():
    reps = lemma_one_check(zeta(10), KernelParams(4, 10), [1000, 1500, 2000], 1000)
    assert all(r.e_mu >= 1 for r in reps)
    worst = max(r.scaled_residual for r in reps)
    assert worst < 1.0  # recorded constant on this grid: about 0.90


def test_lemma_one_doubling():
    p = KernelParams(4, 10)
    a = lemma_one_check(zeta(10), p, [1000], 1000)[0]
    b = lemma_one_check(zeta(10), p, [2000], 2000)[0]
    growth = b.measured_H - a.measured_H
    expected = constants(p).g0 * math.log(2) / p.L
    assert abs(growth - expected) <= a.e_mu / p.L


def test_lemma_one_grid_outside_range():
    with pytest.raises(DomainError):
        lemma_one_check(zeta(10), KernelParams(4, 10), [500], 1000)


@pytest.mark.parametrize("mu", [3, 4, 6, 10, 15])
def test_tail_integral_below_majorant(mu):
    ti = tail_integral_check(KernelParams(mu), 2 * mu)
    assert ti.holds
    assert ti.numeric / math.exp(-mu) < 3.0


def test_tail_integral_against_quad():
    from scipy.integrate import quad
    from selberg.kernels import h

    p = KernelParams(6)
    ref = 2 * sum(quad(lambda y: abs(h(p, y)), a, a + 1, limit=100, epsabs=1e-14)[0] for a in range(12, 400))
    ti = tail_integral_check(p, 12.0, upper=400.0)
    assert ti.numeric - ti.closure == pytest.approx(ref, rel=1e-6)


def test_tail_integral_monotone():
    p = KernelParams(4)
    vals = [tail_integral_check(p, c).numeric for c in (4, 6, 8, 12)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_tail_warning(caplog):
    tail_integral_check(KernelParams(3), 1.5)
    assert "slow decay" in caplog.text


def test_g_lower_bound_examples():
    assert g_lower_bound_check(2, KernelParams(3, 10)).holds
    r = g_lower_bound_check(7, KernelParams(20, 100))
    assert r.holds and r.g_value > r.lower_bound
    with pytest.raises(DomainError):
        g_lower_bound_check(1000, KernelParams(3, 10))


@settings(max_examples=100)
@given(st.integers(2, 10**6), st.floats(3, 60), st.floats(1, 1000))
def test_g_lower_bound_random(m, mu, L):
    if math.log(m) / L >= 0.5:
        return
    assert g_lower_bound_check(m, KernelParams(mu, L)).holds


def test_g_lower_bound_ratio_tends_to_one():
    r = g_lower_bound_check(2, KernelParams(5, 1e6))
    assert r.g_value / r.lower_bound == pytest.approx(1, abs=1e-10)


def test_mean_square_self_is_zero():
    ms = mean_square_check(zeta(100), zeta(100), KernelParams(3, 3), 50.0)
    assert ms.lhs == 0 and ms.rhs == 0


def test_mean_square_perturbation():
    z = zeta(1000)
    P = perturbed(z, 4, 1.0)
    a = mean_square_check(z, P, KernelParams(3, 3), 50.0, 1024)
    b = mean_square_check(z, P, KernelParams(3, 3), 50.0, 2048)
    assert abs(a.lhs - b.lhs) < 0.01 * b.lhs
    assert a.rhs == pytest.approx(1.0 * (50 + 2) * math.log(2) ** 2 / 4)
    assert a.ratio < 1.0  # recorded constant: about 0.91


def test_lemma_two_self_and_conjugation():
    p = KernelParams(4, 5)
    r = lemma_two_check(zeta(10), zeta(10), p, 100.0, 2, tol=1e-6)
    assert r.integral == 0
    a = lemma_two_check(zeta(10), chi4(10), p, 100.0, 2, tol=1e-6)
    b = lemma_two_check(zeta(10), chi4(10), p, 100.0, 2, tol=1e-6, conjugate=True)
    assert b.integral == pytest.approx(a.integral.conjugate(), abs=1e-14)
    assert a.ratio < 0.01  # recorded constant: about 8.7e-4


def test_lemma_two_degree_mismatch():
    with pytest.raises(DomainError, match="degree"):
        lemma_two_check(zeta(10), one(10), KernelParams(4, 5), 100.0, 2)


def test_thin_set_examples():
    assert thin_set_density_check([], 0.1, [10, 100]) == 0
    assert thin_set_density_check([2], 0.1, [10, 100]) == pytest.approx(10**-0.4)
    assert thin_set_density_check(primes_up_to(100).tolist(), 0.1, [100]) == pytest.approx(25 / 100**0.4)
    assert 25 / 100**0.4 == pytest.approx(3.96, abs=0.01)


def test_thin_set_domain():
    with pytest.raises(DomainError):
        thin_set_density_check([2], 0.6, [10])
    with pytest.raises(DomainError):
        thin_set_density_check([2], 0.1, [10, 5])


def test_condition_ii_ratio_self_zero():
    assert condition_ii_ratio(zeta(), zeta(), 0.1, [2.0, 4.0]) == 0


def test_asymp_violations_none():
    assert asymp_violations(KernelParams(6), np.logspace(-1, 3, 500)) == 0
