import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from selberg.errors import DomainError, IncompleteDataError
from selberg.explicit import (
    CSV_FIELDS,
    ExplicitFormulaReport,
    TestFunctionPair,
    arch_term,
    arch_term_grid,
    cosine_bump_pair,
    gamma_log_derivative,
    gamma_log_derivative_majorant,
    general_explicit_formula,
    kernel_pair,
    pole_term,
    prime_term,
    prime_term_pair,
    reports_to_csv,
    shifted_explicit_formula,
)
from selberg.kernels import KernelParams, constants, g
from selberg.lfunc import GammaFactor, SelbergDatum, chi4, one, zeta
from selberg.zeros import ZeroList, load_zeros


@pytest.fixture(scope="module")
def zeros():
    return load_zeros("zeta_zeros.txt")


def no_zeros():
    return ZeroList(np.array([]), 1e9)


def test_prime_term_zeta_at_origin():
    p = KernelParams(3, 1.0)
    expected = 2 * math.log(2) / math.sqrt(2) * g(p, math.log(2))
    assert prime_term(zeta(100), p, 0.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.1122, abs=5e-5)


def test_prime_term_is_real_and_pairs_conjugate():
    p = KernelParams(4, 6.0)
    first, second = prime_term_pair(chi4(1000), p, np.array([3.0, 17.5]))
    assert np.allclose(first, np.conj(second), atol=1e-15)


def test_prime_term_needs_horizon():
    with pytest.raises(IncompleteDataError, match="403"):
        prime_term(zeta(100), KernelParams(3, 6.0), 0.0)


def test_pole_term_at_origin_is_cosh_integral():
    p = KernelParams(3, 2.0)
    g0 = mpmath.gamma(4) / (mpmath.sqrt(3 * mpmath.pi) * mpmath.gamma(3.5))
    ref = mpmath.quad(lambda x: g0 * (1 - x * x) ** 2.5 * mpmath.cosh(x), [-1, 0, 1])
    pt = pole_term(zeta(10), p, 0.0)
    assert pt.value == pytest.approx(float(2 * ref), rel=1e-13)
    assert pt.literal.imag == pytest.approx(0, abs=1e-15)


def test_pole_readings_differ_off_origin():
    pt = pole_term(zeta(10), KernelParams(3, 4.0), 30.0)
    assert abs(pt.literal.imag) > 1e-9
    assert pt.literal.real == pytest.approx(pt.value)


def test_pole_term_decays():
    p = KernelParams(3, 4.0)
    vals = [abs(pole_term(zeta(10), p, t).value) for t in (10, 100)]
    k = constants(p)
    for t, v in zip((10, 100), vals):
        bound = k.c_mu * math.cosh(p.L / 2) / 1  # |h(z)| <= int g cosh(L/2)
        assert v <= 2 * bound


def test_gamma_log_derivative_zeta_against_mpmath():
    F = zeta(10)
    for r in (0.0, 3.3, 50.0):
        s = mpmath.mpc(0.5, r)
        ref = 2 * float(mpmath.re(0.5 * mpmath.digamma(s / 2)))
        assert gamma_log_derivative(F, r) == pytest.approx(ref, abs=1e-12)
        assert abs(gamma_log_derivative(F, r)) <= gamma_log_derivative_majorant(F, r)


def test_arch_term_against_quad():
    F = zeta(10)
    p = KernelParams(3, 4.0)
    from selberg.kernels import h

    def integrand(r):
        return h(p, p.L * (r - 50.0)) * gamma_log_derivative(F, r)

    ref = sum(quad(integrand, a, a + 1, epsabs=1e-13, limit=200)[0] for a in np.arange(-150, 250, 1.0))
    ref /= 2 * math.pi
    ref += 2 * math.log(F.q_param) * constants(p).g0 / p.L
    val, err = arch_term(F, p, 50.0)
    assert val == pytest.approx(ref, abs=1e-7)
    assert err < 1e-8


def test_arch_term_constant_case():
    # no Gamma-factors, Q = e: H = 2 g_mu(0) / L
    F = SelbergDatum("const", 0, math.e, 1.0, (), {}, 0.0, 1)
    p = KernelParams(5, 3.0)
    val, _ = arch_term(F, p, 7.0)
    assert val == pytest.approx(2 * constants(p).g0 / p.L, rel=1e-14)


def test_arch_grid_matches_single():
    F = chi4(10)
    p = KernelParams(4, 5.0)
    vals, _ = arch_term_grid(F, p, [100.0, 150.0], 1e-9)
    for t, v in zip((100.0, 150.0), vals):
        assert v == pytest.approx(arch_term(F, p, t, 1e-9)[0], abs=1e-8)


def test_one_function_everything_zero():
    rep = shifted_explicit_formula(one(100), no_zeros(), KernelParams(3, 4.0), 5.0)
    assert (rep.zero_side, rep.pole_term, rep.arch_term_H, rep.prime_term_D) == (0, 0, 0, 0)
    assert rep.residual == 0


@pytest.mark.parametrize("t", [20.0, 30.0, 50.0, 80.0])
def test_zeta_residual_within_budget(zeros, t):
    rep = shifted_explicit_formula(zeta(100), zeros, KernelParams(3, 4.0), t)
    assert abs(rep.residual) <= rep.budget
    assert rep.budget < 1e-3


def test_residual_recomputation(zeros):
    rep = shifted_explicit_formula(zeta(100), zeros, KernelParams(3, 4.0), 30.0)
    assert rep.residual == rep.zero_side - rep.pole_term - rep.arch_term_H + rep.prime_term_D
    assert rep.budget == pytest.approx(sum(rep.parts.values()))


def test_truncated_tables_shrink_residual(zeros):
    p = KernelParams(3, 4.0)
    res, bud = [], []
    for H in (40, 60, 120, 250, 500):
        rep = shifted_explicit_formula(zeta(100), zeros.truncated(H), p, 30.0)
        res.append(abs(rep.residual))
        bud.append(rep.budget)
        assert abs(rep.residual) <= rep.budget
    for k in range(len(res) - 1):
        assert res[k + 1] <= res[k] + bud[k + 1]


def test_chi4_residual_within_budget():
    z = load_zeros("chi4_zeros.txt")
    for t in (10.0, 60.0):
        rep = shifted_explicit_formula(chi4(100), z, KernelParams(3, 4.0), t)
        assert rep.pole_term == 0
        assert abs(rep.residual) <= rep.budget


def test_self_difference_is_zero(zeros):
    p = KernelParams(3, 4.0)
    a = shifted_explicit_formula(zeta(100), zeros, p, 30.0)
    b = shifted_explicit_formula(zeta(100), zeros, p, 30.0)
    d = a.minus(b)
    assert (d.zero_side, d.pole_term, d.arch_term_H, d.prime_term_D, d.residual) == (0, 0, 0, 0, 0)


def test_general_pair_reproduces_shifted(zeros):
    p = KernelParams(3, 4.0)
    a = shifted_explicit_formula(zeta(100), zeros, p, 0.0)
    b = general_explicit_formula(zeta(100), zeros, kernel_pair(p, 0.0))
    for x, y in ((a.zero_side, b.zero_side), (a.pole_term, b.pole_term),
                 (a.arch_term_H, b.arch_term_H), (a.prime_term_D, b.prime_term_D)):
        assert x == pytest.approx(y, abs=1e-10)


def test_cosine_bump(zeros):
    pair = cosine_bump_pair(3.0)
    pair.check()
    rep = general_explicit_formula(zeta(100), zeros, pair)
    assert abs(rep.residual) <= rep.budget


def test_cosine_bump_transform_against_quad():
    pair = cosine_bump_pair(3.0)
    for r in (0.0, 0.7, 5.0, 22.0):
        ref, _ = quad(lambda x: float(pair.u(x)), -3, 3, weight="cos", wvar=r, epsabs=1e-14)
        assert float(pair.v(r)) == pytest.approx(ref, abs=1e-12)
        assert abs(float(pair.v(r))) <= pair.v_bound(r)


def test_zero_test_function():
    zero = TestFunctionPair(lambda x: np.zeros(np.shape(x)), lambda r: np.zeros(np.shape(r)) if not isinstance(r, complex) else 0j,
                            2.0, lambda r: 0.0, name="zero")
    rep = general_explicit_formula(zeta(100), load_zeros("zeta_zeros.txt"), zero)
    assert (rep.zero_side, rep.pole_term, rep.arch_term_H, rep.prime_term_D) == (0, 0, 0, 0)


def test_rough_test_function_rejected():
    R = 2.0
    hat = TestFunctionPair(lambda x: np.maximum(0.0, 1 - np.abs(np.asarray(x)) / R), lambda r: 0 * r, R,
                           lambda r: R, name="hat")
    with pytest.raises(DomainError, match="C\\^2"):
        general_explicit_formula(zeta(100), no_zeros(), hat)


def test_csv_is_stable():
    rep = ExplicitFormulaReport(1.0, 2.0, 3.0, 0.1, 0.2, 0.3, 0.4, 1e-9)
    text = reports_to_csv([rep, rep])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert lines[1] == lines[2]
    assert float(lines[1].split(",")[7]) == rep.residual


@settings(max_examples=10, deadline=None)
@given(st.floats(3, 8), st.floats(1.0, 5.0), st.floats(-100, 100))
def test_terms_real_and_finite(mu, L, t):
    p = KernelParams(mu, L)
    F = zeta(200)
    D = prime_term(F, p, t)
    pt = pole_term(F, p, t)
    assert math.isfinite(D) and math.isfinite(pt.value)
    first, second = prime_term_pair(F, p, t)
    assert abs((first + second).imag[0]) < 1e-12 * max(1, abs(D))


@pytest.mark.parametrize("t,L,mu", [
    (14.0, 2.0, 3.0), (25.0, 3.0, 3.0), (40.0, 5.0, 3.0), (60.0, 4.0, 4.0), (100.0, 3.5, 5.0),
    (150.0, 6.0, 6.0), (220.0, 2.5, 3.0), (300.0, 5.0, 8.0), (420.0, 4.0, 3.5), (600.0, 3.0, 10.0),
])
def test_budget_valid_on_parameter_grid(zeros, t, L, mu):
    rep = shifted_explicit_formula(zeta(1000), zeros, KernelParams(mu, L), t)
    assert abs(rep.residual) <= rep.budget
