import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from pspectral.ptrig import (arcsinp_quad, cosp, phase_from_cartesian, pi_p, polar, signed_pow,
                             sincosp, sinp, sinp_newton)

P_VALUES = [1.5, 2.0, 3.0, 5.0]


@pytest.mark.parametrize("x, q, expected", [(-2.0, 1.0, -2.0), (-3.0, 2.0, -9.0), (0.5, 3.0, 0.125),
                                            (0.0, 2.5, 0.0)])
def test_signed_pow_examples(x, q, expected):
    assert signed_pow(x, q) == pytest.approx(expected, abs=1e-15)


def test_signed_pow_array_matches_scalar():
    xs = np.linspace(-3, 3, 13)
    assert np.allclose(signed_pow(xs, 1.7), [signed_pow(float(x), 1.7) for x in xs], rtol=0, atol=1e-15)


@given(st.floats(-10, 10), st.sampled_from(P_VALUES), st.booleans())
def test_signed_pow_inverse(x, p, use_p):
    a = p if use_p else p - 1.0
    assert signed_pow(signed_pow(x, a), 1.0 / a) == pytest.approx(x, rel=1e-12, abs=1e-12)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.2, 4.0))
def test_signed_pow_odd_and_increasing(x, y, q):
    assert signed_pow(-x, q) == -signed_pow(x, q)
    if x < y:
        assert signed_pow(x, q) <= signed_pow(y, q)


def test_signed_pow_rejects_nonpositive_exponent():
    with pytest.raises(ValueError):
        signed_pow(1.0, 0.0)


def test_pi_p_examples():
    assert pi_p(2.0) == pytest.approx(math.pi, abs=1e-15)
    assert pi_p(4.0) == pytest.approx(math.pi * math.sqrt(2.0) / 2.0, rel=1e-14)


def test_pi_p_quadrature_p15():
    # endpoint singularity (1-|s|^p)^(-1/p) at s=1 handled with an algebraic weight
    p = 1.5
    val, _ = integrate.quad(lambda s: ((1 - s**p) / (1 - s)) ** (-1 / p) if s < 1 else p ** (-1 / p),
                            0, 1, weight="alg", wvar=(0, -1 / p), epsabs=1e-14, epsrel=1e-14)
    assert pi_p(p) == pytest.approx(2 * val, abs=1e-10)


@pytest.mark.parametrize("p", [0.5, 1.0, -2.0])
def test_rejects_p_at_most_one(p):
    with pytest.raises(ValueError):
        pi_p(p)
    with pytest.raises(ValueError):
        sinp(p, 0.3)


@pytest.mark.parametrize("t", [0.0, math.pi / 6, math.pi / 2, 2.0, -4.0])
def test_circular_case(t):
    assert sinp(2.0, t) == pytest.approx(math.sin(t), abs=1e-14)
    assert cosp(2.0, t) == pytest.approx(math.cos(t), abs=1e-14)


@pytest.mark.parametrize("p", [1.1, 1.5, 3.0, 7.0, 10.0])
def test_quarter_period_values(p):
    assert sinp(p, pi_p(p) / 2) == pytest.approx(1.0, abs=1e-15)
    assert cosp(p, 0.0) == 1.0
    assert sinp(p, 0.0) == 0.0
    assert abs(cosp(p, pi_p(p) / 2)) < 1e-12
    assert abs(cosp(p, -pi_p(p) / 2)) < 1e-12


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_sinp_p3_against_quadrature_root():
    # x solving int_0^x (1 - s^3)^(-1/3) ds = 0.7, by brentq on raw quadrature
    def F(x):
        return integrate.quad(lambda s: (1 - s**3) ** (-1 / 3), 0, x, epsabs=1e-14, epsrel=1e-14)[0]

    x = optimize.brentq(lambda x: F(x) - 0.7, 0.0, 0.99, xtol=1e-15)
    assert sinp(3.0, 0.7) == pytest.approx(x, abs=1e-12)
    assert cosp(3.0, 0.7) == pytest.approx((1 - x**3) ** (1 / 3), abs=1e-12)


@pytest.mark.parametrize("p", [1.2, 1.5, 2.5, 4.0, 8.0])
@pytest.mark.parametrize("frac", [0.01, 0.3, 0.77, 0.999, 0.999999])
def test_beta_route_matches_newton_route(p, frac):
    t = frac * pi_p(p) / 2
    assert sinp(p, t) == pytest.approx(sinp_newton(p, t), abs=1e-12)


@pytest.mark.parametrize("p", [1.5, 3.0, 6.0])
def test_arcsinp_quad_inverts_sinp(p):
    for t in (0.2, 0.6, pi_p(p) / 2 - 1e-3):
        # d(arcsin_p)/dx = 1/cos_p, so one ulp in x is amplified near the quarter period
        tol = 1e-11 + 4e-16 / cosp(p, t)
        assert arcsinp_quad(p, sinp(p, t)) == pytest.approx(t, abs=tol)
    assert 2 * arcsinp_quad(p, 1.0) == pytest.approx(pi_p(p), abs=1e-11)


def test_identity_on_dense_sample():
    rng = np.random.default_rng(0)
    for p in P_VALUES:
        t = rng.uniform(-2 * pi_p(p), 2 * pi_p(p), 10_000)
        s, c = sincosp(p, t)
        assert np.max(np.abs(np.abs(s) ** p + np.abs(c) ** p - 1)) <= 1e-10


@settings(max_examples=200)
@given(st.sampled_from(P_VALUES), st.floats(-20, 20))
def test_symmetries(p, t):
    pp = pi_p(p)
    assert sinp(p, pp - t) == pytest.approx(sinp(p, t), abs=1e-12)
    assert sinp(p, -t) == pytest.approx(-sinp(p, t), abs=1e-13)
    assert sinp(p, t + 2 * pp) == pytest.approx(sinp(p, t), abs=1e-12)
    assert -1.0 <= sinp(p, t) <= 1.0


def test_array_and_scalar_paths_agree():
    p = 2.7
    t = np.linspace(-7, 7, 101)
    s, c = sincosp(p, t)
    for ti, si, ci in zip(t, s, c):
        s1, c1 = sincosp(p, float(ti))
        assert si == pytest.approx(s1, abs=1e-14)
        assert ci == pytest.approx(c1, abs=1e-14)


@pytest.mark.parametrize("p", P_VALUES)
def test_cosp_is_derivative_of_sinp(p):
    t = np.array([-2.0, -0.4, 0.3, 0.9, 2.5, 4.0])
    t = t[np.abs(np.abs(np.mod(t + pi_p(p) / 2, pi_p(p)) - pi_p(p) / 2)) > 0.1]  # stay off cosp zeros
    errs = []
    for h in (1e-4, 1e-5):
        fd = (sinp(p, t + h) - sinp(p, t - h)) / (2 * h)
        errs.append(np.max(np.abs(fd - cosp(p, t))))
    assert errs[0] < 1e-7
    # O(h^2) decay until roundoff (~1e-16/h) takes over
    assert errs[1] < max(errs[0] / 50, 1e-10)


def test_cosp_power_is_c1_across_zero():
    # signed_pow(cosp, p-1) has slope -(p-1) sinp^(p-1); at pi_p/2 that is -(p-1)
    for p in (1.5, 3.0, 5.0):
        h = 1e-6
        t = pi_p(p) / 2
        left = (signed_pow(cosp(p, t), p - 1) - signed_pow(cosp(p, t - h), p - 1)) / h
        right = (signed_pow(cosp(p, t + h), p - 1) - signed_pow(cosp(p, t), p - 1)) / h
        assert left == pytest.approx(-(p - 1), rel=1e-4)
        assert right == pytest.approx(-(p - 1), rel=1e-4)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_phase_from_cartesian_examples(p):
    assert phase_from_cartesian(p, 0.0, 1.0) == 0.0
    assert phase_from_cartesian(p, 2.5, 0.0) == pytest.approx(pi_p(p) / 2, abs=1e-14)
    assert phase_from_cartesian(p, 0.0, -1.0) == pytest.approx(pi_p(p), abs=1e-14)
    assert phase_from_cartesian(p, -1.0, 0.0) == pytest.approx(-pi_p(p) / 2, abs=1e-14)


def test_phase_from_cartesian_circular():
    assert phase_from_cartesian(2.0, 1.0, 1.0) == pytest.approx(math.pi / 4, abs=1e-15)


def test_phase_from_cartesian_rejects_origin():
    with pytest.raises(ValueError):
        phase_from_cartesian(2.0, 0.0, 0.0)


@settings(max_examples=300)
@given(st.sampled_from([1.3, 1.5, 2.0, 3.0, 5.0, 9.0]), st.floats(1e-3, 1e3), st.floats(0.0, 1.0,
                                                                                          exclude_max=True))
def test_phase_inverts_polar_map(p, e, frac):
    phi = -pi_p(p) / 2 + frac * 2 * pi_p(p)
    y, x = polar(p, e, phi)
    assert phase_from_cartesian(p, y, x) == pytest.approx(phi, abs=1e-10)
