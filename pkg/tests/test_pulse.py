import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from conftest import GAMMA, THETA, front, kernel, pulse
from neural_pulse.errors import HypothesisError, ParameterError
from neural_pulse.front import phi_f
from neural_pulse.kernels import make_exponential_kernel
from neural_pulse.pulse import (ModelParams, base_point, pulse_profile, solve_pulse,
                                speed_index_f, speed_index_g, speed_index_g_direct)

TAU0 = -math.log(0.4) / 1.2


def test_base_point_exponential(exp_kernel):
    tau0, cf = base_point(exp_kernel, THETA, GAMMA)
    npt.assert_allclose(tau0, 0.7635756098951228, atol=1e-12)
    npt.assert_allclose(tau0, TAU0, atol=1e-12)
    npt.assert_allclose(cf, 1.0, atol=1e-10)
    npt.assert_allclose(speed_index_g(tau0, cf, 0.0, exp_kernel, GAMMA), THETA, atol=1e-12)


def test_base_point_small_gamma(exp_kernel):
    tau0, cf = base_point(exp_kernel, 0.25, 1e-12)
    npt.assert_allclose(tau0, cf * math.log(2), rtol=1e-9)


def test_base_point_degenerate(exp_kernel):
    # 2 theta (1 + gamma) - gamma == 1 at theta = 0.5 for any gamma
    with pytest.raises(HypothesisError):
        base_point(exp_kernel, 0.5, 0.2)


def test_eps_zero_delegation(exp_kernel, osc_kernel):
    for k in (exp_kernel, osc_kernel):
        assert speed_index_f(0.3, 0.8, 0.0, k, GAMMA) == phi_f(0.8, k)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.3, 3.0))
def test_eps_zero_g_closed_form(tau, c):
    k = make_exponential_kernel(1.0)
    e = math.exp(-(1 + GAMMA) * tau / c)
    expected = GAMMA / (1 + GAMMA) - 1 / (2 * (c + 1)) + e / (1 + GAMMA)
    npt.assert_allclose(speed_index_g(tau, c, 0.0, k, GAMMA), expected, atol=1e-12)


def test_eps_zero_g_large_tau(osc_kernel):
    c = 0.6
    npt.assert_allclose(speed_index_g(200.0, c, 0.0, osc_kernel, GAMMA),
                        GAMMA / (1 + GAMMA) - phi_f(c, osc_kernel), atol=1e-14)


def test_continuity_at_zero(exp_kernel):
    f0 = phi_f(1.0, exp_kernel)
    g0 = speed_index_g(TAU0, 1.0, 0.0, exp_kernel, GAMMA)
    df = [abs(speed_index_f(TAU0, 1.0, e, exp_kernel, GAMMA) - f0) for e in (1e-2, 1e-3, 1e-4)]
    dg = [abs(speed_index_g(TAU0, 1.0, e, exp_kernel, GAMMA) - g0) for e in (1e-2, 1e-3, 1e-4)]
    assert df[0] > df[1] > df[2] and dg[0] > dg[1] > dg[2]
    assert df[2] < 5e-4 and dg[2] < 5e-4


def test_split_g_matches_direct(osc_kernel):
    for tau, c, eps in ((0.5, 0.35, 0.02), (0.3, 0.28, 0.01)):
        npt.assert_allclose(speed_index_g(tau, c, eps, osc_kernel, GAMMA),
                            speed_index_g_direct(tau, c, eps, osc_kernel, GAMMA), atol=1e-10)


def test_solve_first_order():
    s1, s2 = pulse("exp", 0.01), pulse("exp", 0.005)
    npt.assert_allclose(s1.speed, 0.9899185268453493, atol=1e-9)
    npt.assert_allclose(s2.width, 153.19121840675061, rtol=1e-8)
    assert abs(s1.speed - 0.99) <= 5e-4
    ratio = abs(s1.speed - 0.99) / abs(s2.speed - 0.995)
    assert 3 <= ratio <= 5


def test_oscillatory_pulse_solves():
    s = pulse("osc", 0.005)
    npt.assert_allclose([s.speed, s.wave.tau], [0.31203, 0.24005], atol=1e-5)


def test_newton_quadratic(exp_kernel):
    params = ModelParams(THETA, GAMMA, 0.01)
    s = solve_pulse(exp_kernel, params, init=(0.8, 0.97), front=front("exp"))
    r = [row[3] for row in s.newton.trace]
    for a, b in zip(r, r[1:]):
        if 1e-9 < a < 1e-3:
            assert b <= 50 * a * a
    npt.assert_allclose(s.speed, pulse("exp", 0.01).speed, atol=1e-9)


@pytest.mark.parametrize("name,eps", [("exp", 0.005), ("exp", 0.02), ("osc", 0.005)])
def test_profile_properties(name, eps):
    s = pulse(name, eps)
    U, Q, dU, dQ = pulse_profile(s, np.array([0.0, s.width, -50 * s.speed]))
    npt.assert_allclose(U[:2], THETA, atol=1e-9)
    if name == "exp":
        assert abs(U[2]) <= 1e-8 and abs(Q[2]) <= 1e-8
    lo, hi = s.horizon(1e-8)
    U, Q, _, _ = s.profile(np.array([lo, hi]))
    assert np.all(np.abs(U) <= 1e-8) and np.all(np.abs(Q) <= 1e-8)
    z = np.linspace(-10, s.width + 10, 101)
    U, Q, dU, dQ = s.profile(z)
    res = s.speed * dU + U + Q - s.input(z)
    assert np.max(np.abs(res)) <= 1e-7
    res_q = s.speed * dQ - eps * (U - GAMMA * Q)
    assert np.max(np.abs(res_q)) <= 1e-9


def test_recovery_slope_scales_with_eps():
    ratios = []
    for eps in (0.02, 0.01, 0.005):
        s = pulse("exp", eps)
        z = np.linspace(-20, s.width + 40, 4001)
        ratios.append(np.max(np.abs(s.profile(z)[3])) / eps)
    assert max(ratios) / min(ratios) < 1.2


def test_bad_eps(exp_kernel):
    with pytest.raises(ParameterError):
        solve_pulse(exp_kernel, ModelParams(THETA, GAMMA, 0.2))
    with pytest.raises(ParameterError):
        ModelParams(THETA, GAMMA, -0.1)
