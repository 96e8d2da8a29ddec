import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from neural_pulse.kernels import make_damped_oscillatory_kernel, make_exponential_kernel
from neural_pulse.quadrature import ExpFilter, integrate


def test_polynomial_and_smooth():
    npt.assert_allclose(integrate(lambda x: x ** 3, 0, 2), 4.0, rtol=1e-14)
    npt.assert_allclose(integrate(np.sin, 0, math.pi), 2.0, rtol=1e-14)


def test_kinked_integrand_with_breakpoint():
    npt.assert_allclose(integrate(np.abs, -1, 3, points=(0.0,)), 5.0, rtol=1e-14)


def test_gaussian_and_reversed_limits():
    f = lambda x: np.exp(-x * x)
    npt.assert_allclose(integrate(f, -40, 40), math.sqrt(math.pi), rtol=1e-13)
    npt.assert_allclose(integrate(f, 1, -2), -quad(f, -2, 1, epsabs=1e-15)[0], rtol=1e-13)
    val, err = integrate(f, 0, 3, full_output=True)
    assert err < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(-12.0, 12.0))
def test_exp_filter_matches_scipy(lam, z):
    k = make_damped_oscillatory_kernel(0.3)
    filt = ExpFilter(k, lam)
    lo = -k.truncation_radius
    ref, _ = quad(lambda x: math.exp(lam * (x - z)) * float(k(x)), lo, min(z, 0.0),
                  epsabs=1e-14, limit=400)
    if z > 0:
        ref += quad(lambda x: math.exp(lam * (x - z)) * float(k(x)), 0.0, z,
                    epsabs=1e-14, limit=400)[0]
    npt.assert_allclose(filt.of_kernel(z), ref, atol=1e-11)


def test_exp_filter_closed_form():
    # rho = 1 exponential kernel, z <= 0: E(z) = e^z / (2 (1 + lam))
    k = make_exponential_kernel(1.0)
    filt = ExpFilter(k, 2.0)
    z = np.array([-5.0, -1.0, -0.25])
    npt.assert_allclose(filt.of_kernel(z), np.exp(z) / 6.0, rtol=1e-13)
    npt.assert_allclose(filt.of_cumulative(z), (k.cumulative(z) - np.exp(z) / 6) / 2, rtol=1e-12)


def test_exp_filter_rejects_nonpositive_rate():
    with pytest.raises(ValueError):
        ExpFilter(make_exponential_kernel(1.0), 0.0)
