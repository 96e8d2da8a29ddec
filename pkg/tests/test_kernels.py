import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from neural_pulse.errors import FormatError, HypothesisError, ParameterError
from neural_pulse.kernels import (check_hypotheses, kernel_from_config,
                                  make_damped_oscillatory_kernel, make_exponential_kernel,
                                  make_table_kernel, read_table_csv)
from neural_pulse.quadrature import integrate


def test_exponential_values():
    k = make_exponential_kernel(1.0)
    assert k(0.0) == 0.5
    npt.assert_allclose(k.cumulative(0.0), 0.5, rtol=0, atol=1e-15)
    npt.assert_allclose(k.cumulative(-1.0), 0.5 * math.exp(-1), rtol=1e-15)


def test_oscillatory_peak_and_mass():
    k = make_damped_oscillatory_kernel(0.3)
    npt.assert_allclose(k(0.0), 1.09 / 1.2, rtol=1e-15)
    R = k.truncation_radius
    mass = integrate(k.eval, -R, R, tol=1e-14, points=(0.0,))
    npt.assert_allclose(mass, 1.0, atol=1e-10)


@given(st.floats(0.01, 5.0), st.floats(-60, 60))
def test_oscillatory_even(a, x):
    k = make_damped_oscillatory_kernel(a)
    assert k(x) == k(-x)


@pytest.mark.parametrize("make", [lambda: make_exponential_kernel(1.0),
                                  lambda: make_exponential_kernel(2.5),
                                  lambda: make_damped_oscillatory_kernel(0.3)])
def test_cumulative_plus_upper_tail(make):
    k = make()
    for x in (-7.3, -1.0, 0.0, 0.4, 3.0, 11.0):
        upper = k.integral(x, np.inf)
        npt.assert_allclose(k.cumulative(x) + upper, 1.0, atol=1e-10)
        npt.assert_allclose(k.upper_tail(x), upper, atol=1e-12)


@pytest.mark.parametrize("make", [lambda: make_exponential_kernel(1.0),
                                  lambda: make_damped_oscillatory_kernel(0.3)])
def test_cumulative_derivative_matches_eval(make):
    k = make()
    x = np.array([-5.0, -1.3, -0.2, 0.7, 2.0, 9.0])
    h = 1e-5
    fd = (k.cumulative(x + h) - k.cumulative(x - h)) / (2 * h)
    npt.assert_allclose(fd, k.eval(x), atol=1e-8)


def test_tail_envelope_and_truncation():
    for k in (make_exponential_kernel(1.0), make_damped_oscillatory_kernel(0.3),
              make_damped_oscillatory_kernel(1.7)):
        xs = np.linspace(-80, 80, 40001)
        assert np.all(np.abs(k(xs)) <= k.tail_alpha * np.exp(-k.tail_rho * np.abs(xs)) * (1 + 1e-12))
        assert k.tail_bound(k.truncation_radius) <= 1e-12


def test_exponential_moment():
    k = make_exponential_kernel(1.0)
    npt.assert_allclose(k.abs_moment_left(), 0.5, atol=1e-10)
    npt.assert_allclose(k.abs_moment_right(), 0.5, atol=1e-10)


def test_bad_parameters():
    with pytest.raises(ParameterError):
        make_exponential_kernel(0.0)
    with pytest.raises(ParameterError):
        make_damped_oscillatory_kernel(-1.0)


def _exp_samples(scale=1.0):
    x = np.linspace(-30, 30, 6001)
    return np.column_stack([x, scale * 0.5 * np.exp(-np.abs(x))])


def test_table_matches_exponential():
    k = make_table_kernel(_exp_samples(), 0.5, 1.0)
    assert check_hypotheses(k, 0.25, 0.2).failures() == ["tail_bound"]
    k = make_table_kernel(_exp_samples(), 0.51, 1.0)
    npt.assert_allclose(k.cumulative(0.0), 0.5, atol=1e-6)
    # the spline rounds the kink at 0 slightly
    npt.assert_allclose(k(0.5), 0.5 * math.exp(-0.5), atol=1e-5)
    assert check_hypotheses(k, 0.25, 0.2).passed


def test_table_normalizes():
    k = make_table_kernel(_exp_samples(2.0), 1.0, 1.0)
    npt.assert_allclose(k.integral(-np.inf, np.inf), 1.0, atol=1e-10)
    npt.assert_allclose(k(0.0), 0.5, atol=1e-5)


@pytest.mark.parametrize("samples", [[], [(0.0, 1.0)] * 3,
                                     [(-1, 0.1), (1, 0.2), (0.5, 0.3), (2, 0.1)],
                                     [(0.1, 0.1), (1, 0.2), (2, 0.3), (3, 0.1)]])
def test_table_format_errors(samples):
    with pytest.raises(FormatError):
        make_table_kernel(samples, 1.0, 1.0)


def test_table_tail_violation():
    with pytest.raises(HypothesisError):
        make_table_kernel([(-1, 0.9), (0, 1.0), (0.5, 0.8), (1, 0.9)], 1.0, 1.0)


def test_table_from_config(tmp_path):
    path = tmp_path / "k.csv"
    rows = "\n".join(f"{float(x)!r},{float(k)!r}" for x, k in _exp_samples())
    path.write_text("x,K\n" + rows + "\n")
    assert len(read_table_csv(path)) == 6001
    k = kernel_from_config({"type": "table", "path": "k.csv", "tail_alpha": 0.5,
                            "tail_rho": 1.0}, tmp_path)
    npt.assert_allclose(k.cumulative(0.0), 0.5, atol=1e-6)
    with pytest.raises(FormatError):
        kernel_from_config({"type": "gaussian"})
    with pytest.raises(FormatError):
        read_table_csv(tmp_path / "missing.csv")


def test_hypotheses_examples():
    k = make_exponential_kernel(1.0)
    assert check_hypotheses(k, 0.25, 0.2).passed
    rep = check_hypotheses(k, 0.6, 0.2)
    assert "theta_in_open_half" in rep.failures()
    rep = check_hypotheses(k, 0.25, 1.0)
    assert rep.failures() == ["gamma_ratio_below_theta"]
    with pytest.raises(HypothesisError):
        rep.raise_if_failed()
    assert rep.to_dict()["passed"] is False


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.49), st.floats(0.001, 3.0))
def test_hypothesis_clauses_agree_with_inequalities(theta, gamma):
    rep = check_hypotheses(make_exponential_kernel(1.0), theta, gamma)
    assert rep.passed == (gamma / (1 + gamma) < theta)
