import functools

import pytest

from neural_pulse.front import solve_front_speed
from neural_pulse.kernels import make_damped_oscillatory_kernel, make_exponential_kernel
from neural_pulse.pulse import ModelParams, solve_pulse

THETA, GAMMA = 0.25, 0.2


@functools.lru_cache(maxsize=None)
def kernel(name):
    if name == "exp":
        return make_exponential_kernel(1.0)
    return make_damped_oscillatory_kernel(0.3)


@functools.lru_cache(maxsize=None)
def front(name, theta=THETA):
    return solve_front_speed(kernel(name), theta)


@functools.lru_cache(maxsize=None)
def pulse(name, eps, theta=THETA, gamma=GAMMA):
    return solve_pulse(kernel(name), ModelParams(theta, gamma, eps), front=front(name, theta))


@pytest.fixture
def exp_kernel():
    return kernel("exp")


@pytest.fixture
def osc_kernel():
    return kernel("osc")


@pytest.fixture
def exp_front():
    return front("exp")


@pytest.fixture
def osc_front():
    return front("osc")


@functools.lru_cache(maxsize=None)
def verified(name, eps):
    """(report, pulse orbit, singular orbit) for a cached solve."""
    from neural_pulse.verification import verify_pulse
    return verify_pulse(pulse(name, eps), front(name))
