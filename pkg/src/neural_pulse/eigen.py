"""Eigenvalues of the linear part A = [[1, 1], [-eps, eps*gamma]]."""

import math
from dataclasses import dataclass

from .errors import ParameterError, RegimeError


@dataclass(frozen=True)
class EigenPair:
    """omega1 > omega2 >= 0 and the quantities derived from them.

    ``ratio_one_minus_omega1_over_omega2`` is (1 - omega1)/omega2 computed as
    1 - omega1*gamma/(1 + gamma), which stays finite at eps = 0.  ``domega1``
    and ``domega2`` are d(omega)/d(eps) at the stored eps.
    """

    omega1: float
    omega2: float
    epsilon: float
    gamma: float
    ratio_one_minus_omega1_over_omega2: float
    one_minus_omega1: float
    gap: float
    domega1: float
    domega2: float

    @property
    def ratio(self):
        return self.ratio_one_minus_omega1_over_omega2

    @property
    def eps_over_omega2(self):
        """eps/omega2 = omega1/(1 + gamma), finite at eps = 0."""
        return self.omega1 / (1 + self.gamma)


def compute_eigen(epsilon, gamma):
    eps = float(epsilon)
    gamma = float(gamma)
    if eps < 0:
        raise ParameterError(f"epsilon must be >= 0, got {eps}")
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    disc = (1 - gamma * eps) ** 2 - 4 * eps
    if disc < 0:
        raise RegimeError(
            f"complex eigenvalues at eps={eps}, gamma={gamma}: not in the fast-pulse regime")
    root = math.sqrt(disc)
    w1 = 0.5 * (1 + gamma * eps + root)
    w2 = eps * (1 + gamma) / w1
    ratio = 1 - w1 * gamma / (1 + gamma)
    one_minus_w1 = w2 * ratio
    if root > 0:
        dw1 = -(1 + gamma - gamma * w1) / root
    else:
        dw1 = -math.inf
    dw2 = gamma - dw1
    return EigenPair(w1, w2, eps, gamma, ratio, one_minus_w1, root, dw1, dw2)


def eigen_derivatives_at_zero(gamma):
    """(omega1'(0), omega2'(0), omega1''(0), omega2''(0))."""
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    g = 1 + gamma
    return (-1.0, g, -2 * g, 2 * g)
