"""The eps = 0 front: speed index, speed, profile, back and Evans function."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, FrontExistenceError, ParameterError
from .quadrature import ExpFilter, integrate

log = logging.getLogger(__name__)

WITNESS_LAMBDAS = (-0.5, -0.25, -0.1, 0.1, 0.25, 0.5)
# exp(-40) is far below the quadrature tolerance.
_DECAY_CUT = 40.0


def _lower(c, kernel):
    return max(-kernel.truncation_radius, -_DECAY_CUT * c)


def phi_f(c, kernel, tol=1e-13):
    """F(0) - int_{-inf}^0 exp(x/c) K(x) dx."""
    if not c > 0:
        raise ParameterError(f"speed must be positive, got {c}")
    lo = _lower(c, kernel)
    pts = [p for p in kernel.breakpoints if lo < p < 0]
    weighted = integrate(lambda x: np.exp(x / c) * kernel.eval(x), lo, 0.0,
                         tol=tol, points=pts)
    return kernel.left_mass - weighted


def phi_f_prime(c, kernel, tol=1e-13):
    """(1/c^2) int_{-inf}^0 x exp(x/c) K(x) dx."""
    if not c > 0:
        raise ParameterError(f"speed must be positive, got {c}")
    lo = _lower(c, kernel)
    pts = [p for p in kernel.breakpoints if lo < p < 0]
    val = integrate(lambda x: x * np.exp(x / c) * kernel.eval(x), lo, 0.0,
                    tol=tol, points=pts)
    return val / (c * c)


@dataclass(frozen=True)
class FrontSolution:
    speed: float
    theta: float
    kernel: object
    residual: float
    brackets: tuple = ()
    witness: dict = field(default_factory=dict)
    _filter: object = field(default=None, repr=False, compare=False)

    def profile(self, z):
        """U_f(z) = F(z) - E(z) with E the exp(-(z-x)/c) filter of K."""
        z = np.asarray(z, dtype=float)
        return self.kernel.cumulative(z) - self._filter.of_kernel(z)

    def profile_derivative(self, z):
        return self._filter.of_kernel(z) / self.speed

    def horizon(self, tol=1e-10):
        """Distance beyond which U_f is within tol of its limits."""
        return self.kernel.truncation_radius + self.speed * math.log(1.0 / tol)


def _scan(kernel, theta, lo, hi, n):
    cs = np.geomspace(lo, hi, n)
    vals = np.array([phi_f(c, kernel) - theta for c in cs])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    exact = [cs[i] for i in range(n) if vals[i] == 0.0]
    return [(cs[i], cs[i + 1]) for i in idx], exact


def solve_front_speed(kernel, theta, bracket=(1e-3, 1e3), *, n_scan=81,
                      max_expand=3, tol=1e-10):
    """Unique positive root of phi_f(c) = theta.

    The bracket is scanned on a geometric grid and widened by decades until a
    sign change appears.  More than one sign change is refused.
    """
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ParameterError(f"invalid speed bracket {bracket}")
    for _ in range(max_expand + 1):
        brackets, exact = _scan(kernel, theta, lo, hi, n_scan)
        if brackets or exact:
            break
        lo, hi = lo / 10, hi * 10
    else:
        raise FrontExistenceError(
            f"front existence not established: phi_f - theta has no sign change "
            f"on [{lo * 10:.3g}, {hi / 10:.3g}]")
    if len(brackets) + len(exact) > 1:
        raise FrontExistenceError(
            f"phi_f - theta changes sign {len(brackets) + len(exact)} times on "
            f"{brackets}; refusing to choose a front speed")
    if exact:
        c = float(exact[0])
    else:
        a, b = brackets[0]
        c = brentq(lambda s: phi_f(s, kernel) - theta, a, b, xtol=1e-15,
                   rtol=4 * np.finfo(float).eps, maxiter=200)
    resid = phi_f(c, kernel) - theta
    if abs(resid) > tol:
        raise FrontExistenceError(f"front speed residual {resid:.3e} exceeds {tol:.1e}")

    witness = {}
    for lam in WITNESS_LAMBDAS:
        val = phi_f(c / (lam + 1), kernel) - theta
        witness[lam] = val
        if np.sign(val) != np.sign(lam):
            raise ConsistencyError(
                f"Evans sign witness fails at lambda={lam}: value {val:.3e}")
    log.debug("front speed %.15g (residual %.2e)", c, resid)
    return FrontSolution(float(c), float(theta), kernel, float(resid),
                         tuple(brackets), witness, ExpFilter(kernel, 1.0 / c))


def front_profile(front, z):
    """(U_f(z), U_f'(z))."""
    return front.profile(z), front.profile_derivative(z)


def back_profile(front, z):
    """(U_b, U_b') with U_b = 2 theta - U_f."""
    u, du = front_profile(front, z)
    return 2 * front.theta - u, -du


def evans_front(front, lam, kernel=None):
    """phi_f(c_f/(lam + 1)) - theta."""
    if not lam > -1:
        raise ParameterError(f"lambda must exceed -1, got {lam}")
    kernel = front.kernel if kernel is None else kernel
    return phi_f(front.speed / (lam + 1), kernel) - front.theta
