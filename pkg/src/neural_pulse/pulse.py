"""Fast traveling pulse: speed-index pair (f, g), base point and Newton solve.

A pulse U(z), z = x + ct, lies above threshold exactly on (0, a).  Writing
S(z) = F(z) - F(z - a) for the synaptic input,

    f(tau, c, eps) = U(0) = int_{-inf}^0 Cx(x) S(x) dx
    g(tau, c, eps) = U(a) = int_{-inf}^a Cx(x - a) S(x) dx,   a = tau/eps,

and the pulse is the root of (f - theta, g - theta).  For eps > 0, g is
evaluated through the split

    g = gamma/(1+gamma) - C(-a) + E1 - E2 - E3 - phi_f(c)

whose pieces all live on intervals of length at most the kernel truncation
radius, so nothing large is subtracted.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .eigen import compute_eigen
from .errors import (ConditioningError, ConsistencyError, HypothesisError,
                     ParameterError, SolveError)
from .front import phi_f, solve_front_speed
from .greens import (eval_C, eval_Cx, eval_D, eval_Dx, eval_G, eval_Gx,  # noqa: F401
                     second_partials)
from .kernels import check_hypotheses
from .quadrature import ExpFilter, integrate

log = logging.getLogger(__name__)

QUAD_TOL = 1e-13
BASE_MARGIN = 1e-10


@dataclass(frozen=True)
class ModelParams:
    theta: float
    gamma: float
    epsilon: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class WaveParams:
    speed: float
    tau: float
    epsilon: float

    @property
    def width(self):
        return self.tau / self.epsilon


def kernel_points(kernel, lo, hi, shifts=(0.0,)):
    """Kernel breakpoints translated by each shift, clipped to (lo, hi)."""
    pts = {p + s for p in kernel.breakpoints for s in shifts}
    return sorted(p for p in pts if lo < p < hi)


def quad(fn, lo, hi, kernel, shifts=(0.0,), tol=QUAD_TOL):
    if hi <= lo:
        return 0.0
    return integrate(fn, lo, hi, tol=tol, points=kernel_points(kernel, lo, hi, shifts))


def _check_wave(tau, c):
    if not (tau > 0 and c > 0):
        raise ParameterError(f"tau and c must be positive, got tau={tau}, c={c}")


def speed_index_f(tau, c, epsilon, kernel, gamma):
    _check_wave(tau, c)
    if epsilon == 0:
        return phi_f(c, kernel)
    eig = compute_eigen(epsilon, gamma)
    a = tau / epsilon
    F = kernel.cumulative
    R = kernel.truncation_radius
    return quad(lambda x: eval_Cx(x, c, eig) * (F(x) - F(x - a)),
                -R, 0.0, kernel, (0.0, a))


def g_components(tau, c, epsilon, kernel, gamma):
    """Pieces of the split of g for eps > 0 (E2 here excludes phi_f)."""
    eig = compute_eigen(epsilon, gamma)
    a = tau / epsilon
    F, T = kernel.cumulative, kernel.upper_tail
    R = kernel.truncation_radius
    cbar = eval_C(-a, c, eig)
    e1 = quad(lambda x: eval_Cx(x - a, c, eig) * (F(x) - F(x - a)),
              -R, 0.0, kernel, (0.0, a))
    i2 = quad(lambda s: eval_Cx(s, c, eig) * F(s), max(-a, -R), 0.0, kernel)
    e3 = quad(lambda x: eval_Cx(x - a, c, eig) * T(x), 0.0, min(a, R), kernel)
    return {"const": gamma / (1 + gamma), "Cbar": cbar, "E1": e1,
            "E2_plus_phi": i2, "E3": e3}


def speed_index_g(tau, c, epsilon, kernel, gamma):
    _check_wave(tau, c)
    if epsilon == 0:
        return (gamma + math.exp(-(1 + gamma) * tau / c)) / (1 + gamma) - phi_f(c, kernel)
    p = g_components(tau, c, epsilon, kernel, gamma)
    return p["const"] - p["Cbar"] + p["E1"] - p["E2_plus_phi"] - p["E3"]


def speed_index_g_direct(tau, c, epsilon, kernel, gamma):
    """g by one quadrature of its defining integral (reference route)."""
    eig = compute_eigen(epsilon, gamma)
    a = tau / epsilon
    F = kernel.cumulative
    R = kernel.truncation_radius
    return quad(lambda x: eval_Cx(x - a, c, eig) * (F(x) - F(x - a)),
                -R, a, kernel, (0.0, a))


def base_point(kernel, theta, gamma, front=None):
    """(tau0, c_f): the eps = 0 root of (f, g) = (theta, theta)."""
    arg = 2 * theta * (1 + gamma) - gamma
    if not (BASE_MARGIN < arg < 1 - BASE_MARGIN):
        raise HypothesisError(
            f"2*theta*(1+gamma) - gamma = {arg} is not inside (0, 1) with margin "
            f"{BASE_MARGIN}; the base width is undefined")
    if front is None:
        front = solve_front_speed(kernel, theta)
    cf = front.speed
    return -(cf / (1 + gamma)) * math.log(arg), cf


@dataclass(frozen=True)
class NewtonReport:
    iterations: int
    residual: float
    condition: float
    trace: tuple = ()


@dataclass(frozen=True)
class PulseSolution:
    """Solved pulse with profile evaluators.

    Profiles use U = sum_i k_i [(F - E_i)(z) - (F - E_i)(z - a)] where E_i is
    the exponential filter of K at rate omega_i/c, so each evaluation costs
    two table lookups per rate.
    """

    params: ModelParams
    wave: WaveParams
    kernel: object
    newton: NewtonReport
    eigen: object = field(repr=False)
    _filters: tuple = field(repr=False, compare=False, default=())

    @property
    def speed(self):
        return self.wave.speed

    @property
    def width(self):
        return self.wave.width

    def _pieces(self, z):
        z = np.asarray(z, dtype=float)
        a = self.width
        F = self.kernel.cumulative
        out = []
        for filt in self._filters:
            e_hi, e_lo = filt.of_kernel(z), filt.of_kernel(z - a)
            j = (F(z) - e_hi) - (F(z - a) - e_lo)
            out.append((j, e_hi - e_lo))
        return out

    def profile(self, z):
        """(U, Q, U', Q') at z."""
        eig, c = self.eigen, self.speed
        (j1, d1), (j2, d2) = self._pieces(z)
        gap, eps = eig.gap, eig.epsilon
        u = ((1 - eig.omega2) / eig.omega1 * j1 - eig.ratio * j2) / gap
        q = (-(eps / eig.omega1) * j1 + eig.eps_over_omega2 * j2) / gap
        du = ((1 - eig.omega2) * d1 - eig.one_minus_omega1 * d2) / (c * gap)
        dq = eps * (d2 - d1) / (c * gap)
        return u, q, du, dq

    def input(self, z):
        """Synaptic drive int_{z-a}^{z} K."""
        F = self.kernel.cumulative
        z = np.asarray(z, dtype=float)
        return F(z) - F(z - self.width)

    def horizon(self, tol=1e-8):
        """(z_lo, z_hi) beyond which |U|, |Q| are below tol."""
        eig, c = self.eigen, self.speed
        R = self.kernel.truncation_radius
        lam1, lam2 = eig.omega1 / c, eig.omega2 / c
        lo = -(R + math.log(1.0 / tol) / lam1)
        hi = self.width + R + math.log(1.0 / tol) / lam2
        return lo, hi


def pulse_profile(solution, z):
    return solution.profile(z)


def _residual(tau, c, eps, kernel, gamma, theta):
    return np.array([speed_index_f(tau, c, eps, kernel, gamma) - theta,
                     speed_index_g(tau, c, eps, kernel, gamma) - theta])


def solve_pulse(kernel, params, init=None, *, eps_max=0.05, tol=1e-10, max_iter=50,
                cond_max=1e12, front=None, check=True):
    """Damped Newton on (f - theta, g - theta) for the fast pulse at params.epsilon."""
    from .jacobian import jacobian_at_base, partials_f, partials_g

    theta, gamma, eps = params.theta, params.gamma, params.epsilon
    if not 0 < eps <= eps_max:
        raise ParameterError(f"epsilon must lie in (0, {eps_max}], got {eps}")
    if check:
        check_hypotheses(kernel, theta, gamma).raise_if_failed()
    eig = compute_eigen(eps, gamma)
    if init is None:
        if front is None:
            front = solve_front_speed(kernel, theta)
        init = jacobian_at_base(kernel, theta, gamma, front=front).predict(eps)
    tau, c = map(float, init)
    _check_wave(tau, c)

    r = _residual(tau, c, eps, kernel, gamma, theta)
    rn = float(np.max(np.abs(r)))
    trace = [(0, tau, c, rn, float("nan"))]
    cond = float("nan")
    for it in range(1, max_iter + 1):
        if rn <= tol:
            break
        ft, fc, _ = partials_f(tau, c, eps, kernel, gamma, with_eps=False)
        gt, gc, _ = partials_g(tau, c, eps, kernel, gamma, with_eps=False)
        J = np.array([[ft, fc], [gt, gc]])
        cond = float(np.linalg.cond(J))
        if not cond < cond_max:
            raise ConditioningError(f"Jacobian condition {cond:.3e} exceeds {cond_max:.1e} "
                                    f"at tau={tau}, c={c}")
        step = np.linalg.solve(J, -r)
        t = 1.0
        while True:
            nt, nc = tau + t * step[0], c + t * step[1]
            if nt > 0 and nc > 0:
                nr = _residual(nt, nc, eps, kernel, gamma, theta)
                nrn = float(np.max(np.abs(nr)))
                if nrn < rn or t < 2 ** -20:
                    break
            t *= 0.5
            if t < 2 ** -20:
                raise SolveError(f"line search stalled at iteration {it}", trace)
        tau, c, r, rn = nt, nc, nr, nrn
        trace.append((it, tau, c, rn, cond))
        log.debug("newton %d: tau=%.15g c=%.15g |r|=%.3e step=%.3g", it, tau, c, rn, t)
    if rn > tol:
        raise SolveError(f"Newton did not reach residual {tol:.1e} in {max_iter} "
                         f"iterations (last {rn:.3e})", trace)

    filters = (ExpFilter(kernel, eig.omega1 / c), ExpFilter(kernel, eig.omega2 / c))
    sol = PulseSolution(params, WaveParams(float(c), float(tau), eps), kernel,
                        NewtonReport(len(trace) - 1, float(rn), cond, tuple(trace)), eig, filters)
    u0 = float(sol.profile(0.0)[0])
    ua = float(sol.profile(sol.width)[0])
    if max(abs(u0 - theta), abs(ua - theta)) > 1e-9:
        raise ConsistencyError(
            f"profile misses threshold at the crossings: U(0)-theta={u0 - theta:.3e}, "
            f"U(a)-theta={ua - theta:.3e}")
    return sol
