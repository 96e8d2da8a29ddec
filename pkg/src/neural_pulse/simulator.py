"""Method-of-lines simulation of the full field equations.

    u_t = -u - q + int K(x - y) H(u(y) - theta) dy
    q_t = eps (u - gamma q)

on [-L, L] with u = q = 0 held at both ends.  The convolution with the
Heaviside of u - theta is exact given the superthreshold set: it is the sum
over superthreshold intervals [s, e] of F(x - s) - F(x - e), with the interval
ends located by linear interpolation of u on the grid.  Time stepping is
classical RK4.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainSizeError, InstabilityError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridConfig:
    L: float = 200.0
    n_points: int = 8001
    dt: float = 0.0125
    t_end: float = 300.0
    tracking_start: float = 200.0
    record_every: float = 0.5
    bump_center: float = None
    bump_width: float = None
    bump_height: float = None

    @property
    def h(self):
        return 2 * self.L / (self.n_points - 1)

    @property
    def x(self):
        return np.linspace(-self.L, self.L, self.n_points)

    def check(self, kernel, front_speed):
        """Raise ConfigError unless the grid resolves kernel and front."""
        h = self.h
        problems = []
        if not (self.L > 0 and self.n_points >= 3 and self.dt > 0):
            problems.append("L, n_points and dt must be positive")
        if h > 1 / (10 * kernel.tail_rho) * (1 + 1e-12):
            problems.append(f"h={h:.4g} exceeds 1/(10 rho)={1 / (10 * kernel.tail_rho):.4g}")
        if h > front_speed / 20 * (1 + 1e-12):
            problems.append(f"h={h:.4g} exceeds c_f/20={front_speed / 20:.4g}")
        if self.dt > h / (4 * front_speed) * (1 + 1e-12):
            problems.append(f"dt={self.dt:.4g} exceeds h/(4 c_f)={h / (4 * front_speed):.4g}")
        if not 0 <= self.tracking_start < self.t_end:
            problems.append("need 0 <= tracking_start < t_end")
        if problems:
            raise ConfigError("; ".join(problems))

    @classmethod
    def for_front(cls, kernel, front_speed, L=200.0, h=0.05, **kw):
        """Grid with the largest admissible step at spacing <= h."""
        h = min(h, 1 / (10 * kernel.tail_rho), front_speed / 20)
        n = int(math.ceil(2 * L / h - 1e-9)) + 1
        h = 2 * L / (n - 1)
        return cls(L=L, n_points=n, dt=h / (4 * front_speed), **kw)


@dataclass
class FieldState:
    u: np.ndarray
    q: np.ndarray
    t: float = 0.0


def superthreshold_intervals(x, u, theta):
    """(starts, ends) of {u > theta} with linearly interpolated ends."""
    above = u > theta
    if not above.any():
        return np.empty(0), np.empty(0)
    edge = np.diff(above.astype(np.int8))
    up = np.nonzero(edge == 1)[0]
    down = np.nonzero(edge == -1)[0]

    def interp(i):
        return x[i] + (theta - u[i]) * (x[i + 1] - x[i]) / (u[i + 1] - u[i])

    starts, ends = interp(up), interp(down)
    if above[0]:
        starts = np.concatenate(([x[0]], starts))
    if above[-1]:
        ends = np.concatenate((ends, [x[-1]]))
    return starts, ends


def synaptic_input(x, u, theta, kernel):
    starts, ends = superthreshold_intervals(x, u, theta)
    out = np.zeros_like(x)
    F = kernel.cumulative
    for s, e in zip(starts, ends):
        out += F(x - s) - F(x - e)
    return out


def _rhs(x, u, q, kernel, theta, gamma, eps):
    du = -u - q + synaptic_input(x, u, theta, kernel)
    dq = eps * (u - gamma * q)
    du[0] = du[-1] = 0.0
    dq[0] = dq[-1] = 0.0
    return du, dq


def step(state, cfg, kernel, params):
    """One RK4 step of size cfg.dt."""
    x = cfg.x
    th, g, eps = params.theta, params.gamma, params.epsilon
    dt = cfg.dt
    u, q = state.u, state.q
    with np.errstate(over="ignore", invalid="ignore"):
        nu, nq = _rk4(x, u, q, dt, kernel, th, g, eps)
    if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(nq))):
        raise InstabilityError(f"non-finite field at t={state.t + dt:.6g}; reduce dt")
    return FieldState(nu, nq, state.t + dt)


def _rk4(x, u, q, dt, kernel, th, g, eps):
    k1u, k1q = _rhs(x, u, q, kernel, th, g, eps)
    k2u, k2q = _rhs(x, u + 0.5 * dt * k1u, q + 0.5 * dt * k1q, kernel, th, g, eps)
    k3u, k3q = _rhs(x, u + 0.5 * dt * k2u, q + 0.5 * dt * k2q, kernel, th, g, eps)
    k4u, k4q = _rhs(x, u + dt * k3u, q + dt * k3q, kernel, th, g, eps)
    nu = u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
    nq = q + dt / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
    return nu, nq


def initial_bump(cfg, theta, front_speed, one_sided=False):
    """Raised cosine of height 2 theta and width 4 c_f (configurable).

    With ``one_sided`` the recovery variable is seeded with a smooth step to
    the right of the bump, so only the leftward wave survives and its back
    forms at once instead of trailing in from the boundary.
    """
    x = cfg.x
    center = 0.75 * cfg.L if cfg.bump_center is None else cfg.bump_center
    width = 4 * front_speed if cfg.bump_width is None else cfg.bump_width
    height = 2 * theta if cfg.bump_height is None else cfg.bump_height
    r = np.abs(x - center) / (0.5 * width)
    u = np.where(r < 1, 0.5 * height * (1 + np.cos(np.pi * np.minimum(r, 1))), 0.0)
    q = np.zeros_like(u)
    if one_sided:
        q = (1 - 2 * theta) * 0.5 * (1 + np.tanh(x - (center + 2.0)))
    u[0] = u[-1] = q[0] = q[-1] = 0.0
    return FieldState(u, q, 0.0)


@dataclass
class ExperimentResult:
    status: str
    measured_speed: float
    measured_width: float
    times: np.ndarray
    front_positions: np.ndarray
    back_positions: np.ndarray
    final: FieldState = field(repr=False, default=None)
    x: np.ndarray = field(repr=False, default=None)

    def to_dict(self):
        return {"status": self.status, "measured_speed": self.measured_speed,
                "measured_width": self.measured_width,
                "n_samples": int(self.times.size)}


def _leading_pulse(x, u, theta):
    """(front, back) of the leftmost superthreshold interval; back may be nan."""
    starts, ends = superthreshold_intervals(x, u, theta)
    if starts.size == 0:
        return math.nan, math.nan
    s = starts[0]
    e = ends[0] if ends.size and ends[0] < x[-1] else math.nan
    return float(s), float(e)


def run_pulse_experiment(cfg, kernel, params, initial=None, *, front_speed,
                         boundary_margin=None, check=True):
    """Evolve a bump and measure the leftward-traveling pulse.

    The speed is minus the least-squares slope of the front (leftmost upward
    crossing) position against time for t >= tracking_start; the width is
    back minus front at the final time.
    """
    if check:
        cfg.check(kernel, front_speed)
    x = cfg.x
    theta = params.theta
    state = initial_bump(cfg, theta, front_speed) if initial is None else initial
    if boundary_margin is None:
        boundary_margin = min(kernel.truncation_radius, 0.1 * cfg.L)
    n_steps = int(round(cfg.t_end / cfg.dt))
    every = max(1, int(round(cfg.record_every / cfg.dt)))
    times, fronts, backs = [], [], []
    status = "ok"
    for k in range(1, n_steps + 1):
        state = step(state, cfg, kernel, params)
        if k % every and k != n_steps:
            continue
        front, back = _leading_pulse(x, state.u, theta)
        if math.isnan(front):
            status = "no pulse formed"
            log.info("wave extinct at t=%.3f", state.t)
            break
        if front < -cfg.L + boundary_margin:
            raise DomainSizeError(
                f"front reached x={front:.3f} within {boundary_margin:.3g} of the boundary "
                f"at t={state.t:.3f}; enlarge L or shorten t_end")
        times.append(state.t)
        fronts.append(front)
        backs.append(back)
    times, fronts, backs = map(np.asarray, (times, fronts, backs))
    speed = width = math.nan
    if status == "ok":
        sel = times >= cfg.tracking_start
        if sel.sum() >= 2:
            speed = -float(np.polyfit(times[sel], fronts[sel], 1)[0])
        width = float(backs[-1] - fronts[-1])
    return ExperimentResult(status, speed, width, times, fronts, backs, state, x)
