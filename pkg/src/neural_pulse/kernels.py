"""Synaptic coupling kernels and the standing parameter hypotheses."""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import FormatError, HypothesisError, ParameterError
from .quadrature import integrate

# Two-sided tail mass allowed outside the truncation radius.
TAIL_TOL = 1e-14


def truncation_radius(alpha, rho, tol=TAIL_TOL):
    """Smallest R with 2 (alpha/rho) exp(-rho R) <= tol."""
    return max(math.log(2 * alpha / (rho * tol)) / rho, 1.0)


@dataclass(frozen=True)
class KernelSpec:
    """A coupling kernel K with |K(x)| <= tail_alpha * exp(-tail_rho |x|).

    ``eval``, ``cumulative`` and ``upper_tail`` are vectorized; ``upper_tail(x)``
    is the integral of K over [x, inf) and is kept separate from
    ``1 - cumulative`` so right tails keep their relative accuracy.
    """

    name: str
    eval: Callable
    cumulative: Callable
    upper_tail: Callable
    tail_alpha: float
    tail_rho: float
    truncation_radius: float
    breakpoints: tuple = (0.0,)
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.eval(x)

    def tail_bound(self, R):
        """Analytic bound on the kernel mass outside [-R, R]."""
        return 2 * self.tail_alpha / self.tail_rho * math.exp(-self.tail_rho * R)

    @property
    def left_mass(self):
        return float(self.cumulative(0.0))

    def integral(self, lo, hi, weight=None, tol=1e-13):
        """int_lo^hi w(x) K(x) dx with kernel kinks as breakpoints."""
        R = self.truncation_radius
        lo, hi = max(lo, -R), min(hi, R)
        if hi <= lo:
            return 0.0
        if weight is None:
            f = self.eval
        else:
            def f(x):
                return weight(x) * self.eval(x)
        return integrate(f, lo, hi, tol=tol, points=self.breakpoints)

    def abs_moment_left(self):
        """int_{-inf}^0 |x| K(x) dx."""
        return self.integral(-np.inf, 0.0, weight=np.abs)

    def abs_moment_right(self):
        """int_0^inf |x| K(x) dx."""
        return self.integral(0.0, np.inf, weight=np.abs)

    def to_config(self):
        return {"type": self.name, **self.params}


def make_exponential_kernel(rho):
    """K(x) = (rho/2) exp(-rho |x|)."""
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho}")
    rho = float(rho)

    def K(x):
        return 0.5 * rho * np.exp(-rho * np.abs(x))

    def F(x):
        x = np.asarray(x, dtype=float)
        half = 0.5 * np.exp(-rho * np.abs(x))
        return np.where(x <= 0, half, 1.0 - half)

    def T(x):
        return F(-np.asarray(x, dtype=float))

    alpha = 0.5 * rho
    return KernelSpec("exponential", K, F, T, alpha, rho,
                      truncation_radius(alpha, rho), (0.0,), {"rho": rho})


def make_damped_oscillatory_kernel(a):
    """K(x) = ((1 + a^2)/(4a)) exp(-a|x|) (a sin|x| + cos x).

    The antiderivative on x <= 0 is C0 exp(a x)(P sin x + Q cos x) with
    P = (1 - a^2)/(1 + a^2), Q = 2a/(1 + a^2); evenness gives the rest.
    """
    if not a > 0:
        raise ParameterError(f"a must be positive, got {a}")
    a = float(a)
    c0 = (1 + a * a) / (4 * a)
    p = (1 - a * a) / (1 + a * a)
    q = 2 * a / (1 + a * a)

    def K(x):
        s = np.abs(x)
        return c0 * np.exp(-a * s) * (a * np.sin(s) + np.cos(s))

    def left(s):
        # F(-s) for s >= 0
        return c0 * np.exp(-a * s) * (q * np.cos(s) - p * np.sin(s))

    def F(x):
        x = np.asarray(x, dtype=float)
        lx = left(np.abs(x))
        return np.where(x <= 0, lx, 1.0 - lx)

    def T(x):
        return F(-np.asarray(x, dtype=float))

    alpha = c0 * math.sqrt(1 + a * a)
    return KernelSpec("damped_oscillatory", K, F, T, alpha, a,
                      truncation_radius(alpha, a), (0.0,), {"a": a})


def make_table_kernel(samples, tail_alpha, tail_rho):
    """Kernel interpolating (x, K) samples with exponential tails outside.

    Inside the table a shape-preserving cubic (PCHIP) is used; outside, the
    declared envelope rate continues the endpoint values.  The result is
    rescaled to unit mass.  Interpolation sits above a convex envelope between
    samples, so declare tail_alpha with a little margin.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.size == 0:
        raise FormatError("table kernel needs at least one sample")
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise FormatError("table samples must be (position, value) pairs")
    if pts.shape[0] < 4:
        raise FormatError("table kernel needs at least 4 samples")
    x, k = pts[:, 0], pts[:, 1]
    if np.any(np.diff(x) <= 0):
        raise FormatError("table positions must be strictly increasing")
    if not (x[0] < 0 < x[-1]):
        raise FormatError("table must straddle x = 0")
    if not (tail_alpha > 0 and tail_rho > 0):
        raise ParameterError("tail_alpha and tail_rho must be positive")
    slack = 1 + 1e-9
    for xe, ke in ((x[0], k[0]), (x[-1], k[-1])):
        if abs(ke) > tail_alpha * math.exp(-tail_rho * abs(xe)) * slack:
            raise HypothesisError(
                f"endpoint sample K({xe})={ke} violates declared tail bound "
                f"{tail_alpha}*exp(-{tail_rho}|x|)")

    spline = PchipInterpolator(x, k)
    anti = spline.antiderivative()
    rho = float(tail_rho)
    x0, xn, k0, kn = x[0], x[-1], k[0], k[-1]
    left_mass = k0 / rho
    inner = float(anti(xn) - anti(x0))
    total = left_mass + inner + kn / rho
    if not total > 0:
        raise HypothesisError(f"table kernel has non-positive mass {total}")

    def K(x_):
        x_ = np.asarray(x_, dtype=float)
        inside = np.clip(x_, x0, xn)
        val = np.where(x_ < x0, k0 * np.exp(-rho * np.abs(x0 - x_)),
                       np.where(x_ > xn, kn * np.exp(-rho * np.abs(x_ - xn)),
                                spline(inside)))
        return val / total

    def F(x_):
        x_ = np.asarray(x_, dtype=float)
        inside = np.clip(x_, x0, xn)
        val = np.where(
            x_ < x0, left_mass * np.exp(-rho * np.abs(x0 - x_)),
            np.where(x_ > xn, total - kn / rho * np.exp(-rho * np.abs(x_ - xn)),
                     left_mass + anti(inside) - anti(x0)))
        return val / total

    def T(x_):
        x_ = np.asarray(x_, dtype=float)
        inside = np.clip(x_, x0, xn)
        val = np.where(
            x_ > xn, kn / rho * np.exp(-rho * np.abs(x_ - xn)),
            np.where(x_ < x0, total - left_mass * np.exp(-rho * np.abs(x0 - x_)),
                     kn / rho + anti(xn) - anti(inside)))
        return val / total

    alpha = tail_alpha / total
    R = max(truncation_radius(alpha, rho), abs(x0), abs(xn))
    return KernelSpec("table", K, F, T, alpha, rho, R, tuple(x.tolist()),
                      {"tail_alpha": float(tail_alpha), "tail_rho": rho})


def read_table_csv(path):
    """Read ``x,K`` columns from a CSV file into (x, K) pairs."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"x", "K"} <= set(reader.fieldnames):
                raise FormatError(f"{path}: expected columns 'x,K'")
            return [(float(row["x"]), float(row["K"])) for row in reader]
    except OSError as exc:
        raise FormatError(f"cannot read kernel table {path}: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: {exc}") from exc


def kernel_from_config(spec, base_dir="."):
    """Build a kernel from ``{"type": ..., **params}``."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise FormatError("kernel config must be an object with a 'type' field")
    kind = spec["type"]
    if kind == "exponential":
        return make_exponential_kernel(spec.get("rho", 1.0))
    if kind == "damped_oscillatory":
        return make_damped_oscillatory_kernel(spec.get("a", 0.3))
    if kind == "table":
        for key in ("path", "tail_alpha", "tail_rho"):
            if key not in spec:
                raise FormatError(f"table kernel config missing '{key}'")
        path = Path(spec["path"])
        if not path.is_absolute():
            path = Path(base_dir) / path
        kern = make_table_kernel(read_table_csv(path), spec["tail_alpha"], spec["tail_rho"])
        kern.params["path"] = str(spec["path"])
        return kern
    raise FormatError(f"unknown kernel type {kind!r}")


@dataclass
class HypothesisReport:
    clauses: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.clauses.values())

    def failures(self):
        return [name for name, ok in self.clauses.items() if not ok]

    def raise_if_failed(self):
        if not self.passed:
            msg = "; ".join(f"{n}: {self.details.get(n, '')}" for n in self.failures())
            raise HypothesisError(f"hypotheses violated -> {msg}")

    def to_dict(self):
        return {"passed": self.passed,
                "clauses": {n: {"passed": ok, "detail": self.details.get(n, "")}
                            for n, ok in self.clauses.items()}}


def check_hypotheses(kernel, theta, gamma, *, n_samples=20001, mass_tol=1e-10):
    """Evaluate each parameter/kernel clause; never raises."""
    rep = HypothesisReport()

    def put(name, ok, detail):
        rep.clauses[name] = bool(ok)
        rep.details[name] = detail

    left = kernel.left_mass
    put("theta_in_open_half", 0 < theta < 0.5, f"theta={theta}")
    put("theta_below_left_mass", theta < left,
        f"theta={theta}, int_(-inf,0] K={left:.12g}")
    ratio = gamma / (1 + gamma) if gamma > -1 else float("inf")
    put("gamma_positive", gamma > 0, f"gamma={gamma}")
    put("gamma_ratio_below_theta", ratio < theta,
        f"gamma/(1+gamma)={ratio:.12g}, theta={theta}")

    R = kernel.truncation_radius
    xs = np.linspace(-1.5 * R, 1.5 * R, n_samples)
    env = kernel.tail_alpha * np.exp(-kernel.tail_rho * np.abs(xs))
    excess = np.max(np.abs(kernel.eval(xs)) - env * (1 + 1e-9))
    put("tail_bound", excess <= 0, f"max(|K| - envelope) = {excess:.3e}")

    mass = kernel.integral(-np.inf, np.inf)
    put("unit_mass", abs(mass - 1) <= mass_tol + kernel.tail_bound(R),
        f"int K = {mass:.15g}")
    return rep
