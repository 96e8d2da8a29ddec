"""Numerical certification of a solved pulse.

Checks that U - theta changes sign exactly twice (transversally, at 0 and a),
measures the Hausdorff distance between the pulse orbit and the singular
orbit built from the front, back and the two critical lines, and reports
region-wise closeness to those pieces.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .errors import ParameterError, ResolutionError
from .quadrature import integrate

log = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 1e-3
DEFAULT_BUDGET = 2_000_000
DEFAULT_HAUSDORFF_BOUND = 0.25
TRANSVERSAL_TOL = 1e-6


@dataclass(frozen=True)
class OrbitCurve:
    points: np.ndarray
    z_values: np.ndarray = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
            raise ValueError("orbit curve needs a non-empty (N, 2) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("orbit curve contains non-finite points")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    def max_spacing(self):
        if len(self) < 2:
            return 0.0
        return float(np.max(np.hypot(*np.diff(self.points, axis=0).T)))


@dataclass(frozen=True)
class SingularOrbit:
    front_segment: OrbitCurve
    right_manifold: OrbitCurve
    back_segment: OrbitCurve
    left_manifold: OrbitCurve

    def curves(self):
        return [self.front_segment, self.right_manifold, self.back_segment,
                self.left_manifold]

    def named(self):
        return {"front": self.front_segment, "right_manifold": self.right_manifold,
                "back": self.back_segment, "left_manifold": self.left_manifold}


def _adaptive_curve(fn, z_lo, z_hi, resolution, budget, n0=4001):
    """Sample z -> (U, Q) until consecutive points are within resolution."""
    z = np.linspace(z_lo, z_hi, n0)
    pts = fn(z)
    while True:
        gaps = np.hypot(*np.diff(pts, axis=0).T)
        bad = np.nonzero(gaps > resolution)[0]
        if bad.size == 0:
            return OrbitCurve(pts, z)
        if z.size + bad.size > budget:
            raise ResolutionError(
                f"orbit sampling needs more than {budget} points at resolution {resolution}")
        if np.min(z[bad + 1] - z[bad]) < 1e-12 * max(1.0, abs(z_hi - z_lo)):
            raise ResolutionError("orbit jumps between adjacent parameter values")
        zm = 0.5 * (z[bad] + z[bad + 1])
        z = np.insert(z, bad + 1, zm)
        pts = np.insert(pts, bad + 1, fn(zm), axis=0)


def _line(p0, p1, resolution):
    n = max(int(math.ceil(math.dist(p0, p1) / resolution)), 1) + 1
    t = np.linspace(0.0, 1.0, n)[:, None]
    return OrbitCurve((1 - t) * np.asarray(p0) + t * np.asarray(p1))


def build_singular_orbit(front, theta, gamma=None, *, resolution=DEFAULT_RESOLUTION,
                         tail_tol=1e-10, budget=DEFAULT_BUDGET):
    """Front (Q=0), right line U=1-Q, back (Q=1-2theta), left line U=-Q."""
    Z = front.horizon(tail_tol)
    top = 1 - 2 * theta

    def front_pts(z):
        return np.column_stack((front.profile(z), np.zeros_like(z)))

    def back_pts(z):
        return np.column_stack((2 * theta - front.profile(z), np.full_like(z, top)))

    return SingularOrbit(
        _adaptive_curve(front_pts, -Z, Z, resolution, budget),
        _line((1.0, 0.0), (2 * theta, top), resolution),
        _adaptive_curve(back_pts, -Z, Z, resolution, budget),
        _line((2 * theta - 1, top), (0.0, 0.0), resolution),
    )


def sample_pulse_orbit(solution, window=None, resolution=DEFAULT_RESOLUTION,
                       budget=DEFAULT_BUDGET):
    """Adaptively sampled (U, Q) polyline of the pulse over ``window``."""
    if window is None:
        window = solution.horizon(1e-7)
    lo, hi = window

    def pts(z):
        u, q, _, _ = solution.profile(z)
        return np.column_stack((u, q))

    return _adaptive_curve(pts, lo, hi, resolution, budget)


def _as_polylines(obj):
    if isinstance(obj, SingularOrbit):
        return [c.points for c in obj.curves()]
    if isinstance(obj, OrbitCurve):
        return [obj.points]
    return [np.asarray(obj, dtype=float)]


def _segments(polylines):
    p0, p1 = [], []
    for pts in polylines:
        if len(pts) == 1:
            p0.append(pts)
            p1.append(pts)
        else:
            p0.append(pts[:-1])
            p1.append(pts[1:])
    return np.concatenate(p0), np.concatenate(p1)


def _seg_dist2(x, p0, d, dd):
    """Squared distances from points x (n,2) to segments (m,) given per point."""
    rel = x - p0
    t = np.where(dd > 0, np.clip(np.einsum("nk,nk->n", rel, d) / np.where(dd > 0, dd, 1.0),
                                 0.0, 1.0), 0.0)
    diff = rel - t[:, None] * d
    return np.einsum("nk,nk->n", diff, diff)


def _brute_min(points, p0, d, dd, chunk_pairs=2_000_000):
    out = np.empty(points.shape[0])
    step = max(1, chunk_pairs // p0.shape[0])
    for i in range(0, points.shape[0], step):
        x = points[i:i + step]
        n = x.shape[0]
        d2 = _seg_dist2(np.repeat(x, p0.shape[0], axis=0), np.tile(p0, (n, 1)),
                        np.tile(d, (n, 1)), np.tile(dd, n))
        out[i:i + step] = np.min(d2.reshape(n, -1), axis=1)
    return out


def directed_distance(points, polylines, k=16):
    """max over points of the distance to the nearest segment of polylines.

    Candidate segments come from a KD-tree on segment midpoints.  A segment
    outside the k nearest midpoints lies at least (k-th midpoint distance -
    half the longest segment) away.  Points where that bound does not settle
    the minimum are retried with 8x more candidates, then by brute force, so
    the result is exact.
    """
    p0, p1 = _segments(polylines)
    d = p1 - p0
    dd = np.einsum("ij,ij->i", d, d)
    m = p0.shape[0]
    half = 0.5 * math.sqrt(float(np.max(dd)))
    tree = cKDTree(p0 + 0.5 * d)
    best = np.full(points.shape[0], np.inf)
    todo = np.arange(points.shape[0])
    while todo.size:
        kk = min(k, m)
        if kk == m or kk > 4096:
            best[todo] = _brute_min(points[todo], p0, d, dd)
            break
        dm, idx = tree.query(points[todo], k=kk)
        n = todo.size
        flat = idx.ravel()
        d2 = _seg_dist2(np.repeat(points[todo], kk, axis=0), p0[flat], d[flat],
                        dd[flat]).reshape(n, kk)
        best[todo] = np.min(d2, axis=1)
        todo = todo[np.sqrt(best[todo]) > dm[:, -1] - half]
        k *= 8
    return float(np.sqrt(np.max(best)))


def hausdorff_distance(A, B):
    """Symmetric Hausdorff distance between polylines (point-to-segment)."""
    pa, pb = _as_polylines(A), _as_polylines(B)
    if any(len(p) == 0 for p in pa + pb):
        raise ValueError("Hausdorff distance needs non-empty curves")
    return max(directed_distance(np.concatenate(pa), pb),
               directed_distance(np.concatenate(pb), pa))


@dataclass
class VerificationReport:
    crossings: list
    hausdorff: float = None
    hausdorff_bound: float = DEFAULT_HAUSDORFF_BOUND
    region_metrics: dict = field(default_factory=dict)
    tail_bounds: dict = field(default_factory=dict)
    width: float = float("nan")
    notes: list = field(default_factory=list)

    @property
    def crossings_ok(self):
        if len(self.crossings) != 2:
            return False
        (z1, d1, s1), (z2, d2, s2) = self.crossings
        tails = all(b < 0 for b in self.tail_bounds.values()) if self.tail_bounds else True
        return (d1 > 0 and d2 < 0 and abs(s1) > TRANSVERSAL_TOL
                and abs(s2) > TRANSVERSAL_TOL and tails)

    @property
    def passed(self):
        ok = self.crossings_ok
        if self.hausdorff is not None:
            ok = ok and self.hausdorff < self.hausdorff_bound
        return ok

    def to_dict(self):
        return {
            "passed": self.passed,
            "crossings": len(self.crossings),
            "crossing_list": [{"z": z, "direction": "up" if d > 0 else "down", "slope": s}
                              for z, d, s in self.crossings],
            "crossing_offsets": self.crossing_offsets(),
            "hausdorff": self.hausdorff,
            "hausdorff_bound": self.hausdorff_bound,
            "region_metrics": self.region_metrics,
            "tail_bounds": self.tail_bounds,
            "notes": list(self.notes),
        }

    def crossing_offsets(self):
        if len(self.crossings) != 2:
            return None
        return [self.crossings[0][0], self.crossings[1][0] - self.width]


def _tail_bounds(solution, z_lo, z_hi):
    """Upper bounds on U - theta for z <= z_lo and z >= z_hi.

    Beyond the truncation radius the source is constant up to the kernel tail
    mass and each filter term is a decaying exponential, so the bound at the
    window edge holds for the whole half-line.  Negative means certified.
    """
    eig = solution.eigen
    kern = solution.kernel
    R = kern.truncation_radius
    a = solution.width
    k1 = (1 - eig.omega2) / (eig.omega1 * eig.gap)
    k2 = abs(eig.ratio) / eig.gap
    tail = kern.tail_bound(R)
    theta = solution.params.theta
    out = {}
    if z_lo <= -R:
        env = kern.tail_alpha / kern.tail_rho * math.exp(-kern.tail_rho * abs(z_lo))
        out["left"] = 2 * (k1 + k2) * (env + tail) - theta
    if z_hi >= a + R:
        # U(z) = s1 exp(-lam1 (z - z_hi)) + s2 exp(-lam2 (z - z_hi)) + O(tail)
        f1, f2 = solution._filters
        s1 = k1 * (f1.of_kernel(z_hi - a) - f1.of_kernel(z_hi))
        s2 = -(eig.ratio / eig.gap) * (f2.of_kernel(z_hi - a) - f2.of_kernel(z_hi))
        out["right"] = max(s1, 0.0) + max(s2, 0.0) + 4 * (k1 + k2) * tail - theta
    return out


def verify_threshold_pattern(solution, grid=None, *, z_pad=None, step=None,
                             xtol=1e-10):
    """Locate every sign change of U - theta and check the two-crossing pattern.

    ``grid`` may be an explicit array of z values; otherwise a uniform scan of
    [-z_pad, a + z_pad] with the given step is used.
    """
    c, a = solution.speed, solution.width
    theta = solution.params.theta
    R = solution.kernel.truncation_radius
    if z_pad is None:
        z_pad = 10 * c + R
    if grid is None:
        if step is None:
            step = min(0.02, c / 50)
        n = int(math.ceil((a + 2 * z_pad) / step))
        # half-step offset keeps the exact crossings 0 and a off the grid
        grid = -z_pad + (np.arange(n + 1) + 0.5) * step
    z = np.asarray(grid, dtype=float)
    u = solution.profile(z)[0] - theta

    def ufn(s):
        return float(solution.profile(s)[0]) - theta

    crossings = []
    sgn = np.sign(u)
    for i in np.nonzero(sgn[:-1] * sgn[1:] <= 0)[0]:
        if sgn[i] == 0 and i > 0:
            continue
        lo, hi = z[i], z[i + 1]
        root = lo if u[i] == 0 else (hi if u[i + 1] == 0 else
                                     brentq(ufn, lo, hi, xtol=xtol, rtol=1e-15))
        slope = float(solution.profile(root)[2])
        crossings.append((float(root), 1 if u[i + 1] > u[i] else -1, slope))

    rep = VerificationReport(crossings, width=a)
    rep.tail_bounds = _tail_bounds(solution, float(z[0]), float(z[-1]))
    for name, b in rep.tail_bounds.items():
        if b >= 0:
            rep.notes.append(f"{name} tail not certified below threshold (margin {b:.3e})")
    for zc, _, s in crossings:
        if abs(s) <= TRANSVERSAL_TOL:
            rep.notes.append(f"near-tangent crossing at z={zc:.6g} (U'={s:.2e})")
    if len(crossings) != 2:
        rep.notes.append(f"found {len(crossings)} threshold crossings, expected 2")
    return rep


def _abs_mass_beyond(kernel, z0):
    R = kernel.truncation_radius
    if z0 >= R:
        return kernel.tail_bound(z0)
    absk = lambda x: np.abs(kernel.eval(x))  # noqa: E731
    pts = [p for p in kernel.breakpoints if z0 < abs(p) < R]
    return (integrate(absk, -R, -z0, points=[-p for p in pts] + pts, tol=1e-12)
            + integrate(absk, z0, R, points=pts + [-p for p in pts], tol=1e-12)
            + kernel.tail_bound(R))


def default_z0(kernel, front, delta=0.01, z_max=None, step=0.25):
    """Smallest z0 with int_{|x|>z0}|K| < delta and front tails within delta/4."""
    z_max = kernel.truncation_radius + 10 * front.speed if z_max is None else z_max
    for z0 in np.arange(step, z_max + step, step):
        zz = np.array([-z0, z0])
        u, du = front.profile(zz), front.profile_derivative(zz)
        if max(abs(u[0]), abs(1 - u[1]), abs(du[0]), abs(du[1])) >= delta / 4:
            continue
        if _abs_mass_beyond(kernel, z0) < delta:
            return float(z0)
    raise ParameterError(f"no z0 <= {z_max} meets the tail conditions for delta={delta}")


def region_closeness(solution, front, z0=None, *, delta=0.01, step=None):
    """Suprema of the deviations from the singular orbit on R1..R4."""
    if z0 is None:
        z0 = default_z0(solution.kernel, front, delta)
    a, c = solution.width, solution.speed
    if not a > 2 * z0:
        raise ParameterError(f"regions overlap: width a={a:.6g} <= 2*z0={2 * z0:.6g}")
    theta = solution.params.theta
    step = min(0.02, c / 50) if step is None else step
    lo, hi = solution.horizon(1e-8)

    def grid(l, r, closed=True):
        n = max(int(math.ceil((r - l) / step)), 2)
        g = np.linspace(l, r, n + 1)
        return g if closed else g[1:-1]

    z1 = grid(min(lo, -z0 - 1), z0)
    U, Q, dU, _ = solution.profile(z1)
    r1 = float(np.max(np.abs(U - front.profile(z1))))
    r1d = float(np.max(np.abs(dU - front.profile_derivative(z1))))

    z3 = grid(a - z0, a + z0)
    U3, _, dU3, _ = solution.profile(z3)
    r3 = float(np.max(np.abs(U3 - (2 * theta - front.profile(z3 - a)))))
    r3d = float(np.max(np.abs(dU3 + front.profile_derivative(z3 - a))))

    z2 = grid(z0, a - z0, closed=False)
    U2, Q2, _, _ = solution.profile(z2)
    r2 = float(np.max(np.abs(U2 - (1 - Q2))))

    z4 = grid(a + z0, max(hi, a + z0 + 1), closed=False)
    U4, Q4, _, _ = solution.profile(z4)
    r4 = float(np.max(np.abs(U4 + Q4)))
    band = math.sqrt(2) * delta
    return {
        "z0": float(z0),
        "R1_front": r1, "R1_front_derivative": r1d,
        "R2_band": r2, "R2_within_band": r2 < band,
        "R3_back": r3, "R3_back_derivative": r3d,
        "R4_band": r4, "R4_within_band": r4 < band,
        "band": band,
        "Q_increasing_R2": bool(np.all(np.diff(Q2) > 0)),
        "Q_decreasing_R4": bool(np.all(np.diff(Q4) < 0)),
        "max_Q": float(max(np.max(Q), np.max(Q2), np.max(solution.profile(z3)[1]),
                           np.max(Q4))),
    }


def verify_pulse(solution, front, *, hausdorff_bound=DEFAULT_HAUSDORFF_BOUND,
                 resolution=DEFAULT_RESOLUTION, z0=None, delta=0.01, regions=True):
    """Full report: crossings, Hausdorff distance to the singular orbit, regions."""
    rep = verify_threshold_pattern(solution)
    theta, gamma = solution.params.theta, solution.params.gamma
    s0 = build_singular_orbit(front, theta, gamma, resolution=resolution)
    orbit = sample_pulse_orbit(solution, resolution=resolution)
    rep.hausdorff = hausdorff_distance(orbit, s0)
    rep.hausdorff_bound = hausdorff_bound
    if regions:
        try:
            rep.region_metrics = region_closeness(solution, front, z0, delta=delta)
        except ParameterError as exc:
            rep.notes.append(str(exc))
    return rep, orbit, s0
