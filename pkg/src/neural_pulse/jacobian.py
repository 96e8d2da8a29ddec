"""Partial derivatives of the speed-index pair and first-order asymptotics.

For eps > 0 the partials are quadratures of the differentiated integrands
(second partials Cxx, Cxc, Cx_eps from ``greens``).  At eps = 0 they have
closed forms in terms of phi_f, phi_f' and two kernel moments; these give
det J and the slopes tau'(0), c'(0) of the pulse branch.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .eigen import compute_eigen
from .errors import ConditioningError, ConsistencyError
from .front import phi_f, phi_f_prime, solve_front_speed
from .greens import (eval_Ceps, eval_Cx, eval_Cxc, eval_Cxeps, eval_Cxx,
                     second_partials)
from .pulse import base_point, quad

__all__ = ["second_partials", "partials_f", "partials_g", "g_component_partials",
           "JacobianAtBase", "jacobian_at_base"]

# exp(-700) is the edge of double range; kernel terms beyond it are zero.
EXP_CUTOFF = 700.0


def _kernel_shift_negligible(tau, epsilon, kernel):
    return kernel.tail_rho * tau / epsilon > EXP_CUTOFF


def partials_f(tau, c, epsilon, kernel, gamma, *, with_eps=True):
    """(f_tau, f_c, f_eps) for eps > 0."""
    eig = compute_eigen(epsilon, gamma)
    a = tau / epsilon
    F, K = kernel.cumulative, kernel.eval
    R = kernel.truncation_radius
    shifts = (0.0, a)

    if _kernel_shift_negligible(tau, epsilon, kernel):
        shift_int = 0.0
    else:
        shift_int = quad(lambda x: eval_Cx(x, c, eig) * K(x - a),
                         max(-R, a - R), 0.0, kernel, shifts)
    f_tau = shift_int / epsilon
    f_c = quad(lambda x: eval_Cxc(x, c, eig) * (F(x) - F(x - a)), -R, 0.0, kernel, shifts)
    f_eps = None
    if with_eps:
        f_eps = (quad(lambda x: eval_Cxeps(x, c, eig) * (F(x) - F(x - a)),
                      -R, 0.0, kernel, shifts)
                 - tau / epsilon ** 2 * shift_int)
    return f_tau, f_c, f_eps


def g_component_partials(tau, c, epsilon, kernel, gamma, *, with_eps=True,
                         with_phi=True):
    """Partials of each piece of g = gamma/(1+gamma) - Cbar - phi_f + E1 - E2 - E3.

    Returns {name: (d_tau, d_c, d_eps)} for Cbar, E1, E2, E3 and phi_f.
    E2's c-partial includes the -phi_f' term only when ``with_phi``.
    """
    eig = compute_eigen(epsilon, gamma)
    a = tau / epsilon
    F, K, T = kernel.cumulative, kernel.eval, kernel.upper_tail
    R = kernel.truncation_radius
    shifts = (0.0, a)
    s2 = tau / epsilon ** 2
    negligible = _kernel_shift_negligible(tau, epsilon, kernel)

    cx_a = eval_Cx(-a, c, eig)
    cbar = (-cx_a / epsilon,
            (a / c) * cx_a,
            s2 * cx_a + eval_Ceps(-a, c, eig) if with_eps else None)

    def W(x):
        return F(x) - F(x - a)

    e1_w_xx = quad(lambda x: eval_Cxx(x - a, c, eig) * W(x), -R, 0.0, kernel, shifts)
    if negligible:
        e1_k = 0.0
    else:
        e1_k = quad(lambda x: eval_Cx(x - a, c, eig) * K(x - a),
                    max(-R, a - R), 0.0, kernel, shifts)
    e1 = (-e1_w_xx / epsilon + e1_k / epsilon,
          quad(lambda x: eval_Cxc(x - a, c, eig) * W(x), -R, 0.0, kernel, shifts),
          (s2 * e1_w_xx
           + quad(lambda x: eval_Cxeps(x - a, c, eig) * W(x), -R, 0.0, kernel, shifts)
           - s2 * e1_k) if with_eps else None)

    lo2 = max(-a, -R)
    bnd = 0.0 if negligible else cx_a * float(F(-a))
    dphi = phi_f_prime(c, kernel) if with_phi else 0.0
    e2 = (bnd / epsilon,
          quad(lambda s: eval_Cxc(s, c, eig) * F(s), lo2, 0.0, kernel) - dphi,
          (-s2 * bnd + quad(lambda s: eval_Cxeps(s, c, eig) * F(s), lo2, 0.0, kernel))
          if with_eps else None)

    hi3 = min(a, R)
    t_a = 0.0 if negligible else float(T(a)) / c  # Cx(0) = 1/c
    e3_xx = quad(lambda x: eval_Cxx(x - a, c, eig) * T(x), 0.0, hi3, kernel)
    e3 = (t_a / epsilon - e3_xx / epsilon,
          quad(lambda x: eval_Cxc(x - a, c, eig) * T(x), 0.0, hi3, kernel),
          (-s2 * t_a + s2 * e3_xx
           + quad(lambda x: eval_Cxeps(x - a, c, eig) * T(x), 0.0, hi3, kernel))
          if with_eps else None)
    return {"Cbar": cbar, "E1": e1, "E2": e2, "E3": e3, "phi_f": (0.0, dphi, 0.0)}


def _assemble(parts):
    out = []
    for i in range(3):
        if parts["E1"][i] is None:
            out.append(None)
            continue
        out.append(-parts["Cbar"][i] - parts["phi_f"][i] + parts["E1"][i]
                   - parts["E2"][i] - parts["E3"][i])
    return tuple(out)


def partials_g(tau, c, epsilon, kernel, gamma, *, with_eps=True):
    """(g_tau, g_c, g_eps) for eps > 0, summed from the componentwise partials."""
    # phi_f' enters E2_c and the -phi_f term with opposite signs; skip both.
    parts = g_component_partials(tau, c, epsilon, kernel, gamma, with_eps=with_eps,
                                 with_phi=False)
    return _assemble(parts)


@dataclass(frozen=True)
class JacobianAtBase:
    tau0: float
    c_f: float
    f_tau: float
    f_c: float
    f_eps: float
    g_tau: float
    g_c: float
    g_eps: float
    det: float
    tau_prime0: float
    c_prime0: float
    components: dict = field(default_factory=dict)

    def predict(self, epsilon):
        """First-order (tau, c) at epsilon."""
        return self.tau0 + self.tau_prime0 * epsilon, self.c_f + self.c_prime0 * epsilon

    def to_dict(self):
        keys = ("tau0", "c_f", "f_tau", "f_c", "f_eps", "g_tau", "g_c", "g_eps",
                "tau_prime0", "c_prime0")
        out = {k: getattr(self, k) for k in keys}
        out["det_J"] = self.det
        return out


def jacobian_at_base(kernel, theta, gamma, *, front=None, agree_tol=1e-12):
    """All six partials at (tau0, c_f, 0) from their closed-form limits."""
    if front is None:
        front = solve_front_speed(kernel, theta)
    tau, c = base_point(kernel, theta, gamma, front=front)
    phi = phi_f(c, kernel)
    dphi = phi_f_prime(c, kernel)
    m_left = kernel.abs_moment_left()
    m_right = kernel.abs_moment_right()
    m_left_weighted = kernel.integral(-np.inf, 0.0, weight=lambda x: -x * np.exp(x / c))
    e = math.exp(-(1 + gamma) * tau / c)

    f_tau = 0.0
    f_c = dphi
    f_eps = 2 * phi - (m_left_weighted + m_left) / c
    g_tau = -e / c
    g_c = tau / c ** 2 * e - dphi
    g_eps = (2 - tau / c) * e - e * m_left / c - f_eps + e * m_right / c

    comp = {
        "Cbar": (e / c, -tau / c ** 2 * e, (tau / c - 2) * e),
        "E1": (0.0, 0.0, -e * m_left / c),
        "E2": (0.0, 0.0, f_eps),
        "E3": (0.0, 0.0, -e * m_right / c),
        "phi_f": (0.0, dphi, 0.0),
    }
    g_sum = _assemble(comp)
    for name, assembled, summed in zip(("g_tau", "g_c", "g_eps"),
                                       (g_tau, g_c, g_eps), g_sum):
        if abs(assembled - summed) > agree_tol * max(1.0, abs(assembled)):
            raise ConsistencyError(f"{name}: assembled {assembled!r} and componentwise "
                                   f"{summed!r} limits disagree")

    det = f_tau * g_c - f_c * g_tau
    if abs(det) < 1e-14:
        raise ConditioningError(f"singular Jacobian at the base point (det={det:.3e})")
    tau_p = -(g_c * f_eps - f_c * g_eps) / det
    c_p = -f_eps / f_c
    vals = map(float, (tau, c, f_tau, f_c, f_eps, g_tau, g_c, g_eps, det, tau_p, c_p))
    return JacobianAtBase(*vals, comp)
