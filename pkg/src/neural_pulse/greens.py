"""Closed-form kernels of the linear traveling-wave operator.

For y <= 0, with e_i = exp(omega_i y / c) and Delta = omega1 - omega2,

    Cx(y) = [(1 - w2) e1 - (1 - w1) e2] / (c Delta)
    C(y)  = [((1 - w2)/w1) e1 - ((1 - w1)/w2) e2] / Delta
    Dx(y) = eps [-e1 + e2] / (c Delta)
    D(y)  = [-(eps/w1) e1 + (eps/w2) e2] / Delta

and (U, Q)(z) = int_{-inf}^{z} (Cx, Dx)(x - z) S(x) dx for a source S.
The 0/0 quotients (1 - w1)/w2 and eps/w2 use the identities stored on
``EigenPair`` so every formula is finite at eps = 0.
"""

import numpy as np

from .errors import DomainError


def _check(x):
    x = np.asarray(x, dtype=float)
    if np.any(x > 0):
        raise DomainError("closed-form kernels are defined for x <= 0 only")
    return x


def _exps(x, c, eig):
    return np.exp(eig.omega1 * x / c), np.exp(eig.omega2 * x / c)


def _out(x, val):
    return val if np.ndim(x) else float(val)


def eval_Cx(x, c, eig):
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    val = ((1 - eig.omega2) * e1 - eig.one_minus_omega1 * e2) / (c * eig.gap)
    return _out(x, val)


def eval_C(x, c, eig):
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    val = ((1 - eig.omega2) / eig.omega1 * e1 - eig.ratio * e2) / eig.gap
    return _out(x, val)


def eval_Dx(x, c, eig):
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    return _out(x, eig.epsilon * (e2 - e1) / (c * eig.gap))


def eval_D(x, c, eig):
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    val = (-(eig.epsilon / eig.omega1) * e1 + eig.eps_over_omega2 * e2) / eig.gap
    return _out(x, val)


def eval_G(x, c, eig):
    return eval_C(x, c, eig) + eval_D(x, c, eig)


def eval_Gx(x, c, eig):
    return eval_Cx(x, c, eig) + eval_Dx(x, c, eig)


def eval_Cxx(x, c, eig):
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    w1, w2 = eig.omega1, eig.omega2
    val = (w1 * (1 - w2) * e1 - w2 * eig.one_minus_omega1 * e2) / (c * c * eig.gap)
    return _out(x, val)


def eval_Cxc(x, c, eig):
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    w1, w2 = eig.omega1, eig.omega2
    val = -((1 + x * w1 / c) * (1 - w2) * e1
            - (1 + x * w2 / c) * eig.one_minus_omega1 * e2) / (c * c * eig.gap)
    return _out(x, val)


def _log_gap_rate(eig):
    return (eig.domega1 - eig.domega2) / eig.gap


def eval_Cxeps(x, c, eig):
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    w2 = eig.omega2
    d1, d2 = eig.domega1, eig.domega2
    dl = _log_gap_rate(eig)
    val = (((d1 * x / c - dl) * (1 - w2) - d2) * e1
           - ((d2 * x / c - dl) * eig.one_minus_omega1 - d1) * e2) / (c * eig.gap)
    return _out(x, val)


def eval_Cc(x, c, eig):
    """dC/dc = -(x/c) Cx."""
    x = _check(x)
    return _out(x, -(x / c) * eval_Cx(x, c, eig))


def eval_Ceps(x, c, eig):
    """dC/deps at fixed x and c."""
    x = _check(x)
    e1, e2 = _exps(x, c, eig)
    w1, w2 = eig.omega1, eig.omega2
    d1, d2 = eig.domega1, eig.domega2
    g = eig.gamma
    p1 = (1 - w2) / w1
    p2 = eig.ratio
    dp1 = (-d2 * w1 - (1 - w2) * d1) / (w1 * w1)
    dp2 = -d1 * g / (1 + g)
    val = (-_log_gap_rate(eig) * (p1 * e1 - p2 * e2)
           + (dp1 + d1 * x / c * p1) * e1 - (dp2 + d2 * x / c * p2) * e2) / eig.gap
    return _out(x, val)


def second_partials(x, c, eig):
    """(Cxx, Cxc, Cx_eps) at y = x <= 0."""
    return eval_Cxx(x, c, eig), eval_Cxc(x, c, eig), eval_Cxeps(x, c, eig)
