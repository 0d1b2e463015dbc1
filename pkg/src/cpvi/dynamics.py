"""Hamiltonian vector fields of the hierarchy and a generic integrator.

Three families of flows live here, all with hand-differentiated
polynomial gradients (the finite-difference oracle in the test suite is
the acceptance gate for every one of them):

* the rank-n coupled Painleve VI system in canonical variables
  (q_1..q_n, p_1..p_n), with time scaled by t(t-1);
* its symmetric form in (x_0..x_n, y_0..y_n) constrained to
  sum(x_i y_i) + eta = 0, plus the confluent levels, whose Hamiltonians
  carry a single 1/t pole;
* the five low-rank canonical systems (fifth and third Painleve for
  rank 1, three rank-2 confluences), each written in its own natural
  time variable so the sign flips of the source chain are absorbed in
  the coordinate-map checks, not in the fields.

The integrator is an embedded Dormand-Prince 5(4) pair with a cubic
Hermite continuous extension, complex state support, and movable-pole
diagnostics (steps collapse near a pole; the abort reports the location
estimate instead of attempting continuation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ParameterSet


class IntegrationError(RuntimeError):
    """Adaptive stepping failed (singular point or movable pole)."""


# ----------------------------------------------------------------------
# coupled Painleve VI in canonical variables


def _hvi_terms(k0, k1, kt, kap, q, p, t):
    """Value and q/p-gradients of the quartic one-site Hamiltonian."""
    val = (q * (q - 1) * (q - t) * p * p
           - k0 * (q - 1) * (q - t) * p
           - k1 * q * (q - t) * p
           - (kt - 1) * q * (q - 1) * p
           + kap * q)
    dq = ((3 * q * q - 2 * (1 + t) * q + t) * p * p
          - k0 * (2 * q - 1 - t) * p
          - k1 * (2 * q - t) * p
          - (kt - 1) * (2 * q - 1) * p
          + kap)
    dp = (2 * q * (q - 1) * (q - t) * p
          - k0 * (q - 1) * (q - t)
          - k1 * q * (q - t)
          - (kt - 1) * q * (q - 1))
    return val, dq, dp


def cp6_site_constants(p: ParameterSet, i: int):
    """The four constants of site i (1-based) of the coupled Hamiltonian."""
    odd_total = sum(p.alpha[1::2])
    k0 = complex(odd_total - p.alpha[2 * i - 1] - p.eta)
    k1 = complex(sum(p.alpha[2 * j] for j in range(0, i)))
    kt = complex(sum(p.alpha[2 * j] for j in range(i, p.n + 1)))
    kap = complex(p.alpha[2 * i - 1] * p.eta)
    return k0, k1, kt, kap


def hamiltonian_cp6(p: ParameterSet, q, pm, t):
    """Coupled Hamiltonian: one-site terms plus the pairwise coupling."""
    q = np.asarray(q, dtype=complex)
    pm = np.asarray(pm, dtype=complex)
    n = p.n
    total = 0.0 + 0.0j
    for i in range(1, n + 1):
        val, _, _ = _hvi_terms(*cp6_site_constants(p, i), q[i - 1], pm[i - 1], t)
        total += val
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            qi, pi = q[i - 1], pm[i - 1]
            qj, pj = q[j - 1], pm[j - 1]
            ai = complex(p.alpha[2 * i - 1])
            aj = complex(p.alpha[2 * j - 1])
            total += (qi - 1) * (qj - t) * ((qi * pi + ai) * pj + pi * (qj * pj + aj))
    return total


def cp6_gradients(p: ParameterSet, q, pm, t):
    """(dH/dq, dH/dp) of the coupled Hamiltonian, in closed form."""
    q = np.asarray(q, dtype=complex)
    pm = np.asarray(pm, dtype=complex)
    n = p.n
    dq = np.zeros(n, dtype=complex)
    dp = np.zeros(n, dtype=complex)
    for i in range(1, n + 1):
        _, gq, gp = _hvi_terms(*cp6_site_constants(p, i), q[i - 1], pm[i - 1], t)
        dq[i - 1] += gq
        dp[i - 1] += gp
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            qi, pi = q[i - 1], pm[i - 1]
            qj, pj = q[j - 1], pm[j - 1]
            ai = complex(p.alpha[2 * i - 1])
            aj = complex(p.alpha[2 * j - 1])
            bracket = (qi * pi + ai) * pj + pi * (qj * pj + aj)
            dq[i - 1] += (qj - t) * bracket + (qi - 1) * (qj - t) * pi * pj
            dq[j - 1] += (qi - 1) * bracket + (qi - 1) * (qj - t) * pi * pj
            dp[i - 1] += (qi - 1) * (qj - t) * (qi * pj + qj * pj + aj)
            dp[j - 1] += (qi - 1) * (qj - t) * (qi * pi + ai + pi * qj)
    return dq, dp


def coupled_p6_field(p: ParameterSet, q, pm, t):
    """(dq/dt, dp/dt): the canonical field divided by t(t-1)."""
    if t == 0 or t == 1:
        raise IntegrationError("the coupled system is singular at t in {0, 1}")
    dq, dp = cp6_gradients(p, q, pm, t)
    s = t * (t - 1.0)
    return dp / s, -dq / s


def riccati_rhs(p: ParameterSet, q, t):
    """Right-hand side of t(t-1) q' for the rank-1 momentum-free reduction."""
    a0, a1, _, a3 = (complex(a) for a in p.alpha)
    return a1 * q * q + ((a3 + a0) * t - (a0 + a1)) * q - a3 * t


# ----------------------------------------------------------------------
# symmetric form and its confluent levels


def _window_weights(p: ParameterSet):
    n = p.n
    big = np.array([complex(p.partial_sum(2 * i + 2, 2 * n - 2 * i - 1)) for i in range(n + 1)])
    odd = np.array([complex(p.alpha[2 * i + 1]) for i in range(n + 1)])
    return big, odd


def hamiltonian_symmetric(p: ParameterSet, x, y, t):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    big, odd = _window_weights(p)
    s = x * (x * y + odd)                     # s_i = x_i (x_i y_i + alpha_{2i+1})
    ybelow = np.concatenate(([0.0], np.cumsum(y)[:-1]))
    part_t = np.sum(0.5 * x * x * y * y - big * x * y + s * ybelow)
    part_1 = np.sum(s) * np.sum(y)
    return part_t / t + part_1 / (1.0 - t)


def symmetric_gradients(p: ParameterSet, x, y, t):
    """(dH/dx, dH/dy) of the symmetric Hamiltonian, in closed form."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    big, odd = _window_weights(p)
    s = x * (x * y + odd)
    ybelow = np.concatenate(([0.0], np.cumsum(y)[:-1]))
    stail = np.concatenate((np.cumsum(s[::-1])[::-1][1:], [0.0]))  # sum_{j>i} s_j
    ytot = np.sum(y)
    stot = np.sum(s)
    dy = (x * x * y - big * x + stail + x * x * ybelow) / t \
        + (stot + x * x * ytot) / (1.0 - t)
    dx = (x * y * y - big * y + (2 * x * y + odd) * ybelow) / t \
        + (2 * x * y + odd) * ytot / (1.0 - t)
    return dx, dy


def symmetric_field(p: ParameterSet, x, y, t):
    if t == 0 or t == 1:
        raise IntegrationError("the symmetric system is singular at t in {0, 1}")
    dx, dy = symmetric_gradients(p, x, y, t)
    return dy, -dx


def hamiltonian_degenerate(p: ParameterSet, x, y, t):
    """Level-r confluent Hamiltonian (the value of H, not t H)."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    r = p.degeneracy
    big, odd = _window_weights(p)
    s = x * (x * y + odd)
    stail = np.concatenate((np.cumsum(s[::-1])[::-1][1:], [0.0]))
    th = np.sum(0.5 * x * y * (x * y - 2 * big))
    th += np.sum(x[1:r] * y[: r - 1])
    th += np.sum((t * x[0] + stail[r - 1:]) * y[r - 1:])
    return th / t


def degenerate_gradients(p: ParameterSet, x, y, t):
    """(d(tH)/dx, d(tH)/dy) of the level-r Hamiltonian."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    n, r = p.n, p.degeneracy
    big, odd = _window_weights(p)
    s = x * (x * y + odd)
    stail = np.concatenate((np.cumsum(s[::-1])[::-1][1:], [0.0]))
    # cumulative sum of y over the active sites r-1 <= i < k
    yact = np.zeros(n + 1, dtype=complex)
    acc = 0.0 + 0.0j
    for k in range(r - 1, n + 1):
        yact[k] = acc
        acc += y[k]
    dty = x * x * y - big * x + x * x * yact
    dty[: r - 1] += x[1:r]
    dty[r - 1:] += t * x[0] + stail[r - 1:]
    dtx = x * y * y - big * y + (2 * x * y + odd) * yact
    dtx[1:r] += y[: r - 1]
    dtx[0] += t * np.sum(y[r - 1:])
    return dtx, dty


def degenerate_field(p: ParameterSet, x, y, t):
    if t == 0:
        raise IntegrationError("the confluent system is singular at t = 0")
    if not 1 <= p.degeneracy <= p.n + 1:
        raise ValueError("degenerate_field needs a parameter set of level 1..n+1")
    dtx, dty = degenerate_gradients(p, x, y, t)
    return dty / t, -dtx / t


def constraint_value(x, y, eta):
    return complex(np.sum(np.asarray(x) * np.asarray(y)) + eta)


# ----------------------------------------------------------------------
# coordinate maps


def symmetric_to_canonical(p: ParameterSet, x, y, t):
    """(q, p, eta) from a symmetric state; needs x_n != 0 and t != 0."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x[-1] == 0:
        raise ZeroDivisionError("coordinate chart breaks down at x_n = 0")
    if t == 0:
        raise ZeroDivisionError("coordinate chart undefined at t = 0")
    q = t * x[:-1] / x[-1]
    pm = x[-1] * y[:-1] / t
    eta = -np.sum(x * y)
    return q, pm, eta


def canonical_to_symmetric(p: ParameterSet, q, pm, eta, x_last, t):
    """Inverse chart; the free scale x_n is supplied by the caller."""
    q = np.asarray(q, dtype=complex)
    pm = np.asarray(pm, dtype=complex)
    if x_last == 0 or t == 0:
        raise ZeroDivisionError("need x_n != 0 and t != 0")
    x = np.empty(p.n + 1, dtype=complex)
    y = np.empty(p.n + 1, dtype=complex)
    x[:-1] = x_last * q / t
    x[-1] = x_last
    y[:-1] = t * pm / x_last
    y[-1] = -(np.sum(q * pm) + eta) / x_last
    return x, y


def log_derivative_target(p: ParameterSet, q, pm, eta, t):
    """The combination t(1-t) d/dt log x_n equals along symmetric flows."""
    q = np.asarray(q, dtype=complex)
    pm = np.asarray(pm, dtype=complex)
    odd = np.array([complex(p.alpha[2 * i - 1]) for i in range(1, p.n + 1)])
    return (np.sum((q - 1) * (q - t) * pm + odd * q)
            + t * complex(p.alpha[2 * p.n + 1]) - (t + 1) * eta)


# ----------------------------------------------------------------------
# low-rank canonical systems (fifth/third Painleve and the rank-2 chain)

APPENDIX_SYSTEMS = ("p5", "p3", "n2r1", "n2r2", "n2r3")

# (rank, confluence level, source time carries a sign flip)
APPENDIX_SOURCE = {
    "p5": (1, 1, True),
    "p3": (1, 2, False),
    "n2r1": (2, 1, True),
    "n2r2": (2, 2, True),
    "n2r3": (2, 3, True),
}


def hamiltonian_appendix(which: str, p: ParameterSet, q, pm, t):
    """Value of t H for the selected canonical system."""
    q = np.asarray(q, dtype=complex)
    pm = np.asarray(pm, dtype=complex)
    e = complex(p.eta)
    a = [complex(v) for v in p.alpha]
    if which == "p5":
        (q1,), (p1,) = q, pm
        return (q1 * (q1 - 1) * p1 * (p1 + t) - q1 * p1 * (e + a[2] - a[3])
                + (e - a[3]) * p1 + t * a[3] * q1)
    if which == "p3":
        (q1,), (p1,) = q, pm
        return q1 * q1 * p1 * (p1 - 1) + (e + a[3]) * q1 * p1 + t * p1 - e * q1
    q1, q2 = q
    p1, p2 = pm
    if which == "n2r1":
        return (q1 * (q1 - 1) * p1 * (p1 + t) - (e + a[2] - a[3] - a[5]) * q1 * p1
                + (e - a[3] - a[5]) * p1 + a[3] * t * q1
                + (q1 - 1) * p1 * q2 * p2 + (q1 - 1) * (q1 * p1 + a[3]) * p2
                + q2 * (q2 - 1) * p2 * (p2 + t) - (e + a[2] + a[4] - a[5]) * q2 * p2
                + (e - a[5]) * p2 + a[5] * t * q2)
    if which == "n2r2":
        return (q1 * q1 * p1 * (p1 - 1) + (e + a[3]) * q1 * p1 + t * p1 - a[3] * q1
                + q1 * p1 * q2 * p2 + p1 * q2 * (q2 * p2 + a[5])
                + q2 * q2 * p2 * (p2 - 1) + (e + a[3] + a[4] + a[5]) * q2 * p2
                + t * p2 - a[5] * q2)
    if which == "n2r3":
        return (q1 * q1 * p1 * (p1 - 1) + (e + a[3]) * q1 * p1 - a[3] * q1
                + q1 * p1 * q2 * p2 + p1 * q2
                + q2 * q2 * p2 * p2 + (e + a[3] + a[5]) * q2 * p2 + t * p2 - q2)
    raise ValueError(f"unknown canonical system {which!r}")


def appendix_gradients(which: str, p: ParameterSet, q, pm, t):
    """(d(tH)/dq, d(tH)/dp) for the selected canonical system."""
    q = np.asarray(q, dtype=complex)
    pm = np.asarray(pm, dtype=complex)
    e = complex(p.eta)
    a = [complex(v) for v in p.alpha]
    if which == "p5":
        (q1,), (p1,) = q, pm
        dq = (2 * q1 - 1) * p1 * (p1 + t) - p1 * (e + a[2] - a[3]) + t * a[3]
        dp = q1 * (q1 - 1) * (2 * p1 + t) - q1 * (e + a[2] - a[3]) + (e - a[3])
        return np.array([dq]), np.array([dp])
    if which == "p3":
        (q1,), (p1,) = q, pm
        dq = 2 * q1 * p1 * (p1 - 1) + (e + a[3]) * p1 - e
        dp = q1 * q1 * (2 * p1 - 1) + (e + a[3]) * q1 + t
        return np.array([dq]), np.array([dp])
    q1, q2 = q
    p1, p2 = pm
    if which == "n2r1":
        dq1 = ((2 * q1 - 1) * p1 * (p1 + t) - (e + a[2] - a[3] - a[5]) * p1 + a[3] * t
               + p1 * q2 * p2 + (q1 * p1 + a[3]) * p2 + (q1 - 1) * p1 * p2)
        dq2 = ((q1 - 1) * p1 * p2
               + (2 * q2 - 1) * p2 * (p2 + t) - (e + a[2] + a[4] - a[5]) * p2 + a[5] * t)
        dp1 = (q1 * (q1 - 1) * (2 * p1 + t) - (e + a[2] - a[3] - a[5]) * q1
               + (e - a[3] - a[5]) + (q1 - 1) * q2 * p2 + (q1 - 1) * q1 * p2)
        dp2 = ((q1 - 1) * p1 * q2 + (q1 - 1) * (q1 * p1 + a[3])
               + q2 * (q2 - 1) * (2 * p2 + t) - (e + a[2] + a[4] - a[5]) * q2 + (e - a[5]))
        return np.array([dq1, dq2]), np.array([dp1, dp2])
    if which == "n2r2":
        dq1 = 2 * q1 * p1 * (p1 - 1) + (e + a[3]) * p1 - a[3] + p1 * q2 * p2
        dq2 = (q1 * p1 * p2 + p1 * (2 * q2 * p2 + a[5])
               + 2 * q2 * p2 * (p2 - 1) + (e + a[3] + a[4] + a[5]) * p2 - a[5])
        dp1 = (q1 * q1 * (2 * p1 - 1) + (e + a[3]) * q1 + t
               + q1 * q2 * p2 + q2 * (q2 * p2 + a[5]))
        dp2 = (q1 * p1 * q2 + p1 * q2 * q2
               + q2 * q2 * (2 * p2 - 1) + (e + a[3] + a[4] + a[5]) * q2 + t)
        return np.array([dq1, dq2]), np.array([dp1, dp2])
    if which == "n2r3":
        dq1 = 2 * q1 * p1 * (p1 - 1) + (e + a[3]) * p1 - a[3] + p1 * q2 * p2
        dq2 = q1 * p1 * p2 + p1 + 2 * q2 * p2 * p2 + (e + a[3] + a[5]) * p2 - 1
        dp1 = q1 * q1 * (2 * p1 - 1) + (e + a[3]) * q1 + q1 * q2 * p2 + q2
        dp2 = q1 * p1 * q2 + 2 * q2 * q2 * p2 + (e + a[3] + a[5]) * q2 + t
        return np.array([dq1, dq2]), np.array([dp1, dp2])
    raise ValueError(f"unknown canonical system {which!r}")


def appendix_a_field(which: str, p: ParameterSet, q, pm, t):
    """(dq/dt, dp/dt) of the selected canonical system in its own time."""
    if t == 0:
        raise IntegrationError("canonical systems are singular at t = 0")
    dq, dp = appendix_gradients(which, p, q, pm, t)
    return dp / t, -dq / t


def appendix_a_map(which: str, p: ParameterSet, x, y):
    """Canonical coordinates of a symmetric state for the selected system."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    a = [complex(v) for v in p.alpha]
    if which == "p5":
        return (np.array([x[0] / x[1]]),
                np.array([-x[1] * (x[1] * y[1] + a[3]) / x[0]]))
    if which == "p3":
        return np.array([x[1] / x[0]]), np.array([x[0] * y[1]])
    if which == "n2r1":
        q = np.array([x[0] / x[1], x[0] / x[2]])
        pm = np.array([-x[1] * (x[1] * y[1] + a[3]) / x[0],
                       -x[2] * (x[2] * y[2] + a[5]) / x[0]])
        return q, pm
    if which in ("n2r2", "n2r3"):
        q = np.array([-x[1] / x[0], -x[2] / x[0]])
        pm = np.array([1 - x[0] * y[1], -x[0] * y[2]])
        return q, pm
    raise ValueError(f"unknown canonical system {which!r}")


def pushforward_field(map_fn, field, x, y, t, h=1e-5, flip=False):
    """Time derivative of map_fn(x, y) along the flow of ``field``.

    The chain rule is evaluated with central-difference Jacobians in the
    state (the maps are smooth rational functions, so the O(h^2) bias is
    negligible at h = 1e-5).  ``flip`` accounts for a source flow running
    in reversed time: the source field is evaluated at -t and the whole
    derivative changes sign.
    """
    t_src = -t if flip else t
    fx, fy = field(x, y, t_src)
    base = np.concatenate(map_fn(x, y))
    out = np.zeros_like(base)
    for idx in range(len(x)):
        for arr, vel in ((0, fx[idx]), (1, fy[idx])):
            if vel == 0:
                continue
            xp, yp = np.array(x, dtype=complex), np.array(y, dtype=complex)
            xm, ym = xp.copy(), yp.copy()
            step = h * max(1.0, abs((x if arr == 0 else y)[idx]))
            if arr == 0:
                xp[idx] += step
                xm[idx] -= step
            else:
                yp[idx] += step
                ym[idx] -= step
            col = (np.concatenate(map_fn(xp, yp)) - np.concatenate(map_fn(xm, ym))) / (2 * step)
            out = out + col * vel
    return -out if flip else out


# ----------------------------------------------------------------------
# rank-1 classical chain


def riccati_from_gauss(p: ParameterSet, t):
    """(q, dq/dt) built from the logarithmic derivative of the rank-1
    hypergeometric solution; q then solves the momentum-free reduction."""
    from .hyperfn import HGSpec, eval_series_jet

    if p.n != 1:
        raise ValueError("the classical chain is a rank-1 construction")
    a1 = complex(p.alpha[1])
    a3 = complex(p.alpha[3])
    if a1 == 0:
        raise ZeroDivisionError("the logarithmic-derivative map needs alpha_1 != 0")
    spec = HGSpec((complex(p.partial_sum(1, 2)), a3), (complex(p.partial_sum(2, 1)),))
    (f, fp, fpp), _ = eval_series_jet(spec, t, order=2)
    if f == 0:
        raise ZeroDivisionError(f"hypergeometric factor vanishes at t = {t}")
    g = a3 / (t - 1.0) + fp / f
    gp = -a3 / (t - 1.0) ** 2 + (fpp * f - fp * fp) / (f * f)
    q = t * (1.0 - t) / a1 * g
    dq = (1.0 - 2.0 * t) / a1 * g + t * (1.0 - t) / a1 * gp
    return q, dq


def riccati_residual(p: ParameterSet, q, dq, t):
    """Defect of (q, dq) in the momentum-free reduction, relative."""
    lhs = t * (t - 1.0) * dq
    rhs = riccati_rhs(p, q, t)
    return abs(lhs - rhs) / max(1.0, abs(q) ** 2)


# ----------------------------------------------------------------------
# adaptive integration

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])

_MAX_STATE = 1e10
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass
class Trajectory:
    """Sampled solution with stepping statistics."""

    ts: np.ndarray
    states: np.ndarray
    steps: int
    rejected: int

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _hermite(t0, y0, f0, t1, y1, f1, ts):
    h = t1 - t0
    out = np.empty((len(ts), len(y0)), dtype=complex)
    for row, t in enumerate(ts):
        th = (t - t0) / h
        h00 = (1 + 2 * th) * (1 - th) ** 2
        h10 = th * (1 - th) ** 2
        h01 = th * th * (3 - 2 * th)
        h11 = th * th * (th - 1)
        out[row] = h00 * y0 + h * h10 * f0 + h01 * y1 + h * h11 * f1
    return out


def integrate(field, state0, t0, t1, rtol=1e-10, atol=1e-12,
              dense_ts=None, max_steps=200_000, fixed_step=None,
              max_step=None) -> Trajectory:
    """Embedded Dormand-Prince 5(4) integration of dstate/dt = field(t, state).

    Local error per step is held below atol + rtol * |state| componentwise.
    ``dense_ts`` requests samples at given times (monotone, inside
    [t0, t1]); steps are clamped to land on them, so samples carry the
    full step accuracy (cubic Hermite only backstops skipped points).
    Otherwise the accepted step points are returned.  ``fixed_step``
    disables adaptivity (used by order studies).
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("rtol and atol must be positive")
    y = np.asarray(state0, dtype=complex).copy()
    t = float(t0)
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0:
        pts = np.array([t0])
        return Trajectory(pts, y[None, :].copy(), 0, 0)

    f = np.asarray(field(t, y), dtype=complex)
    if fixed_step is not None:
        h = abs(fixed_step)
    else:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean(np.abs(y / scale) ** 2))
        d1 = np.sqrt(np.mean(np.abs(f / scale) ** 2))
        h = min(span / 10.0, 0.01 * d0 / d1 if d1 > 0 else span / 10.0)
        h = max(h, span * 1e-10)

    dense = None
    dense_idx = 0
    if dense_ts is not None:
        dense = np.asarray(dense_ts, dtype=float)
        out_states = np.empty((len(dense), len(y)), dtype=complex)
        if len(dense) and dense[0] == t:
            out_states[0] = y
            dense_idx = 1
    else:
        step_ts = [t]
        step_states = [y.copy()]
    if max_step is None:
        max_step = span

    steps = rejected = 0
    K = np.empty((7, len(y)), dtype=complex)
    end_tol = 1e-14 * max(1.0, abs(t1))
    while (t1 - t) * direction > end_tol:
        if steps + rejected > max_steps:
            raise IntegrationError(f"step budget exhausted near t = {t:.6g}")
        if np.max(np.abs(y)) > _MAX_STATE:
            raise IntegrationError(f"state blow-up near t = {t:.6g} (movable pole?)")
        h_step = min(h, abs(t1 - t), max_step)
        if dense is not None and dense_idx < len(dense):
            gap = abs(dense[dense_idx] - t)
            if gap > end_tol:
                h_step = min(h_step, gap)
        if h_step < 1e-13 * max(1.0, abs(t)):
            raise IntegrationError(
                f"step size underflow near t = {t:.6g} (movable pole or singular point)")
        ht = h_step * direction
        K[0] = f
        for s in range(1, 7):
            ys = y + ht * (K[:s].T @ _DP_A[s])
            K[s] = field(t + _DP_C[s] * ht, ys)
        y5 = y + ht * (K.T @ _DP_B5)
        err_vec = ht * (K.T @ (_DP_B5 - _DP_B4))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean(np.abs(err_vec / scale) ** 2))
        if fixed_step is not None or err <= 1.0:
            t_new = t + ht
            f_new = K[6].copy()  # FSAL stage equals field(t_new, y5)
            if dense is not None:
                upper = dense_idx
                while upper < len(dense) and (dense[upper] - t_new) * direction <= 0:
                    upper += 1
                if upper > dense_idx:
                    out_states[dense_idx:upper] = _hermite(
                        t, y, K[0], t_new, y5, f_new, dense[dense_idx:upper])
                    dense_idx = upper
            else:
                step_ts.append(t_new)
                step_states.append(y5.copy())
            t, y, f = t_new, y5, f_new
            steps += 1
        else:
            rejected += 1
        if fixed_step is None:
            factor = _SAFETY * err ** -0.2 if err > 0 else _MAX_FACTOR
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))

    if dense is not None:
        # endpoint samples within rounding of t1 take the final state
        out_states[dense_idx:] = y
        return Trajectory(dense.copy(), out_states, steps, rejected)
    return Trajectory(np.array(step_ts), np.array(step_states), steps, rejected)


# flat-vector adapters ---------------------------------------------------


def symmetric_rhs(p: ParameterSet):
    n = p.n

    def rhs(t, v):
        dx, dy = symmetric_field(p, v[: n + 1], v[n + 1:], t)
        return np.concatenate((dx, dy))

    return rhs


def degenerate_rhs(p: ParameterSet):
    n = p.n

    def rhs(t, v):
        dx, dy = degenerate_field(p, v[: n + 1], v[n + 1:], t)
        return np.concatenate((dx, dy))

    return rhs


def cp6_rhs(p: ParameterSet):
    n = p.n

    def rhs(t, v):
        dq, dp = coupled_p6_field(p, v[:n], v[n:], t)
        return np.concatenate((dq, dp))

    return rhs


def appendix_rhs(which: str, p: ParameterSet):
    n = APPENDIX_SOURCE[which][0]

    def rhs(t, v):
        dq, dp = appendix_a_field(which, p, v[:n], v[n:], t)
        return np.concatenate((dq, dp))

    return rhs


def linear_rhs(sys):
    def rhs(t, v):
        return sys.coefficient(t) @ v

    return rhs
