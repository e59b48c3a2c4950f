"""Independent reference computations used by the tests."""

import cmath
import math

import numpy as np
from scipy.integrate import quad


def power_map_length(ell, c):
    """Complex length for q = c / z^2: the developing map is z^a with a^2 = 1 - 2c."""
    return ell * cmath.sqrt(1 - 2 * c)


def parseval_l2(phi, r=None):
    """L^2 norm from orthogonality of w^n around circles plus 1-d quadrature across."""
    ell = phi.ell
    if r is None:
        lo, hi = 0.0, math.pi
    else:
        beta = math.atan(math.sinh(r))
        lo, hi = 0.5 * math.pi - beta, 0.5 * math.pi + beta
    total = 0.0
    for n, a in phi.coeffs:
        # |w|^{2n} with |w| = exp(-2 pi (theta - pi/2) / ell)
        val, _ = quad(lambda t: math.exp(-4 * math.pi * n * (t - 0.5 * math.pi) / ell) * math.sin(t) ** 2,
                      lo, hi, epsabs=0, epsrel=1e-13, limit=200)
        total += abs(a) ** 2 * val
    return math.sqrt(ell * (4 * math.pi**2 / ell**2) ** 2 * total)


def christoffel(metric, p, h=1e-4):
    """Christoffel symbols Gamma[k, i, j] of a metric field on R^2, by central differences."""
    p = np.asarray(p, dtype=float)
    dg = []
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        dg.append((metric(p + e) - metric(p - e)) / (2 * h))
    dg = np.array(dg)  # dg[l, i, j] = d_l g_ij
    ginv = np.linalg.inv(metric(p))
    gam = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                gam[k, i, j] = 0.5 * sum(ginv[k, l] * (dg[i, l, j] + dg[j, i, l] - dg[l, i, j]) for l in range(2))
    return gam


def geodesic_curvature(metric, p, vel, acc):
    """Curvature of a plane curve through p with coordinate velocity/acceleration, in the metric."""
    gam = christoffel(metric, p)
    cov = acc + np.einsum("kij,i,j->k", gam, vel, vel)
    g = metric(p)
    speed2 = vel @ g @ vel
    perp = cov - (cov @ g @ vel) / speed2 * vel
    return math.sqrt(perp @ g @ perp) / speed2


def hypercycle_exact(kappa):
    """Endpoints of the curve through i tangent to the axis with constant curvature kappa < 1.

    It is the arc of a Euclidean circle meeting R at angle phi with kappa = sin(phi)
    (cos of the angle to the vertical), so its endpoints are -tan(phi/2), cot(phi/2) up to sign.
    """
    phi = math.asin(kappa)
    return -math.tan(phi / 2), -1 / math.tan(phi / 2)


def power_map_solutions(c, z, z0=1j, initial=(1j, 1.0, 1.0, 0.0)):
    """(w1, w2) at z for w'' + c w / (2 z^2) = 0, from the basis z^{(1 +- a)/2}."""
    a = cmath.sqrt(1 - 2 * c)
    p, r = (1 + a) / 2, (1 - a) / 2
    basis = np.array([[z0**p, z0**r], [p * z0 ** (p - 1), r * z0 ** (r - 1)]])
    out = []
    for value, deriv in (initial[0:2], initial[2:4]):
        alpha, beta = np.linalg.solve(basis, [value, deriv])
        out.append(alpha * z**p + beta * z**r)
    return out[0], out[1]
