"""First variation of complex length along Schwarzian directions.

With the developing map f normalized so the core holonomy is z -> e^L z,
the pullback of n = z d/dz is (f / f') d/dz, and the derivative of L in the
direction of a differential with half-plane representative q_dir is
minus the integral of (f / f') q_dir dz over the lift i -> e^l i.

For solutions u1, u2 of the normalized Schwarzian ODE (Wronskian 1) the
coefficient f / f' equals u1 u2, which has no poles; this is what makes the
line integral a plain ODE quadrature.
"""

import math

import numpy as np

from .develop import (
    DEFAULT_TOL,
    BASEPOINT,
    axis_path,
    detour_path,
    holonomy,
    length_family,
    normalized_initial,
    normalized_pair,
    solve_schwarzian,
    segment_path,
)
from .errors import NearPole, QuadratureFailure
from .quaddiff import neighborhood_sup, sup_norm_on_geodesic

N_PANELS = 64
GAUSS_ORDER = 8
FD_STEP = 1e-3
HOLDS_SLACK = 1e-10
POLE_TOL = 1e-8


def pullback_field(phi, z, tol=DEFAULT_TOL, holo=None):
    """Coefficient f(z) / f'(z) of f*n for the fixed-point-normalized developing map."""
    z = complex(z)
    if holo is None:
        holo = holonomy(phi, tol)
    if z == BASEPOINT:
        w1, w2 = 1j, 1.0
    else:
        w1, _, w2, _ = solve_schwarzian(phi, segment_path(BASEPOINT, z), tol).end_state
    u1, u2 = normalized_pair(holo.normalizer, w1, w2)
    if abs(u1) < POLE_TOL or abs(u2) < POLE_TOL:
        raise NearPole(f"f(z) is near 0 or infinity at z={z}", z=z)
    return complex(u1 * u2)


def _as_list(direction):
    if isinstance(direction, (list, tuple)):
        return list(direction), True
    return [direction], False


def dlength_line_integral(phi, direction, tol=DEFAULT_TOL, path=None):
    """d L(direction) = -int (f / f') q_dir dz along the core lift.

    ``direction`` may be a single QuadDiff or a list; a list returns one
    value per entry from a single ODE pass.  ``path`` defaults to the axis
    and may be any path from i to e^l i in the upper half-plane.
    """
    dirs, many = _as_list(direction)
    if path is None:
        path = axis_path(phi.ell)
    qs = [d.q for d in dirs]

    def extra(z, y):
        w1, w2 = y[0], y[2]
        out = []
        for q in qs:
            qd = q(z)
            out.extend((w1 * w1 * qd, w1 * w2 * qd, w2 * w2 * qd))
        return out

    dev = solve_schwarzian(phi, path, tol, extra=extra, n_extra=3 * len(qs))
    holo = holonomy(phi, tol, developed=dev)
    n = holo.normalizer
    # u1 u2 = (a w1 + b w2)(c w1 + d w2)
    weights = np.array([n.a * n.c, n.a * n.d + n.b * n.c, n.b * n.d])
    ints = dev.extras.reshape(len(qs), 3)
    values = [complex(-(weights @ row)) for row in ints]
    return values if many else values[0]


def dlength_fd(phi, direction, h=FD_STEP, tol=DEFAULT_TOL):
    """Central-difference derivative of L with one Richardson step (h, h/2)."""
    if direction.is_zero():
        return 0j
    base = holonomy(phi, tol).length
    grid = [-h, h, -h / 2, h / 2]
    lengths = [length_family(phi, direction, [t], tol, hint=base)[0].value for t in grid]
    coarse = (lengths[1] - lengths[0]) / (2 * h)
    fine = (lengths[3] - lengths[2]) / h
    return complex((4 * fine - coarse) / 3)


def _circle_rule(func, panels, order=GAUSS_ORDER):
    x, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * wts[None, :]).ravel()
    return complex(np.sum(weights * func(nodes)))


def n_integral(direction, panels=N_PANELS, tol=1e-13):
    """Integral of n . phi over the core circle |w| = 1.

    In the annulus chart n = (2 pi i / l) w d/dw, so the integrand is
    (2 pi i / l) psi(w) / w dw; with w = exp(2 pi i s) this becomes
    -(4 pi^2 / l) psi(exp(2 pi i s)) ds on [0, 1].
    """
    ell = direction.ell
    if direction.is_zero():
        return 0j

    def integrand(s):
        return -4 * math.pi**2 / ell * direction.psi(np.exp(2j * math.pi * s))

    coarse = _circle_rule(integrand, panels)
    fine = _circle_rule(integrand, 2 * panels)
    if abs(fine - coarse) > tol * max(1.0, abs(fine)):
        raise QuadratureFailure("n-integral did not settle after one refinement")
    return fine


def _model_pass(phi, holo, path, tol):
    def extra(z, y):
        prod = y[0] * y[2]
        if abs(y[0]) < POLE_TOL or abs(y[2]) < POLE_TOL:
            raise NearPole("path passes near a zero or pole of f", z=z)
        return (1 / prod,)

    dev = solve_schwarzian(phi, path, tol, extra=extra, n_extra=1, initial=normalized_initial(holo.normalizer))
    return complex(dev.extras[0])


def model_integral(phi, lam, tol=DEFAULT_TOL, path=None):
    """Integral of f*n . phi_lam with phi_lam = -lam (f'/f)^2 dz^2, i.e. -lam int f'/f dz.

    Falls back to semicircular detours on either side when the axis passes
    near a zero or pole of the normalized developing map.
    """
    lam = complex(lam)
    holo = holonomy(phi, tol)
    paths = [path] if path is not None else [
        axis_path(phi.ell), detour_path(phi.ell, side=1), detour_path(phi.ell, side=-1)]
    last = None
    for candidate in paths:
        try:
            return -lam * _model_pass(phi, holo, candidate, tol)
        except NearPole as exc:
            last = exc
    raise last


def theorem_main_report(phi, direction, r, tol=DEFAULT_TOL, seed=None, K=None):
    """Evaluate |dL(direction) + int n . direction| <= (9 K l / r) ||direction||_gamma.

    The hypotheses r <= 1/2 and K / r <= 1/4 are checked and reported as
    flags; a violated hypothesis marks the row conditional rather than raising.
    """
    if K is None:
        K = neighborhood_sup(phi, r).K
    dl = dlength_line_integral(phi, direction, tol)
    nint = n_integral(direction)
    lhs = abs(dl + nint)
    rhs = 9 * K * phi.ell / r * sup_norm_on_geodesic(direction)
    violated = not (r <= 0.5 and K / r <= 0.25)
    margin = rhs - lhs
    return {
        "lhs": lhs,
        "rhs": rhs,
        "margin": margin,
        "holds": bool(margin >= -HOLDS_SLACK),
        "K": K,
        "r": float(r),
        "ell": phi.ell,
        "seeds": seed,
        "hypothesis_violated": violated,
        "conditional": violated,
        "dlength": [dl.real, dl.imag],
        "n_integral": [nint.real, nint.imag],
    }
