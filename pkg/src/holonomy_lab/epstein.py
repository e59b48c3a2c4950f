"""Epstein-surface frame data, curve curvature, Gauss maps and endpoint control.

Tangent vectors in the plane are real 2-vectors in the (d/dx, d/dy) basis
and bilinear forms are symmetric 2x2 matrices in the same basis.  For a
differential q dz^2 and conformal density e^{2 sigma}:

    II     = Phi + conj(Phi) + e^{2 sigma} |dz|^2
    Bhat   = e^{-2 sigma} II
    g      = (1/4) (I + Bhat)^T g_hyp (I + Bhat)
    B      = (I + Bhat)^{-1} (I - Bhat)

Minkowski space uses signature (+, +, +, -); shape operators follow the
convention B X = X(n), the derivative of the unit normal.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .develop import (
    DEFAULT_TOL,
    BASEPOINT,
    axis_path,
    holonomy,
    normalized_pair,
    segment_path,
    solve_schwarzian,
)
from .errors import DegenerateData, DegeneratePatch, DomainError
from .hyp_core import E4, INF, MINKOWSKI, MobiusMap, minkowski_inner
from .quaddiff import neighborhood_sup

CAUCHY_POINTS = 128
FD_STEP = 1e-3
AXIS_SAMPLES = 512
PATCH_TOL = 1e-10


# frames -----------------------------------------------------------------


@dataclass(frozen=True)
class EpsteinFrame:
    """Pointwise second fundamental form, dual metric and shape operators."""

    at: complex
    II: np.ndarray
    Bhat: np.ndarray
    g: np.ndarray
    B: np.ndarray
    eigs_hat: tuple
    g_hyp: np.ndarray
    norm: float
    singular: bool


def frame_from_density(q, density2, at=0j):
    """Frame for the differential q dz^2 against the conformal metric density2 |dz|^2."""
    q = complex(q)
    II = np.array([[2 * q.real + density2, -2 * q.imag], [-2 * q.imag, -2 * q.real + density2]])
    Bhat = II / density2
    g_hyp = density2 * np.eye(2)
    plus = np.eye(2) + Bhat
    g = 0.25 * plus.T @ g_hyp @ plus
    norm = abs(q) / density2
    try:
        B = np.linalg.solve(plus, np.eye(2) - Bhat)
    except np.linalg.LinAlgError:
        B = np.full((2, 2), np.nan)
    eigs = tuple(float(e) for e in np.sort(np.linalg.eigvalsh(Bhat)))
    return EpsteinFrame(complex(at), II, Bhat, g, B, eigs, g_hyp, float(norm), bool(norm >= 0.5))


def epstein_frame(phi, z):
    """Epstein frame of phi at a point z of the upper half-plane."""
    z = complex(z)
    if not z.imag > 0:
        raise DomainError(f"{z} is not in the upper half-plane")
    return frame_from_density(phi.q(z), 1 / z.imag**2, at=z)


def dual_roundtrip(frame):
    """Invert the dual pair: returns (g_hyp, Bhat) rebuilt from (g, B)."""
    plus = np.eye(2) + frame.B
    g_hyp = plus.T @ frame.g @ plus
    Bhat = np.linalg.solve(plus, np.eye(2) - frame.B)
    return g_hyp, Bhat


def is_self_adjoint(frame, tol=1e-10):
    gb = frame.g @ frame.B
    return bool(np.max(np.abs(gb - gb.T)) <= tol * max(1.0, np.max(np.abs(gb))))


# curvature of the core curve -------------------------------------------


def cayley(t0):
    """Disk-to-half-plane map zeta -> i t0 (1 + zeta) / (1 - zeta); the real diameter goes to the axis."""
    return MobiusMap(1j * t0, 1j * t0, -1, 1)


def disk_h(phi, zeta, t0=1.0):
    """h = Phi(n, n) in the disk chart, equal to q(z) z^2 at z = cayley(zeta)."""
    zeta = np.asarray(zeta, dtype=complex)
    z = 1j * t0 * (1 + zeta) / (1 - zeta)
    return phi.h(z)


def disk_q(phi, zeta, t0=1.0):
    """Disk representative: q_D = 4 h / (1 - zeta^2)^2."""
    zeta = np.asarray(zeta, dtype=complex)
    return 4 * disk_h(phi, zeta, t0) / (1 - zeta**2) ** 2


def cauchy_dh(phi, r, t0=1.0, n_points=CAUCHY_POINTS):
    """h_zeta(0) by the trapezoid-rule Cauchy integral on |zeta| = tanh(r / 2)."""
    R = math.tanh(r / 2)
    theta = 2 * math.pi * np.arange(n_points) / n_points
    ring = R * np.exp(1j * theta)
    return complex(np.mean(disk_h(phi, ring, t0) * np.exp(-1j * theta)) / R)


@dataclass(frozen=True)
class CurveSample:
    """Curvature data of the core geodesic in the dual metric g, at one point."""

    t: float
    point: complex
    speed_g: float
    curvature_g: float
    curvature_H3: float
    acceleration_g: float
    normal_curvature: float
    acceleration_bound: float


def _inner(g, u, v):
    return float(u @ g @ v)


def curve_sample(phi, r, t0=1.0, n_points=CAUCHY_POINTS):
    """Curvatures of gamma(t) = i e^t at t = log t0, computed at the disk origin.

    The acceleration comes from (I + Bhat) nabla_gdot gdot = v with
    v = conj(dh(gdot)) as a vector, gdot = (1/2, 0) at the origin.
    """
    if not 0 < r < 1:
        raise DomainError("curvature radius must lie in (0, 1)")
    dh = 0.5 * cauchy_dh(phi, r, t0, n_points)
    frame = frame_from_density(4 * complex(disk_h(phi, 0.0, t0)), 4.0, at=1j * t0)
    v = np.array([dh.real, -dh.imag])
    acc = np.linalg.solve(np.eye(2) + frame.Bhat, v)
    gdot = np.array([0.5, 0.0])
    g = frame.g
    speed2 = _inner(g, gdot, gdot)
    perp = acc - _inner(g, acc, gdot) / speed2 * gdot
    kappa_g = math.sqrt(max(_inner(g, perp, perp), 0.0)) / speed2
    # normal part of the ambient acceleration is II(gdot, gdot) = g(B gdot, gdot)
    kappa_n = abs(_inner(g, frame.B @ gdot, gdot)) / speed2
    acc_norm = math.sqrt(_inner(g, acc, acc))
    return CurveSample(
        t=math.log(t0),
        point=1j * t0,
        speed_g=math.sqrt(speed2),
        curvature_g=kappa_g,
        curvature_H3=math.hypot(kappa_g, kappa_n),
        acceleration_g=acc_norm,
        normal_curvature=kappa_n,
        acceleration_bound=acc_norm / speed2,
    )


def curvature_g(phi, r, t0=1.0):
    """Geodesic curvature in g of the core geodesic at i t0 (returned as a CurveSample)."""
    return curve_sample(phi, r, t0)


def curvature_H3(phi, r, t0=1.0):
    """Curvature in H^3 of the Epstein image of the core geodesic at i t0."""
    return curve_sample(phi, r, t0).curvature_H3


def curvature_bounds(K, r):
    """(kappa_gamma bound, kappa_alpha bound) for sup norm K on the r-neighborhood."""
    return 5 * K / (4 * r * (1 - K) ** 2), 3 * K / (2 * r * (1 - K) ** 2)


def curvature_report(phi, r, t0=1.0, K=None):
    if K is None:
        K = neighborhood_sup(phi, r).K
    sample = curve_sample(phi, r, t0)
    bound_g, bound_a = curvature_bounds(K, r)
    return {
        "K": K,
        "r": r,
        "kappa_gamma": sample.curvature_g,
        "kappa_alpha": sample.curvature_H3,
        "bound_gamma": bound_g,
        "bound_alpha": bound_a,
        "speed_g": sample.speed_g,
        "holds": bool(sample.curvature_g <= bound_g and sample.curvature_H3 <= bound_a),
        "hypothesis_violated": not (r <= 0.5 and K < 1),
    }


# Gauss map --------------------------------------------------------------


def gauss_map(x, v):
    """Ideal endpoint of the ray from x in direction v, on the sphere in the plane x4 = 1.

    x + v is future lightlike, so |<x + v, e4>| = x4 + v4 > 0.
    """
    s = np.asarray(x, dtype=float) + np.asarray(v, dtype=float)
    return s / abs(minkowski_inner(s, E4))


def geodesic_flow(x, v, t):
    x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
    return x * math.cosh(t) + v * math.sinh(t), x * math.sinh(t) + v * math.cosh(t)


def minkowski_normal(x, t1, t2, reference=None):
    """Unit spacelike vector Minkowski-orthogonal to x, t1, t2."""
    rows = np.array([x, t1, t2]) @ MINKOWSKI
    _, _, vt = np.linalg.svd(rows)
    n = vt[-1]
    norm2 = minkowski_inner(n, n)
    if not norm2 > 0:
        raise DegeneratePatch("tangent plane is not spacelike")
    n = n / math.sqrt(norm2)
    if reference is not None and minkowski_inner(n, reference) < 0:
        n = -n
    return n


class Patch:
    """A parametrized surface u -> (X(u), N(u)) in H^3 with base u = 0.

    Subclasses provide ``frame(u)``, the tangent basis ``E`` (4x2) at the
    base, the first fundamental form ``g`` and the shape operator ``B`` in
    the coordinate basis.
    """

    E: np.ndarray
    g: np.ndarray
    B: np.ndarray

    def frame(self, u):
        raise NotImplementedError

    def gauss(self, u):
        X, N = self.frame(u)
        return gauss_map(X, N)


class TotallyGeodesicPatch(Patch):
    """The plane x3 = 0 through e4 with normal e3."""

    def __init__(self):
        self.E = np.eye(4)[:, :2]
        self.g = np.eye(2)
        self.B = np.zeros((2, 2))

    def frame(self, u):
        u1, u2 = u
        return np.array([u1, u2, 0.0, math.sqrt(1 + u1 * u1 + u2 * u2)]), np.array([0.0, 0.0, 1.0, 0.0])


class EquidistantPatch(Patch):
    """Surface at signed distance s from x3 = 0, boosted so its base is e4; B = tanh(s) I."""

    def __init__(self, s):
        self.s = float(s)
        ch = math.cosh(self.s)
        self._boost = np.eye(4)
        self._boost[2, 2] = self._boost[3, 3] = ch
        self._boost[2, 3] = self._boost[3, 2] = -math.sinh(self.s)
        self.E = ch * np.eye(4)[:, :2]
        self.g = ch * ch * np.eye(2)
        self.B = math.tanh(self.s) * np.eye(2)

    def frame(self, u):
        u1, u2 = u
        Y = np.array([u1, u2, 0.0, math.sqrt(1 + u1 * u1 + u2 * u2)])
        e3 = np.array([0.0, 0.0, 1.0, 0.0])
        ch, sh = math.cosh(self.s), math.sinh(self.s)
        return self._boost @ (ch * Y + sh * e3), self._boost @ (sh * Y + ch * e3)


class QuadraticPatch(Patch):
    """Second-order surface through e4 with prescribed metric g and shape operator B.

    X(u) is the radial projection to the hyperboloid of
    e4 + E u - (1/2) u^T (g B) u e3, where E^T E = g, so that
    <d^2 X, N> = -g B at the base.
    """

    def __init__(self, g, B):
        self.g = np.asarray(g, dtype=float)
        self.B = np.asarray(B, dtype=float)
        try:
            L = np.linalg.cholesky(self.g)
        except np.linalg.LinAlgError as exc:
            raise DegeneratePatch("metric is not positive definite") from exc
        gb = self.g @ self.B
        if not np.all(np.isfinite(gb)) or np.max(np.abs(gb - gb.T)) > PATCH_TOL * max(1.0, np.max(np.abs(gb))):
            raise DegeneratePatch("shape operator is not self-adjoint for g")
        self.E = np.zeros((4, 2))
        self.E[:2, :] = L.T
        self._gb = 0.5 * (self.g @ self.B + (self.g @ self.B).T)
        self._e3 = np.array([0.0, 0.0, 1.0, 0.0])

    def _lift(self, u):
        u = np.asarray(u, dtype=float)
        Y = E4 + self.E @ u - 0.5 * float(u @ self._gb @ u) * self._e3
        dY = self.E - np.outer(self._e3, self._gb @ u)
        return Y, dY

    def frame(self, u):
        Y, dY = self._lift(u)
        inner = minkowski_inner(Y, Y)
        if not inner < 0:
            raise DegeneratePatch("patch leaves the hyperboloid chart")
        scale = math.sqrt(-inner)
        X = Y / scale
        # derivative of the radial projection Y / sqrt(-<Y, Y>)
        corr = np.array([minkowski_inner(Y, dY[:, j]) for j in range(2)]) / scale**2
        T = dY / scale + np.outer(X, corr)
        return X, minkowski_normal(X, T[:, 0], T[:, 1], reference=self._e3)


def epstein_patch(phi, z):
    """QuadraticPatch carrying the Epstein dual pair (g, B) of phi at z."""
    frame = epstein_frame(phi, z)
    if frame.singular:
        raise DegeneratePatch(f"pointwise norm {frame.norm:.3g} >= 1/2 at {z}: the dual metric degenerates")
    return QuadraticPatch(frame.g, frame.B)


def _fd_jacobian(func, h):
    cols = []
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        cols.append((func(e) - func(-e)) / (2 * h))
    return np.column_stack(cols)


def gauss_derivative_check(patch, h=FD_STEP):
    """Operator-norm deviation (input metric g) of D(gauss o patch) from E (I + B) at the base."""
    X0, N0 = patch.frame(np.zeros(2))
    if np.max(np.abs(X0 - E4)) > PATCH_TOL:
        raise DegeneratePatch("patch base point must be e4")
    if abs(minkowski_inner(N0, N0) - 1) > PATCH_TOL or abs(minkowski_inner(N0, X0)) > PATCH_TOL:
        raise DegeneratePatch("normal is not a unit vector tangent to H^3")
    if np.max(np.abs(minkowski_inner(patch.E.T, N0))) > PATCH_TOL:
        raise DegeneratePatch("normal is not orthogonal to the tangent plane")
    coarse = _fd_jacobian(patch.gauss, h)
    fine = _fd_jacobian(patch.gauss, h / 2)
    J = (4 * fine - coarse) / 3
    expected = patch.E @ (np.eye(2) + patch.B)
    # unit vectors for g are L^{-T} e with g = L L^T
    L = np.linalg.cholesky(patch.g)
    diff = (J - expected) @ np.linalg.inv(L.T)
    return float(np.linalg.norm(diff, 2))


# endpoints and renormalization -------------------------------------------


def endpoint_region(kappa):
    """Radius (1 - sqrt(1 - kappa^2)) / kappa of the endpoint disks, in stable form."""
    kappa = float(kappa)
    if not 0 <= kappa < 1:
        raise DomainError("endpoint region needs 0 < kappa < 1")
    return kappa / (1 + math.sqrt((1 - kappa) * (1 + kappa)))


def renormalizing_mobius(z_minus, z_plus):
    """m with m(z-) = 0, m(z+) = INF, m(i) = i, and deviations |m'(i)^{+-1} - 1|."""
    for p in (z_minus, z_plus):
        if p is not INF and complex(p) == 1j:
            raise DegenerateData("endpoints must differ from i")
    if z_minus is INF and z_plus is INF or (
            z_minus is not INF and z_plus is not INF and complex(z_minus) == complex(z_plus)):
        raise DegenerateData("endpoints coincide")
    i = 1j
    if z_plus is INF:
        m = MobiusMap(i, -i * z_minus, 0, i - z_minus)
    elif z_minus is INF:
        m = MobiusMap(0, i * (i - z_plus), 1, -z_plus)
    else:
        k = i * (i - z_plus) / (i - z_minus)
        m = MobiusMap(k, -k * z_minus, 1, -z_plus)
    d = complex(m.derivative(i))
    return m, {"derivative": d, "dev_plus": abs(d - 1), "dev_minus": abs(1 / d - 1)}


def hypercycle_endpoints(kappa, span=40.0, tol=1e-12):
    """Endpoints of the constant-curvature curve through i, tangent to the axis.

    Integrates x' = y cos b, y' = y sin b, b' = kappa - cos b in hyperbolic
    arc length both ways from (0, 1, pi/2) until y is negligible.
    """
    from .ode import integrate

    def rhs(sign):
        def f(t, s):
            x, y, b = s.real
            return sign * np.array([y * math.cos(b), y * math.sin(b), kappa - math.cos(b)], dtype=complex)
        return f

    start = np.array([0.0, 1.0, 0.5 * math.pi], dtype=complex)
    ends = []
    for sign in (-1, 1):
        _, ys, _ = integrate(rhs(sign), 0.0, span, start, rtol=tol)
        ends.append(complex(ys[-1][0].real, 0.0))
    return ends[0], ends[1]


# the normalized developing map on the axis -------------------------------


def _axis_deviations(phi, holo, z, u1, u2):
    field = u1 * u2
    hyp = np.abs(field - z) / z.imag
    euc = np.abs(z / field - 1)
    return hyp, euc


def normbound_verify(phi, r, tol=DEFAULT_TOL, samples=AXIS_SAMPLES, K=None, seed=None):
    """Compare ||f*n - n||_gamma and ||f_*n - n||_{f o gamma} with 9K/r.

    f is the fixed-point-normalized developing map.  The hyperbolic
    deviation at z = it is |f/f'(z) - z| / t; on C* the field n is measured
    in the invariant metric |dw| / |w|, giving |z f'/f - 1|.  One period of
    the axis suffices since both quantities are invariant under z -> e^l z.
    """
    if K is None:
        K = neighborhood_sup(phi, r).K
    holo = holonomy(phi, tol)
    dev = solve_schwarzian(phi, axis_path(phi.ell), tol, samples_per_piece=samples)
    z = dev.z
    u1, u2 = normalized_pair(holo.normalizer, dev.samples[:, 1], dev.samples[:, 3])
    hyp, euc = _axis_deviations(phi, holo, z, u1, u2)

    def at(s):
        zs = 1j * math.exp(s * phi.ell)
        if s == 0:
            w1, w2 = 1j, 1.0
        else:
            w1, _, w2, _ = solve_schwarzian(phi, segment_path(BASEPOINT, zs), tol).end_state
        a, b = normalized_pair(holo.normalizer, w1, w2)
        h_, e_ = _axis_deviations(phi, holo, np.array([zs]), np.array([a]), np.array([b]))
        return float(h_[0]), float(e_[0])

    def refine(vals, idx):
        k = int(np.argmax(vals))
        s0 = k / samples
        res = minimize_scalar(lambda s: -at(s)[idx], bounds=(s0 - 1 / samples, s0 + 1 / samples),
                              method="bounded", options={"xatol": 1e-10})
        return max(float(vals[k]), -float(res.fun))

    hyp_sup = refine(hyp, 0) if np.ptp(hyp) > 1e-14 else float(hyp.max())
    euc_sup = refine(euc, 1) if np.ptp(euc) > 1e-14 else float(euc.max())
    bound = 9 * K / r if r > 0 else math.inf
    d_i = 1 / complex(u2[0]) ** 2
    violated = not (r < 0.5 and K / r < 0.25)
    return {
        "hyperbolic_deviation": hyp_sup,
        "euclidean_deviation": euc_sup,
        "derivative_deviation": abs(d_i - 1),
        "inverse_derivative_deviation": abs(1 / d_i - 1),
        "bound": bound,
        "lhs": max(hyp_sup, euc_sup),
        "rhs": bound,
        "margin": bound - max(hyp_sup, euc_sup),
        "holds": bool(hyp_sup <= bound and euc_sup <= bound),
        "K": K,
        "r": float(r),
        "ell": phi.ell,
        "seeds": seed,
        "hypothesis_violated": violated,
        "conditional": violated,
    }
