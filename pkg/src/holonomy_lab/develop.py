"""Developing maps and holonomy from Schwarzian data.

The developing map is f = w1 / w2 where w'' + q w / 2 = 0, q being the
half-plane representative of the Schwarzian.  Solutions start at the
basepoint i with (w1, w1', w2, w2') = (i, 1, 1, 0), so the Wronskian
w1' w2 - w1 w2' is 1 and f(i) = i, f'(i) = 1.  Holonomy of the core curve is
read off by comparing the solutions at e^l i with the deck-translated ones.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NearPole, ParabolicOrIdentity
from .hyp_core import INF, ComplexLength, MobiusMap, complex_length, fixed_points
from .ode import integrate

DEFAULT_TOL = 1e-10
DETOUR_RADIUS = 0.1
BASEPOINT = 1j
_INITIAL = (1j, 1.0, 1.0, 0.0)


# paths ------------------------------------------------------------------


class LogSegment:
    """Straight segment in log coordinates: z(s) = exp(log z0 + s (log z1 - log z0))."""

    def __init__(self, z0, z1):
        self.z0, self.z1 = complex(z0), complex(z1)
        self._a = cmath.log(self.z0)
        self._d = cmath.log(self.z1) - self._a

    def z(self, s):
        return cmath.exp(self._a + s * self._d)

    def dz(self, s):
        return self.z(s) * self._d


class Arc:
    """Euclidean circular arc center + radius * exp(i phi), phi from phi0 to phi1."""

    def __init__(self, center, radius, phi0, phi1):
        self.center, self.radius = complex(center), float(radius)
        self.phi0, self.phi1 = float(phi0), float(phi1)

    def z(self, s):
        return self.center + self.radius * cmath.exp(1j * (self.phi0 + s * (self.phi1 - self.phi0)))

    def dz(self, s):
        dphi = self.phi1 - self.phi0
        return 1j * dphi * self.radius * cmath.exp(1j * (self.phi0 + s * dphi))


@dataclass(frozen=True)
class Path:
    """A piecewise smooth path in the upper half-plane."""

    pieces: tuple

    @property
    def start(self):
        return self.pieces[0].z(0.0)

    @property
    def end(self):
        return self.pieces[-1].z(1.0)


def axis_path(ell):
    """The lift i -> e^l i of the core geodesic."""
    return Path((LogSegment(BASEPOINT, BASEPOINT * math.exp(ell)),))


def segment_path(z0, z1):
    if not (complex(z0).imag > 0 and complex(z1).imag > 0):
        raise DomainError("segment endpoints must lie in the upper half-plane")
    return Path((LogSegment(z0, z1),))


def detour_path(ell, center_t=None, radius=DETOUR_RADIUS, side=1):
    """Axis path with a hyperbolic semicircle of the given radius about i*center_t.

    ``side=+1`` passes to the right of the axis, ``side=-1`` to the left.
    """
    if center_t is None:
        center_t = math.exp(ell / 2)
    lo, hi = center_t * math.exp(-radius), center_t * math.exp(radius)
    if not (1.0 <= lo and hi <= math.exp(ell)):
        raise ValueError("detour does not fit inside the fundamental segment")
    # hyperbolic circle of radius R about i t: Euclidean center i t cosh R, radius t sinh R
    center = 1j * center_t * math.cosh(radius)
    rad = center_t * math.sinh(radius)
    end_angle = 0.5 * math.pi if side > 0 else -1.5 * math.pi
    pieces = []
    if lo > 1.0:
        pieces.append(LogSegment(BASEPOINT, 1j * lo))
    pieces.append(Arc(center, rad, -0.5 * math.pi, end_angle))
    if hi < math.exp(ell):
        pieces.append(LogSegment(1j * hi, BASEPOINT * math.exp(ell)))
    return Path(tuple(pieces))


def circle_path(center, radius):
    """From the basepoint to center + radius, then once around the circle."""
    start = complex(center) + radius
    return Path((LogSegment(BASEPOINT, start), Arc(center, radius, 0.0, 2 * math.pi)))


# solving ----------------------------------------------------------------


@dataclass
class DevelopedPath:
    """Samples (z, w1, w1', w2, w2') of two Schwarzian-ODE solutions along a path."""

    path: Path
    samples: np.ndarray
    tol: float
    extras: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    piece_index: np.ndarray = None

    @property
    def z(self):
        return self.samples[:, 0]

    @property
    def wronskian(self):
        _, w1, dw1, w2, dw2 = self.samples.T
        return dw1 * w2 - w1 * dw2

    @property
    def f(self):
        return self.samples[:, 1] / self.samples[:, 3]

    @property
    def df(self):
        return 1 / self.samples[:, 3] ** 2

    @property
    def end_state(self):
        return self.samples[-1, 1:]


def _rhs_factory(phi, piece, extra):
    q = phi.q

    def rhs(s, y):
        z = piece.z(s)
        dz = piece.dz(s)
        half_q = 0.5 * q(z)
        core = [y[1] * dz, -half_q * y[0] * dz, y[3] * dz, -half_q * y[2] * dz]
        if extra is not None:
            core.extend(val * dz for val in extra(z, y))
        return np.array(core, dtype=complex)

    return rhs


def solve_schwarzian(phi, path, tol=DEFAULT_TOL, extra=None, n_extra=0, initial=_INITIAL,
                     samples_per_piece=None):
    """Integrate w'' + q w / 2 = 0 for two solutions along ``path``.

    Parameters
    ----------
    phi : QuadDiff
        Schwarzian data.
    path : Path
        Must start at the basepoint i (the initial conditions live there).
    extra : callable, optional
        ``extra(z, y)`` returning ``n_extra`` integrands; their integrals
        against dz are carried in the state and returned as ``extras``.
    samples_per_piece : int, optional
        Record that many equispaced parameter values per piece instead of the
        accepted steps.
    """
    y = np.concatenate([np.asarray(initial, dtype=complex), np.zeros(n_extra, dtype=complex)])
    rows, owner = [], []
    for k, piece in enumerate(path.pieces):
        rhs = _rhs_factory(phi, piece, extra)
        t_eval = None
        if samples_per_piece:
            t_eval = np.linspace(0.0, 1.0, samples_per_piece + 1)[1:]
        ts, ys, _ = integrate(rhs, 0.0, 1.0, y, rtol=tol, t_eval=t_eval)
        start = 0 if k == 0 else 1
        for s, state in zip(ts[start:], ys[start:]):
            rows.append([piece.z(s), *state[:4]])
            owner.append(k)
        y = ys[-1]
    return DevelopedPath(path, np.array(rows, dtype=complex), tol, y[4:].copy(), np.array(owner))


def monodromy_matrix(ell, end_state):
    """The Moebius map M with f(e^l z) = M(f(z)), given (w1, w1', w2, w2') at e^l i."""
    w1, dw1, w2, dw2 = end_state[:4]
    shrink, grow = math.exp(-ell / 2), math.exp(ell / 2)
    basis = np.array([[_INITIAL[0], _INITIAL[2]], [_INITIAL[1], _INITIAL[3]]], dtype=complex)
    ab = np.linalg.solve(basis, [shrink * w1, grow * dw1])
    cd = np.linalg.solve(basis, [shrink * w2, grow * dw2])
    return MobiusMap(ab[0], ab[1], cd[0], cd[1])


def fixed_point_normalizer(matrix):
    """Moebius map sending repelling -> 0, attracting -> INF and i -> i.

    After normalization the holonomy is z -> e^L z.
    """
    attracting, repelling = fixed_points(matrix)
    if repelling is INF:
        base = MobiusMap(0, 1, 1, -attracting)
    elif attracting is INF:
        base = MobiusMap(1, -repelling, 0, 1)
    else:
        base = MobiusMap(1, -repelling, 1, -attracting)
    image = base(BASEPOINT)
    if image is INF or image == 0:
        raise NearPole("basepoint is a fixed point of the holonomy", z=BASEPOINT)
    return MobiusMap.scaling(BASEPOINT / image) @ base


@dataclass(frozen=True)
class HolonomyResult:
    """Monodromy of the developing map around the core curve."""

    matrix: MobiusMap
    length: ComplexLength
    normalizer: MobiusMap
    developed: DevelopedPath = field(repr=False, compare=False, default=None)

    def normalized_matrix(self):
        return self.normalizer @ self.matrix @ self.normalizer.inverse()


def holonomy(phi, tol=DEFAULT_TOL, hint=None, path=None, developed=None):
    """Holonomy of the core curve for the projective structure with Schwarzian phi."""
    if developed is None:
        developed = solve_schwarzian(phi, axis_path(phi.ell) if path is None else path, tol)
    matrix = monodromy_matrix(phi.ell, developed.end_state)
    length = complex_length(matrix, hint=hint)
    return HolonomyResult(matrix, length, fixed_point_normalizer(matrix), developed)


def normalized_pair(normalizer, w1, w2):
    """Solutions (u1, u2) with u1 / u2 = normalizer(w1 / w2) and Wronskian preserved."""
    n = normalizer
    return n.a * w1 + n.b * w2, n.c * w1 + n.d * w2


def normalized_initial(normalizer):
    # each array holds (value, derivative) at the basepoint
    w1 = np.array(_INITIAL[0:2], dtype=complex)
    w2 = np.array(_INITIAL[2:4], dtype=complex)
    u1, u2 = normalized_pair(normalizer, w1, w2)
    return (complex(u1[0]), complex(u1[1]), complex(u2[0]), complex(u2[1]))


def developing_map_at(phi, z, normalized=False, tol=DEFAULT_TOL, holo=None, pole_tol=1e-8):
    """(f(z), f'(z)) for the developing map, optionally fixed-point normalized.

    Integrates along the log-coordinate segment from i to z.
    """
    z = complex(z)
    if not z.imag > 0:
        raise DomainError(f"{z} is not in the upper half-plane")
    if z == BASEPOINT:
        w1, w2 = _INITIAL[0], _INITIAL[2]
    else:
        dev = solve_schwarzian(phi, segment_path(BASEPOINT, z), tol)
        w1, _, w2, _ = dev.end_state
    if normalized:
        if holo is None:
            holo = holonomy(phi, tol)
        w1, w2 = normalized_pair(holo.normalizer, w1, w2)
    if abs(w2) < pole_tol * max(1.0, abs(w1)):
        raise NearPole(f"developing map has a pole near {z}", z=z)
    return w1 / w2, 1 / w2**2


def length_family(phi, direction, t_grid, tol=DEFAULT_TOL, hint=None):
    """Branch-continuous complex lengths of phi + t * direction along ``t_grid``."""
    out = []
    prev = hint
    for k, t in enumerate(t_grid):
        try:
            res = holonomy(phi + direction * t, tol, hint=prev)
        except ParabolicOrIdentity as exc:
            raise ParabolicOrIdentity(f"parabolic holonomy at t={t} (index {k}): {exc}", index=k) from exc
        out.append(res.length)
        prev = res.length
    return out


def numerical_schwarzian(phi, z0, radius=0.05, n_points=64, tol=DEFAULT_TOL):
    """Sf(z0) from Cauchy-integral derivatives of f sampled on a circle about z0.

    Independent of the ODE identity Sf = q: only values of f enter.
    """
    z0 = complex(z0)
    if radius >= z0.imag:
        raise ValueError("circle must stay in the upper half-plane")
    dev = solve_schwarzian(phi, circle_path(z0, radius), tol, samples_per_piece=n_points)
    on_circle = dev.piece_index == 1
    f = dev.f[on_circle]
    if np.any(np.abs(dev.samples[on_circle, 3]) < 1e-8):
        raise NearPole("developing map has a pole near the sampling circle", z=z0)
    theta = 2 * math.pi * np.arange(1, n_points + 1) / n_points
    # trapezoid rule on the circle: f^(k)(z0) = k! / rho^k * mean(f e^{-i k theta})
    d1, d2, d3 = (math.factorial(k) / radius**k * np.mean(f * np.exp(-1j * k * theta)) for k in (1, 2, 3))
    return complex(d3 / d1 - 1.5 * (d2 / d1) ** 2)
