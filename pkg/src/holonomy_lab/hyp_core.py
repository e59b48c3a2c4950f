"""Hyperbolic plane and space primitives.

Moebius maps on the extended plane, complex length of loxodromic elements,
the hyperbolic norm on the upper half-plane and the Minkowski model of H^3
with signature (+, +, +, -).
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, DomainError, ParabolicOrIdentity

PARABOLIC_TOL = 1e-10


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_infinite(z):
    return z is INF


@dataclass(frozen=True)
class MobiusMap:
    """z -> (az + b) / (cz + d), stored with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if det == 0 or not cmath.isfinite(det):
            raise DegenerateData(f"singular Moebius matrix (det={det})")
        s = cmath.sqrt(det)
        object.__setattr__(self, "a", a / s)
        object.__setattr__(self, "b", b / s)
        object.__setattr__(self, "c", c / s)
        object.__setattr__(self, "d", d / s)

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def scaling(cls, factor):
        """The map z -> factor * z."""
        s = cmath.sqrt(complex(factor))
        return cls(s, 0, 0, 1 / s)

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def trace(self):
        return self.a + self.d

    def __call__(self, z):
        return mobius_apply(self, z)

    def __matmul__(self, other):
        """Composition: (self @ other)(z) == self(other(z))."""
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self):
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def derivative(self, z):
        den = self.c * z + self.d
        if den == 0:
            return INF
        return 1 / den**2


def mobius_apply(m, z):
    """Apply a Moebius map on the extended plane; poles go to INF."""
    if z is INF:
        return INF if m.c == 0 else m.a / m.c
    z = complex(z)
    den = m.c * z + m.d
    num = m.a * z + m.b
    if den == 0:
        return INF
    return num / den


@dataclass(frozen=True)
class ComplexLength:
    """Translation length plus i times rotation angle; ``branch`` counts 2*pi*i."""

    value: complex
    branch: int = 0

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag


def _dominant_eigenvalue(tr):
    # eigenvalues of an SL2 matrix are the roots of x^2 - tr x + 1
    half = tr / 2
    root = cmath.sqrt((half - 1) * (half + 1))
    lam = half + root
    other = half - root
    if abs(other) > abs(lam):
        lam, other = other, lam
    return lam, other


def complex_length(m, hint=None, tol=PARABOLIC_TOL):
    """Complex length L of a non-parabolic element, tr(M) = +-2 cosh(L/2).

    Re L >= 0. Without a hint Im L lies in (-pi, pi]; with a hint the
    2*pi*i branch nearest to ``hint`` is returned.
    """
    tr = m.trace
    if tr.real < 0 or (tr.real == 0 and tr.imag < 0):
        tr = -tr
    if abs(tr * tr - 4) < tol * max(1.0, abs(tr) ** 2):
        raise ParabolicOrIdentity(f"trace^2 - 4 = {tr * tr - 4:.3e} is below tolerance")
    lam, other = _dominant_eigenvalue(tr)
    if math.isclose(abs(lam), abs(other), rel_tol=1e-14):
        # elliptic: pick the rotation angle in [0, pi]
        if cmath.phase(lam * lam) < 0:
            lam = other
    principal = cmath.log(lam * lam)
    value = complex(principal.real, principal.imag)
    if abs(value.real) < 1e-15:
        value = complex(0.0, value.imag)
    branch = 0
    if hint is not None:
        target = hint.value if isinstance(hint, ComplexLength) else complex(hint)
        branch = round((target.imag - value.imag) / (2 * math.pi))
        value += 2j * math.pi * branch
    return ComplexLength(value, branch)


def fixed_points(m):
    """Fixed points (attracting, repelling) of a loxodromic map."""
    tr = m.trace
    sign = 1 if (tr.real > 0 or (tr.real == 0 and tr.imag >= 0)) else -1
    lam, other = _dominant_eigenvalue(sign * tr)
    lam, other = sign * lam, sign * other

    def eigvec_point(mu):
        # solve (M - mu) v = 0 and return the projective ratio v0 / v1
        scale = max(abs(m.a), abs(m.d), 1.0)
        if abs(m.c) > 1e-14 * scale:
            return (mu - m.d) / m.c
        if abs(mu - m.a) <= abs(mu - m.d):
            return INF
        return m.b / (mu - m.a)

    return eigvec_point(lam), eigvec_point(other)


def three_point_map(p, q, r):
    """The Moebius map sending p -> 0, q -> INF, r -> 1 (points distinct)."""
    pts = [p, q, r]
    finite = [complex(x) for x in pts if x is not INF]
    if len(finite) != len(set(finite)) or len(finite) < 2:
        raise DegenerateData("three-point map needs distinct points")
    if p is INF:
        return MobiusMap.from_matrix([[0, r - q], [1, -q]])
    if q is INF:
        return MobiusMap.from_matrix([[1, -p], [0, r - p]])
    if r is INF:
        return MobiusMap.from_matrix([[1, -p], [1, -q]])
    return MobiusMap.from_matrix([[r - q, -p * (r - q)], [r - p, -q * (r - p)]])


def hyperbolic_norm(z, v):
    """Length of the tangent vector v at z in the metric |dz| / Im z."""
    z = complex(z)
    if not z.imag > 0:
        raise DomainError(f"{z} is not in the upper half-plane")
    return abs(v) / z.imag


MINKOWSKI = np.diag([1.0, 1.0, 1.0, -1.0])
E4 = np.array([0.0, 0.0, 0.0, 1.0])


def minkowski_inner(u, v):
    """u1 v1 + u2 v2 + u3 v3 - u4 v4 (broadcasts over leading axes)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2] - u[..., 3] * v[..., 3]


def is_hyperboloid_point(x, tol=1e-12):
    x = np.asarray(x, dtype=float)
    return bool(abs(minkowski_inner(x, x) + 1) <= tol and x[3] > 0)


def is_tangent(x, v, tol=1e-12):
    return bool(abs(minkowski_inner(x, v)) <= tol)


def hyperboloid_point(spatial):
    """Lift a spatial vector y in R^3 to (y, sqrt(1 + |y|^2))."""
    y = np.asarray(spatial, dtype=float)
    return np.append(y, math.sqrt(1 + float(y @ y)))


def boost(axis, rapidity):
    """Lorentz boost mixing spatial ``axis`` (0..2) with the time coordinate."""
    m = np.eye(4)
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    m[axis, axis] = ch
    m[3, 3] = ch
    m[axis, 3] = sh
    m[3, axis] = sh
    return m


def rotation(axis_a, axis_b, angle):
    """Spatial rotation in the (axis_a, axis_b) coordinate plane."""
    m = np.eye(4)
    c, s = math.cos(angle), math.sin(angle)
    m[axis_a, axis_a] = c
    m[axis_b, axis_b] = c
    m[axis_a, axis_b] = -s
    m[axis_b, axis_a] = s
    return m
