"""Holomorphic quadratic differentials on the annulus A_l.

A differential is stored as a finite Laurent polynomial psi(w) = sum a_n w^n
with phi = psi(w) / w^2 dw^2 on

    A_l = {exp(-pi^2 / l) < |w| < exp(pi^2 / l)}.

The universal cover is the upper half-plane U with deck map z -> e^l z.  The
covering used here is

    w(z) = exp((2 pi i / l) (log z - i pi / 2)),

which sends the imaginary axis onto the core circle |w| = 1, and the
half-plane representative is q(z) = -(4 pi^2 / l^2) psi(w(z)) / z^2.
"""

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import DomainError, QuadratureFailure

MAX_DEGREE = 16
GEODESIC_SAMPLES = 512
NEIGHBORHOOD_GRID = (64, 512)


def _clean_coeffs(coeffs):
    if isinstance(coeffs, dict):
        items = coeffs.items()
    else:
        items = coeffs
    table = {}
    for n, a in items:
        n = int(n)
        if abs(n) > MAX_DEGREE:
            raise DomainError(f"Laurent degree {n} outside [-{MAX_DEGREE}, {MAX_DEGREE}]")
        a = complex(a)
        if not cmath.isfinite(a):
            raise DomainError(f"non-finite coefficient for w^{n}")
        table[n] = table.get(n, 0j) + a
    return tuple(sorted((n, a) for n, a in table.items() if a != 0))


@dataclass(frozen=True)
class QuadDiff:
    """phi = psi(w) / w^2 dw^2 on A_ell with psi a finite Laurent polynomial."""

    ell: float
    coeffs: tuple = field(default=())

    def __post_init__(self):
        ell = float(self.ell)
        if not ell > 0 or not math.isfinite(ell):
            raise DomainError(f"core length must be positive, got {self.ell}")
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "coeffs", _clean_coeffs(self.coeffs))
        pos = [0j] * (MAX_DEGREE + 1)
        neg = [0j] * (MAX_DEGREE + 1)
        for n, a in self.coeffs:
            if n >= 0:
                pos[n] = a
            else:
                neg[-n] = a
        top = max([n for n, _ in self.coeffs if n >= 0], default=0)
        bottom = max([-n for n, _ in self.coeffs if n < 0], default=0)
        # Horner tables, highest power first
        object.__setattr__(self, "_pos", tuple(reversed(pos[: top + 1])))
        object.__setattr__(self, "_neg", tuple(reversed(neg[1 : bottom + 1])))

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, ell):
        return cls(ell, ())

    @classmethod
    def constant(cls, ell, psi0):
        """phi_0 = psi0 / w^2 dw^2."""
        return cls(ell, ((0, psi0),))

    @classmethod
    def power_map(cls, ell, c):
        """The differential whose half-plane representative is c / z^2."""
        return cls.constant(ell, -c * ell**2 / (4 * math.pi**2))

    def coefficient(self, n):
        for m, a in self.coeffs:
            if m == n:
                return a
        return 0j

    @property
    def degrees(self):
        return [n for n, _ in self.coeffs]

    def is_zero(self):
        return not self.coeffs

    def _check_ell(self, other):
        if not math.isclose(self.ell, other.ell, rel_tol=1e-15, abs_tol=0):
            raise DomainError("differentials live on annuli of different core length")

    def __add__(self, other):
        if not isinstance(other, QuadDiff):
            return NotImplemented
        self._check_ell(other)
        return QuadDiff(self.ell, list(self.coeffs) + list(other.coeffs))

    def __neg__(self):
        return QuadDiff(self.ell, [(n, -a) for n, a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return QuadDiff(self.ell, [(n, scalar * a) for n, a in self.coeffs])

    __rmul__ = __mul__

    # evaluation ---------------------------------------------------------

    def psi(self, w):
        """Laurent polynomial psi at w (scalar or array)."""
        if np.ndim(w) == 0:
            return self._psi_scalar(complex(w))
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w)
        for a in self._pos:
            out = out * w + a
        if self._neg:
            inv = 1 / w
            tail = np.zeros_like(w)
            for a in self._neg:
                tail = (tail + a) * inv
            out = out + tail
        return out

    def _psi_scalar(self, w):
        out = 0j
        for a in self._pos:
            out = out * w + a
        if self._neg:
            inv = 1 / w
            tail = 0j
            for a in self._neg:
                tail = (tail + a) * inv
            out += tail
        return out

    def dpsi(self, w):
        """Derivative psi'(w)."""
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w)
        for n, a in self.coeffs:
            if n != 0:
                out = out + n * a * w ** (n - 1)
        return out if out.ndim else complex(out)

    def w_of_z(self, z):
        """Covering map U -> A_ell with the imaginary axis onto |w| = 1."""
        k = 2j * math.pi / self.ell
        if np.ndim(z) == 0:
            return cmath.exp(k * (cmath.log(z) - 0.5j * math.pi))
        z = np.asarray(z, dtype=complex)
        return np.exp(k * (np.log(z) - 0.5j * math.pi))

    def z_of_w(self, w):
        """A lift of w to U, in the fundamental domain 1 <= |z| < e^ell."""
        w = np.asarray(w, dtype=complex)
        s = np.mod(np.angle(w) / (2 * math.pi), 1.0)
        theta = 0.5 * math.pi - self.ell * np.log(np.abs(w)) / (2 * math.pi)
        z = np.exp(self.ell * s + 1j * theta)
        return z if z.ndim else complex(z)

    def q(self, z):
        """Half-plane representative q(z), with phi = q(z) dz^2 on U."""
        scale = -4 * math.pi**2 / self.ell**2
        if np.ndim(z) == 0:
            z = complex(z)
            return scale * self._psi_scalar(self.w_of_z(z)) / (z * z)
        z = np.asarray(z, dtype=complex)
        return scale * self.psi(self.w_of_z(z)) / z**2

    def dq(self, z):
        """Derivative of the half-plane representative."""
        z = np.asarray(z, dtype=complex)
        w = self.w_of_z(z)
        scale = -4 * math.pi**2 / self.ell**2
        dw = 2j * math.pi / self.ell * w / z
        out = scale * (self.dpsi(w) * dw / z**2 - 2 * self.psi(w) / z**3)
        return out if np.ndim(out) else complex(out)

    def h(self, z):
        """Phi(n, n) = q(z) z^2 for the field n = z d/dz."""
        return -4 * math.pi**2 / self.ell**2 * self.psi(self.w_of_z(z))

    def annulus_value(self, w):
        """Coefficient of dw^2: psi(w) / w^2."""
        w = np.asarray(w, dtype=complex)
        out = self.psi(w) / w**2
        return out if out.ndim else complex(out)

    # serialization ------------------------------------------------------

    def to_dict(self):
        return {"ell": self.ell, "coeffs": [[n, a.real, a.imag] for n, a in self.coeffs]}

    @classmethod
    def from_dict(cls, data):
        if set(data) - {"ell", "coeffs"}:
            raise DomainError(f"unknown keys {sorted(set(data) - {'ell', 'coeffs'})}")
        coeffs = [(int(n), complex(re, im)) for n, re, im in data.get("coeffs", [])]
        return cls(data["ell"], coeffs)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class NeighborhoodProfile:
    """Sup K of the pointwise norm over the r-neighborhood of the core geodesic."""

    r: float
    K: float


def annulus_density(ell, w):
    """Hyperbolic density of A_ell: l / (2 pi |w| cos((l / 2 pi) log |w|))."""
    w = np.asarray(w, dtype=complex)
    rho = np.abs(w)
    return ell / (2 * math.pi * rho * np.cos(ell / (2 * math.pi) * np.log(rho)))


def pointwise_norm(phi, z, chart="half-plane"):
    """Ratio of |phi| with the hyperbolic area form at z.

    Parameters
    ----------
    phi : QuadDiff
    z : complex or array
        A point of U (``chart="half-plane"``) or of A_ell (``chart="annulus"``).
    chart : {"half-plane", "annulus"}
    """
    zz = np.asarray(z, dtype=complex)
    if chart == "half-plane":
        if np.any(zz.imag <= 0):
            raise DomainError("point outside the upper half-plane")
        out = np.abs(phi.q(zz)) * zz.imag**2
    elif chart == "annulus":
        bound = math.exp(math.pi**2 / phi.ell)
        rho = np.abs(zz)
        if np.any(rho <= 1 / bound) or np.any(rho >= bound):
            raise DomainError("point outside the annulus A_ell")
        out = np.abs(phi.annulus_value(zz)) / annulus_density(phi.ell, zz) ** 2
    else:
        raise DomainError(f"unknown chart {chart!r}")
    return float(out) if np.ndim(out) == 0 else out


def decompose(phi):
    """Split phi = phi_plus + phi_0 + phi_minus by sign of Laurent exponent.

    ``phi_plus`` keeps negative powers of w (it extends over |w| = infinity),
    ``phi_minus`` keeps positive powers (it extends over w = 0) and ``phi_0``
    is the constant multiple of dw^2 / w^2.
    """
    plus = QuadDiff(phi.ell, [(n, a) for n, a in phi.coeffs if n < 0])
    zero = QuadDiff(phi.ell, [(n, a) for n, a in phi.coeffs if n == 0])
    minus = QuadDiff(phi.ell, [(n, a) for n, a in phi.coeffs if n > 0])
    return plus, zero, minus


def angular_halfwidth(r):
    """Angular half-width about pi/2 of the hyperbolic r-neighborhood of the axis."""
    return math.atan(math.sinh(r))


def _norm_on_grid(phi, theta, s):
    """Pointwise norm at z = exp(ell s + i theta), broadcasting theta against s."""
    theta = np.asarray(theta, dtype=float)
    s = np.asarray(s, dtype=float)
    modulus = np.exp(-2 * math.pi * (theta - 0.5 * math.pi) / phi.ell)
    w = modulus * np.exp(2j * math.pi * s)
    return 4 * math.pi**2 / phi.ell**2 * np.abs(phi.psi(w)) * np.sin(theta) ** 2


def _theta_range(r):
    if r is None:
        return 0.0, math.pi
    beta = angular_halfwidth(r)
    return 0.5 * math.pi - beta, 0.5 * math.pi + beta


def _polish_max(phi, theta_lo, theta_hi, starts):
    def neg(x):
        return -float(_norm_on_grid(phi, x[0], x[1]))

    best = 0.0
    for t0, s0 in starts:
        res = minimize(neg, x0=[t0, s0], method="L-BFGS-B",
                       bounds=[(theta_lo, theta_hi), (s0 - 0.05, s0 + 0.05)])
        best = max(best, -res.fun)
    return best


def _grid_sup(phi, lo, hi, n_theta, n_s):
    theta = np.linspace(lo, hi, n_theta)
    s = np.arange(n_s) / n_s
    vals = _norm_on_grid(phi, theta[:, None], s[None, :])
    return vals, theta, s


def sup_norm(phi, r=None, tol=1e-3, max_iter=4):
    """Sup of the pointwise norm over the r-neighborhood (whole annulus if r is None)."""
    if phi.is_zero():
        return 0.0
    lo, hi = _theta_range(r)
    n_theta, n_s = NEIGHBORHOOD_GRID
    prev = None
    for _ in range(max_iter):
        vals, theta, s = _grid_sup(phi, lo, hi, n_theta, n_s)
        current = float(vals.max())
        if prev is not None and abs(current - prev) <= tol * max(current, 1e-300):
            break
        prev = current
        n_theta *= 2
        n_s *= 2
    else:
        raise QuadratureFailure("sup-norm grid refinement did not settle")
    flat = np.argsort(vals, axis=None)[-4:]
    starts = [(theta[i // vals.shape[1]], s[i % vals.shape[1]]) for i in flat]
    # refinement can only raise the estimate; the grid max is a lower bound
    return max(current, _polish_max(phi, lo, hi, starts))


def neighborhood_sup(phi, r):
    """K = sup of the pointwise norm over {z : d(z, axis) <= r}."""
    if not r > 0:
        raise DomainError("neighborhood radius must be positive")
    return NeighborhoodProfile(float(r), sup_norm(phi, r))


def sup_norm_on_geodesic(phi):
    """Sup of the pointwise norm over the core geodesic, ||phi||_gamma."""
    if phi.is_zero():
        return 0.0
    n = GEODESIC_SAMPLES
    s = np.arange(n) / n
    vals = _norm_on_grid(phi, 0.5 * math.pi, s)
    k = int(np.argmax(vals))
    # 4x refinement around the coarse maximum, then a bounded polish
    fine = s[k] + np.linspace(-1.0, 1.0, 9) / n
    fine_vals = _norm_on_grid(phi, 0.5 * math.pi, fine)
    j = int(np.argmax(fine_vals))
    res = minimize_scalar(lambda x: -float(_norm_on_grid(phi, 0.5 * math.pi, x)),
                          bounds=(fine[j] - 0.25 / n, fine[j] + 0.25 / n), method="bounded",
                          options={"xatol": 1e-12})
    return float(max(vals[k], fine_vals[j], -res.fun))


def _gauss_panels(lo, hi, panels, order=8):
    x, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * wts[None, :]).ravel()
    return nodes, weights


def _l2_squared(phi, lo, hi, panels, n_s):
    theta, wt = _gauss_panels(lo, hi, panels)
    s = np.arange(n_s) / n_s
    modulus = np.exp(-2 * math.pi * (theta - 0.5 * math.pi) / phi.ell)
    w = modulus[:, None] * np.exp(2j * math.pi * s)[None, :]
    mean_sq = np.mean(np.abs(phi.psi(w)) ** 2, axis=1)
    # |phi|^2 / area^2 times area: (4 pi^2 / l^2)^2 |psi|^2 sin^2(theta) * l dtheta ds
    return phi.ell * (4 * math.pi**2 / phi.ell**2) ** 2 * float(np.sum(wt * mean_sq * np.sin(theta) ** 2))


def lp_norm(phi, p=2, r=None, tol=1e-10, max_iter=12):
    """Hyperbolic L^p norm, p in {2, inf}, over A_ell or the sub-annulus of half-width r.

    The L^2 value uses composite Gauss-Legendre panels across the annulus and
    the trapezoid rule around it, doubling both until the relative change is
    below ``tol``.
    """
    if p in (math.inf, "inf", np.inf):
        return sup_norm(phi, r, tol=max(tol, 1e-6))
    if p != 2:
        raise DomainError("only p = 2 and p = inf are supported")
    if phi.is_zero():
        return 0.0
    lo, hi = _theta_range(r)
    top = max(abs(n) for n in phi.degrees)
    n_s = max(16, 4 * (2 * top + 1))
    panels = 8
    prev = _l2_squared(phi, lo, hi, panels, n_s)
    for _ in range(max_iter):
        panels *= 2
        n_s *= 2
        current = _l2_squared(phi, lo, hi, panels, n_s)
        if not math.isfinite(current):
            break
        if abs(current - prev) <= tol * abs(current):
            return math.sqrt(current)
        prev = current
    raise QuadratureFailure("L2 quadrature did not reach tolerance")
