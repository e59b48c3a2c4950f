"""Seeded random quadratic differentials.

Draws use numpy's Philox counter-based generator, ``Generator(Philox(seed))``,
so any implementation of Philox4x64-10 can reproduce a suite from its seed.
Per-sample generators are built from ``(seed, index)`` through
``SeedSequence`` so rows of a suite are independent of evaluation order.
"""

import math

import numpy as np

from .errors import SamplerFailure
from .quaddiff import QuadDiff, angular_halfwidth, neighborhood_sup, sup_norm_on_geodesic

DEFAULT_DEGREE = 4
K_RTOL = 0.02


def generator(seed, index=None):
    """Philox generator for a seed, optionally split off for one sample index."""
    entropy = [int(seed) & (2**64 - 1)]
    if index is not None:
        entropy.append(int(index))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _draw_coeffs(rng, ell, degree, r):
    # damp w^n by its growth across the r-neighborhood, plus one e-fold per degree
    growth = 2 * math.pi * angular_halfwidth(r) / ell
    out = []
    for n in range(-degree, degree + 1):
        re, im = rng.standard_normal(2)
        out.append((n, complex(re, im) * math.exp(-abs(n) * (growth + 1.0))))
    return out


def random_direction(seed, ell, degree=DEFAULT_DEGREE, index=None, r=0.5):
    """A random direction scaled to unit sup norm along the core geodesic."""
    rng = generator(seed, index)
    direction = QuadDiff(ell, _draw_coeffs(rng, ell, degree, r))
    size = sup_norm_on_geodesic(direction)
    if not (math.isfinite(size) and size > 0):
        raise SamplerFailure(f"degenerate direction for seed {seed}")
    return direction * (1 / size)


def sample_quaddiff(seed, ell_range=(0.5, 2.0), K_target=1 / 32, r=0.5, degree=DEFAULT_DEGREE, index=None,
                    max_iter=4):
    """A differential with neighborhood_sup(phi, r).K equal to K_target within 2%.

    K is positively homogeneous in phi, so one rescale suffices in exact
    arithmetic; a few passes absorb the sup estimator's tolerance.
    """
    rng = generator(seed, index)
    lo, hi = ell_range
    ell = float(lo + (hi - lo) * rng.random()) if hi > lo else float(lo)
    if K_target == 0:
        return QuadDiff.zero(ell)
    phi = QuadDiff(ell, _draw_coeffs(rng, ell, degree, r))
    for _ in range(max_iter):
        K = neighborhood_sup(phi, r).K
        if not (math.isfinite(K) and K > 0):
            raise SamplerFailure(f"degenerate draw for seed {seed} (K = {K})")
        if abs(K - K_target) <= K_RTOL * K_target / 4:
            return phi
        phi = phi * (K_target / K)
    K = neighborhood_sup(phi, r).K
    if abs(K - K_target) > K_RTOL * K_target:
        raise SamplerFailure(f"rescaling did not reach K_target for seed {seed}")
    return phi
