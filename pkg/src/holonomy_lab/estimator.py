"""Estimator-style wrapper around the developing map.

``DevelopingMap().fit(phi)`` computes the core holonomy and the fixed-point
normalizer once; ``transform`` then evaluates the developing map at arrays
of points and ``pullback_field`` the coefficient of f*n.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .develop import DEFAULT_TOL, developing_map_at, holonomy
from .errors import DomainError
from .quaddiff import QuadDiff
from .variation import pullback_field


def check_points(Z):
    """Flatten Z to a 1-d complex array of upper half-plane points."""
    Z = np.asarray(Z, dtype=complex).ravel()
    if Z.size == 0:
        raise DomainError("no points given")
    if not np.all(np.isfinite(Z)):
        raise DomainError("points must be finite")
    if np.any(Z.imag <= 0):
        raise DomainError("points must lie in the upper half-plane")
    return Z


class DevelopingMap(BaseEstimator, TransformerMixin):
    """Developing map of the projective structure with Schwarzian ``phi``.

    Parameters
    ----------
    tol : float
        Relative tolerance of the ODE integration.
    normalized : bool
        Apply the normalizer sending the holonomy to z -> e^L z.

    Attributes
    ----------
    holonomy_ : HolonomyResult
    length_ : complex
        Complex length of the core holonomy.
    normalizer_ : MobiusMap
    """

    def __init__(self, tol=DEFAULT_TOL, normalized=True):
        self.tol = tol
        self.normalized = normalized

    def fit(self, phi, y=None):
        if not isinstance(phi, QuadDiff):
            raise TypeError("fit expects a QuadDiff")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        self.phi_ = phi
        self.holonomy_ = holonomy(phi, self.tol)
        self.length_ = self.holonomy_.length.value
        self.normalizer_ = self.holonomy_.normalizer
        return self

    def transform(self, Z):
        """Values f(z) at each point."""
        check_is_fitted(self, "holonomy_")
        Z = check_points(Z)
        return np.array([developing_map_at(self.phi_, z, self.normalized, self.tol, self.holonomy_)[0]
                         for z in Z])

    def derivative(self, Z):
        check_is_fitted(self, "holonomy_")
        Z = check_points(Z)
        return np.array([developing_map_at(self.phi_, z, self.normalized, self.tol, self.holonomy_)[1]
                         for z in Z])

    def pullback_field(self, Z):
        """Coefficients f / f' of the pulled-back field (always normalized)."""
        check_is_fitted(self, "holonomy_")
        Z = check_points(Z)
        return np.array([pullback_field(self.phi_, z, self.tol, self.holonomy_) for z in Z])
