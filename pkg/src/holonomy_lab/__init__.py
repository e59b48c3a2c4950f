"""Numerical experiments with projective structures on annuli.

Developing maps and holonomy from Schwarzian data, first variation of
complex length, Epstein-surface frames and curvature, the hyperbolic Gauss
map, and bound calculators for thin parts of hyperbolic surfaces.
"""

__version__ = "0.1.0"

from .develop import holonomy, solve_schwarzian, developing_map_at, length_family
from .errors import (
    ConfigError,
    DegenerateData,
    DegeneratePatch,
    DomainError,
    HolonomyLabError,
    NearPole,
    ParabolicOrIdentity,
    QuadratureFailure,
    SamplerFailure,
    StepFailure,
)
from .estimator import DevelopingMap
from .hyp_core import INF, ComplexLength, MobiusMap, complex_length, mobius_apply
from .quaddiff import QuadDiff, decompose, lp_norm, neighborhood_sup, pointwise_norm, sup_norm_on_geodesic
from .sampling import sample_quaddiff
from .variation import dlength_fd, dlength_line_integral, model_integral, n_integral, theorem_main_report

__all__ = [
    "ComplexLength", "ConfigError", "DegenerateData", "DegeneratePatch", "DevelopingMap", "DomainError",
    "HolonomyLabError", "INF", "MobiusMap", "NearPole", "ParabolicOrIdentity", "QuadDiff",
    "QuadratureFailure", "SamplerFailure", "StepFailure", "complex_length", "decompose",
    "developing_map_at", "dlength_fd", "dlength_line_integral", "holonomy", "length_family", "lp_norm",
    "mobius_apply", "model_integral", "n_integral", "neighborhood_sup", "pointwise_norm",
    "sample_quaddiff", "solve_schwarzian", "sup_norm_on_geodesic", "theorem_main_report",
]
