"""Exception types raised across the package."""


class HolonomyLabError(Exception):
    """Base class for all package errors."""


class DomainError(HolonomyLabError, ValueError):
    """Input lies outside the domain of an operation."""


class ParabolicOrIdentity(HolonomyLabError):
    """Holonomy is parabolic or the identity, so complex length is undefined."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class QuadratureFailure(HolonomyLabError):
    """A quadrature could not reach its tolerance within the iteration cap."""


class StepFailure(HolonomyLabError):
    """Adaptive ODE step control could not meet the requested tolerance."""


class NearPole(HolonomyLabError):
    """The developing map is too close to 0 or infinity along the path."""

    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


class DegeneratePatch(HolonomyLabError):
    """A surface patch does not carry a valid unit normal at its basepoint."""


class DegenerateData(HolonomyLabError, ValueError):
    """Inputs coincide or otherwise fail to determine the requested object."""


class SamplerFailure(HolonomyLabError):
    """The random differential sampler could not hit its target norm."""


class ConfigError(HolonomyLabError, ValueError):
    """An experiment configuration is malformed."""
