"""Exception and warning types shared across the package."""


class NumericalError(Exception):
    """Base class for numerical failures (quadrature, root finding, simulation)."""


class NonIntegrable(NumericalError):
    """Adaptive quadrature failed to converge within its budget."""


class BracketFailure(NumericalError):
    """No sign change found for a bracketed root solve; the model/parameter
    combination does not admit a solution in the searched range."""


class ThetaZero(ValueError):
    """Raised when a formula that is 0/0 at theta=0 is called with theta=0.
    Callers must route theta=0 to the Shannon-limit formulas instead."""


class Unstable(NumericalError):
    """Queue simulation with an arrival rate at or above the service capacity."""


class InsufficientSamples(NumericalError):
    """Too few threshold crossings to fit a tail decay rate."""


class DivergentInverseMoment(UserWarning):
    """E{1/z} is infinite; the delay-limited rate with transmitter CSI is 0."""
