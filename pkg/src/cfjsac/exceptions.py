"""Exception hierarchy shared by every module of the package."""


class CfjsacError(Exception):
    """Base class for all package errors."""


class DimensionError(CfjsacError, ValueError):
    """Operands have incompatible shapes."""


class NotHermitianError(CfjsacError, ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class ConfigError(CfjsacError, ValueError):
    """A scenario configuration is invalid."""


class DegenerateSensingError(CfjsacError, ValueError):
    """The sensing receive beamformer is undefined for this input."""


class DegenerateInstanceError(CfjsacError):
    """The problem instance is degenerate (e.g. zero objective matrix)."""


class SolverFailure(CfjsacError):
    """The dual solver returned a point inconsistent with optimality."""


class CertificateViolation(CfjsacError):
    """A numerical optimality or rank certificate did not hold."""


class BaselineUndefined(CfjsacError, ValueError):
    """A closed-form baseline beamformer is undefined for the channels."""
