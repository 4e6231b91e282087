"""Exception types shared across the package."""


class CylscaleError(Exception):
    """Base class for all package errors."""


class DomainError(CylscaleError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DegenerateInputError(DomainError):
    """Inputs make a derived quantity undefined (division by zero)."""


class InfeasibleDeltaError(DomainError):
    """The admissible interval for the construction parameter delta is empty."""


class SingularPointError(CylscaleError, ValueError):
    """A profile was evaluated on its singular locus."""


class ResolutionError(CylscaleError, ValueError):
    """Grid resolution below the supported minimum."""


class NonFiniteSampleError(CylscaleError, ValueError):
    """A profile produced non-finite values inside the sampled region."""


class RadiusError(CylscaleError, ValueError):
    """A requested radius exceeds the field's cylinder."""


class DivergentIntegralError(CylscaleError, ValueError):
    """Exponents make an integral infinite."""


class InequalityStructureError(CylscaleError, ValueError):
    """A ratio has a zero denominator against a nonzero numerator."""


class SupportError(CylscaleError, ValueError):
    """A test function's support meets the singular locus."""


class GeometryError(CylscaleError, ValueError):
    """A scaled domain does not contain the requested cylinder."""
