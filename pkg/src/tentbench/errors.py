"""Exception types shared across the package."""


class TentbenchError(Exception):
    """Base class for all package-specific errors."""


class InvalidSpecError(TentbenchError, ValueError):
    """Grid specification violates a structural invariant."""


class RadiusTooLargeError(TentbenchError, ValueError):
    """Ball radius reaches extent/2, so the periodic ball would self-overlap."""


class ApertureTooLargeError(RadiusTooLargeError):
    """Cone aperture produces a ball radius beyond the torus half-width."""


class GridMismatchError(TentbenchError, ValueError):
    """Binary operation between fields living on different grids."""


class VanishingPreconditionError(TentbenchError, ValueError):
    """Input field does not vanish on the leading time slices."""


class RangeViolationError(TentbenchError, ValueError):
    """Parameter outside the admissible range (for instance beta >= 1)."""


class DegenerateInputError(TentbenchError, ValueError):
    """Input is degenerate for the requested measurement (e.g. zero field)."""


class DegenerateFamilyError(TentbenchError, ValueError):
    """Off-diagonal fit family does not span distinct abscissae."""


class EllipticityError(TentbenchError, ValueError):
    """Coefficient field violates Re a >= lambda > 0."""


class GridTooLargeError(TentbenchError, ValueError):
    """Dense spectral factorization requested beyond the desk-scale cap."""


class PowerIterationError(TentbenchError, RuntimeError):
    """Operator-norm power iteration failed to converge."""


class OffGridError(TentbenchError, ValueError):
    """Requested time (e.g. t/2) does not lie on the time grid."""


class FieldFormatError(TentbenchError, ValueError):
    """Field file cannot be parsed or is inconsistent with its header."""


class ConfigError(TentbenchError, ValueError):
    """Experiment configuration is missing, malformed or out of range."""
