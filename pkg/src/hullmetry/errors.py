"""Exception types shared across the package."""


class HullmetryError(Exception):
    """Base class for all package errors."""


class DegenerateInput(HullmetryError):
    """Input has no interior in its ambient dimension (affinely dependent, zero volume)."""


class DimensionMismatch(HullmetryError):
    """Operands live in different ambient dimensions."""


class NonOrientable(HullmetryError):
    """A consistent outward orientation cannot be assigned to the boundary."""


class NonpositiveScale(HullmetryError):
    """Scaling factor must be strictly positive."""


class ParamOutOfRange(HullmetryError):
    """A numeric parameter is outside its admissible range."""


class TooLarge(HullmetryError):
    """Input exceeds the size cap of an exhaustive algorithm."""


class Unsupported(HullmetryError):
    """The input falls outside the cases this operation implements."""
