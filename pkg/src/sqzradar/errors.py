"""Exception types raised by the package."""


class RadarError(Exception):
    """Base class for package errors."""


class UnknownModeError(RadarError, KeyError):
    """A mode label is not part of the register."""


class RegisterMismatchError(RadarError, ValueError):
    """Operands live on different mode registers."""


class DimensionCapError(RadarError):
    """The tensor-product dimension exceeds the configured cap."""


class NonHermitianError(RadarError, ValueError):
    """An operator expected to be Hermitian is not."""


class NonUnitaryError(RadarError, ValueError):
    """Beamsplitter coefficients do not define a unitary."""


class TruncationError(RadarError):
    """Fock-space truncation leaks too much probability to trust a result."""


class ScenarioError(RadarError, ValueError):
    """A detection scenario is missing parameters or violates a constraint."""
