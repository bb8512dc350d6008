"""Shared exception types."""


class StructuralError(ValueError):
    """Operands belong to mismatched rings / truncations / shapes."""


class InvertibilityError(ArithmeticError):
    """Inversion of a non-unit; carries the offending element."""

    def __init__(self, element, message="not a unit"):
        super().__init__(f"{message}: {element!r}")
        self.element = element


class UnsupportedRingError(TypeError):
    """Operation not defined over the given coefficient ring."""


class UnsupportedTowerError(ValueError):
    """Tower shape outside the supported (Mittag-Leffler) cases."""


class ResourceError(RuntimeError):
    """A caller-supplied cap was exceeded; may carry partial results."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DegreeCapError(ResourceError):
    """Polynomial total degree exceeded the caller-supplied cap."""
