"""Exception types shared across the package."""


class MembershipError(ValueError):
    """An element is not in the congruence subgroup at hand."""


class ParseError(ValueError):
    """Malformed input file; the message carries the line number."""


class PrecisionError(ArithmeticError):
    """A truncated series cannot meet the requested tolerance."""


class ResourceError(RuntimeError):
    """An enumeration or iteration would exceed its configured cap."""


class ReductionError(ResourceError):
    """Parabolic reduction stopped without certifying the truncated geodesic.

    ``best`` holds the last iterate so callers can inspect how far it got.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
