"""Exception hierarchy shared across the package.

Every failure that a caller can reasonably recover from gets its own class,
so the CLI can map them onto exit codes without string matching.
"""


class XDAError(Exception):
    """Base class for all errors raised by this package."""


class FieldMismatch(XDAError):
    """Arithmetic attempted between quadratic scalars over different radicands."""


class PrecisionExhausted(XDAError):
    """A digit-stream refinement hit the precision cap before certifying.

    Attributes:
        index: first position (1-based) that could not be certified.
        cap:   the precision cap (digits) that was in force.
    """

    def __init__(self, index, cap, msg=None):
        self.index = index
        self.cap = cap
        super().__init__(msg or "uncertified at index %d with precision cap %d" % (index, cap))


class RationalPoint(XDAError):
    """A target that must be irrational was detected to be rational."""


class HeightCapExceeded(XDAError):
    """The lattice height schedule passed the configured cap without success."""

    def __init__(self, cap, msg=None):
        self.cap = cap
        super().__init__(msg or "height schedule exceeded cap %d" % cap)


class NotCollinear(XDAError):
    """Input points do not lie on a single line."""


class OutOfRange(XDAError):
    """Scalar input outside the domain of the operation."""


class OnLine(XDAError):
    """A point claimed to be off a rational line actually lies on it."""


class OnCircle(XDAError):
    """A point claimed to be off the unit circle actually lies on it."""


class DegenerateDiameter(XDAError):
    """A covering region has zero diameter."""


class UndecidableComparison(XDAError):
    """An exact comparison landed on equality where a strict answer was required."""


class InvariantViolation(XDAError):
    """An internal certificate failed re-verification.  Always a bug."""


class ConfigError(XDAError):
    """Malformed configuration or input file."""
