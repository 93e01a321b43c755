"""Exception types raised by the detvar toolkit.

Every validation error names the violated invariant and carries the
violation magnitude in its message so failures are reproducible.
"""


class DetvarError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatch(DetvarError):
    """Array has the wrong shape, or entries are not finite."""


class NotHermitian(DetvarError):
    """Matrix differs from its conjugate transpose beyond tolerance."""


class NotPositive(DetvarError):
    """Matrix has an eigenvalue below the positivity tolerance."""


class TraceNotOne(DetvarError):
    """Trace differs from 1 beyond tolerance."""


class IndexOutOfRange(DetvarError):
    """Block index outside 1..m / 1..n."""


class KOutOfRange(DetvarError):
    """Rank bound k outside the valid range for the queried side."""


class NotNormalized(DetvarError):
    """State vector norm differs from 1 beyond tolerance."""


class NotPure(DetvarError):
    """Density input has rank > 1 where a pure state is required."""


class CombinatorialBlowup(DetvarError):
    """Requested minor enumeration exceeds the configured cap."""


class DegreeZero(DetvarError):
    """Polynomial factorization requires degree >= 1."""


class EnsembleMismatch(DetvarError):
    """Supplied ensemble does not realize the supplied density matrix."""


class ParseError(DetvarError):
    """JSON input is structurally malformed."""
