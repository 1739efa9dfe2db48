"""Exception types shared across clusterforge."""


class ClusterforgeError(Exception):
    """Base class for library errors."""


class ParamsError(ClusterforgeError, ValueError):
    """Invalid (n, k, d) combination."""


class FamilyError(ClusterforgeError, ValueError):
    """A set or family violates k-uniformity or range constraints."""


class ParseError(ClusterforgeError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HypothesisViolation(ClusterforgeError, ValueError):
    """Inputs do not satisfy the hypothesis a check requires.

    ``witness`` carries the offending sets (as bitmasks) when available.
    """

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class ResourceGuardError(ClusterforgeError, RuntimeError):
    """An enumeration would exceed its configured budget."""
