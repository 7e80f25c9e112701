"""Exception types raised by activefriending."""


class ActiveFriendingError(Exception):
    """Base class for all errors raised by this package."""


class GraphFormatError(ActiveFriendingError, ValueError):
    """A graph file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NormalizationError(ActiveFriendingError, ValueError):
    """Incoming familiarity weights of a node sum to more than one."""

    def __init__(self, node, total):
        self.node = node
        self.total = total
        super().__init__(f"weights into node {node} sum to {total!r} > 1")


class InvalidInstanceError(ActiveFriendingError, ValueError):
    """The (graph, s, t) triple does not define a friending problem."""


class ContractViolation(ActiveFriendingError, ValueError):
    """An argument breaks an operation's precondition (e.g. I not within candidates)."""


class ParameterError(ActiveFriendingError, ValueError):
    """Numerical parameters are outside their valid range."""


class EnumerationTooLarge(ActiveFriendingError):
    """Exhaustive realization enumeration would exceed the configured cap."""


class PMaxTooSmall(ActiveFriendingError):
    """The stopping rule did not collect enough type-1 traces.

    ``upper_bound`` is the empirical bound ``successes_needed / samples_drawn``;
    the true maximum acceptance probability is most likely below it.
    """

    def __init__(self, upper_bound, samples):
        self.upper_bound = upper_bound
        self.samples = samples
        super().__init__(
            f"p_max indistinguishable from 0 after {samples} samples "
            f"(empirical upper bound {upper_bound:.3g})"
        )


class InfeasibleCoverError(ActiveFriendingError, ValueError):
    """The cover target p exceeds the number of coverable subsets."""


class IntractableError(ActiveFriendingError):
    """The exact cover solver exceeded its size cap or node budget."""
