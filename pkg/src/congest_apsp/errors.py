"""Exception types shared across the package."""


class GraphError(ValueError):
    """Base class for malformed graph input. `edge` names the offender when known."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class MissingReverseEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class WeightOutOfRange(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class BitRangeViolation(ValueError):
    pass


class CongestError(RuntimeError):
    """Raised when a node program breaks the model contract."""


class BandwidthViolation(CongestError):
    pass


class NonQuiescent(CongestError):
    pass


class Disconnected(CongestError):
    pass


class NegativeReducedWeight(ValueError):
    pass


class NoValidParent(RuntimeError):
    pass


class VerificationFailed(RuntimeError):
    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = list(witnesses)


class TooLarge(ValueError):
    pass


class BadSpec(ValueError):
    pass
