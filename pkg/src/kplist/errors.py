"""Exception hierarchy shared by every module."""


class KplistError(Exception):
    """Base class for all package errors."""


class InputError(KplistError, ValueError):
    """Malformed argument: unknown node, bad parameter, infeasible generator."""


class StructuralError(KplistError, ValueError):
    """The input lacks a structural property an operation needs (e.g. connectivity)."""


class CapabilityError(KplistError, RuntimeError):
    """Requested method exceeds a documented size cap."""


class ProtocolViolation(KplistError, RuntimeError):
    """A bandwidth, word-budget or routing-load bound was exceeded."""


class ValidationFailure(KplistError, AssertionError):
    """A decomposition or report failed validation; ``witnesses`` lists the culprits."""

    def __init__(self, message: str, witnesses=None):
        super().__init__(message)
        self.witnesses = list(witnesses or [])


class InvariantFailure(KplistError, AssertionError):
    """An internal invariant that the algorithm's analysis guarantees did not hold."""


class ClaimViolation(KplistError, AssertionError):
    """A quantitative claim checked during a run was violated."""


class StatisticalFailure(KplistError, RuntimeError):
    """Randomized step kept failing after the allowed number of retries."""


class NonTermination(KplistError, RuntimeError):
    """Outer iteration bound exceeded; ``shrink`` holds per-iteration diagnostics."""

    def __init__(self, message: str, shrink=None):
        super().__init__(message)
        self.shrink = list(shrink or [])
