"""Exception hierarchy shared by every module."""


class HaloGraphError(Exception):
    """Base class for all library errors."""


class InvalidGraph(HaloGraphError, ValueError):
    pass


class ZeroState(HaloGraphError, ArithmeticError):
    """Raised when a state has no amplitude above the pruning threshold."""


class InvalidParam(HaloGraphError, ValueError):
    pass


class ParseError(HaloGraphError, ValueError):
    pass


class DuplicateKet(ParseError):
    pass


class ShapeMismatch(HaloGraphError, ValueError):
    """Graph detectors and target particles disagree in count or dimension."""


class NoSolution(HaloGraphError):
    """Discovery could not reach the fidelity threshold."""


class NotAHalo(HaloGraphError):
    """An extracted subgraph does not act as a multi-photon emitter."""


class ArityMismatch(HaloGraphError, ValueError):
    pass


class MissingTemplate(HaloGraphError, LookupError):
    pass


class UnassignedInput(HaloGraphError, ValueError):
    """An input vertex has no mode, or a mode outside its dimension."""
