"""Exception hierarchy shared by all ptrans modules."""


class PTransError(Exception):
    pass


class ParseError(PTransError):
    """Malformed input text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class WellFormednessError(PTransError):
    pass


class UnboundMetaVariable(PTransError):
    pass


class ActionFailure(PTransError):
    """An action that does not apply; strategies drop the candidate model."""


class NodesInDifferentThreads(ActionFailure):
    pass


class ExitHasSuccessor(ActionFailure):
    """The action would give a thread's exit node an outgoing edge."""


class MissingNode(PTransError):
    pass


class MissingEdge(PTransError):
    pass


class ExitUnreachable(PTransError):
    pass


class SortMismatch(PTransError):
    pass


class UnsortedVariable(PTransError):
    pass


class UnboundVariable(PTransError):
    pass


class ProductTooLarge(PTransError):
    pass


class FuelExhausted(PTransError):
    pass


class ResultCapExceeded(PTransError):
    pass


class BoundTooSmall(PTransError):
    pass


class Timeout(PTransError):
    pass
