"""Exception hierarchy shared by every module of the package."""


class QtlError(Exception):
    """Base class for all errors raised by qtlogic."""


class SymbolOutOfDomainError(QtlError):
    """A formula mentions a symbol the assignment does not define."""


class ResourceError(QtlError):
    """A configured enumeration or size cap was exceeded."""


class ParseError(QtlError):
    def __init__(self, message, text=None, pos=None):
        self.text = text
        self.pos = pos
        if text is not None and pos is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class EmptyRestrictionError(QtlError):
    """No row of the team is defined on the requested symbol set."""


class DomainMismatchError(QtlError):
    pass


class CoverError(QtlError):
    """A cover is malformed or not dominated by the team's support."""


class SupportError(QtlError):
    """Formula supports are not dominated by the team support, or Var(phi) is not inside V."""


class TableError(QtlError):
    """A probability table violates the distribution invariants."""


class NotContradictoryError(QtlError):
    pass


class AmbiguityError(QtlError):
    pass


class SynthesisInvariantError(QtlError):
    """A gluing-step invariant of the witness construction was violated."""
