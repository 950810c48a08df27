class HmlError(Exception):
    """Base class for all errors raised by hmlchar."""


class ParseError(HmlError):
    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class FragmentError(HmlError):
    """Formula is outside the fragment an operation requires."""


class ResourceLimit(HmlError):
    """A configured enumeration or search cap was exceeded."""


class PreconditionError(HmlError):
    """An operation was called on input violating its precondition."""
