"""Exception types shared by the library and the command line."""


class ResourceBoundExceeded(RuntimeError):
    """Raised when an enumeration grows past a configured bound."""

    def __init__(self, message: str, partial_count: int = 0):
        super().__init__("%s (partial count %d)" % (message, partial_count))
        self.partial_count = partial_count


class InputError(ValueError):
    """Malformed or schema-violating input."""
