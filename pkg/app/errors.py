class SyzError(ValueError):
    """Base class for every error raised by the toolkit."""


class StructuralError(SyzError):
    """Malformed input: wrong lengths, bad indices, unreadable files, unknown presets."""


class DomainError(SyzError):
    """A value was evaluated outside the domain where it is defined."""


class UnsupportedError(SyzError):
    """The request is well formed but outside what the engine handles."""


class PreconditionError(SyzError):
    """An operation was called with arguments violating its contract."""
