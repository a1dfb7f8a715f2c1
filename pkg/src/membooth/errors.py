"""Exception types raised across the package."""


class MemboothError(Exception):
    """Base class for all package-specific errors."""


class EmptySurface(MemboothError):
    """Memory surface form normalizes to the empty string."""


class PhraseTooLong(MemboothError):
    """Memory surface form exceeds the 4-word phrase cap."""


class InvalidThreshold(MemboothError):
    """Match threshold outside (0, 1]."""


class OverlappingMatches(MemboothError):
    """Resolved matches overlap; indicates a resolver bug."""


class DanglingProvenance(MemboothError):
    """A memory-hit token references an entry missing from the snapshot."""


class OutOfRange(MemboothError):
    """Queried time lies outside the talk span."""


class EmptyReference(MemboothError):
    """Reference contains zero words; WER undefined."""


class MissingCorpusInput(MemboothError):
    """A scenario requires a corpus artifact that was not provided."""


class ConfigError(MemboothError):
    """Bad CLI / scenario configuration (exit code 2)."""


class ProtocolError(MemboothError):
    """Malformed frame or illegal message on the wire."""
