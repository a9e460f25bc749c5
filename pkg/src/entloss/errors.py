"""Exception hierarchy shared by every module of the package."""


class EntlossError(Exception):
    """Base class for all errors raised by entloss."""


class DimMismatch(EntlossError, ValueError):
    pass


class IndexOutOfRange(EntlossError, IndexError):
    pass


class NotHermitian(EntlossError, ValueError):
    pass


class NotSquare(EntlossError, ValueError):
    pass


class NotCPTP(EntlossError, ValueError):
    pass


class NotNormalized(EntlossError, ValueError):
    pass


class InvalidState(EntlossError, ValueError):
    pass


class UnknownChannel(EntlossError, KeyError):
    pass


class BadParam(EntlossError, ValueError):
    pass


class DimMetadataMissing(EntlossError, ValueError):
    pass


class NotComputable(EntlossError, ValueError):
    pass


class DimTooLarge(EntlossError, ValueError):
    pass


class DomainError(EntlossError, ValueError):
    pass


class GridOutOfRange(EntlossError, ValueError):
    pass


class ConfigError(EntlossError, ValueError):
    pass


class ParseError(EntlossError, ValueError):
    pass


class InternalConsistencyError(EntlossError, RuntimeError):
    """A quantity that must be non-negative came out clearly negative."""
