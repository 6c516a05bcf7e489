"""Exception hierarchy shared across the package."""


class SPPCError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(SPPCError, ValueError):
    """Rejected configuration: non-prime modulus, infeasible parameters, bad budgets."""


class DecodeFailure(SPPCError):
    """No codeword lies within the allowed error distance of the received word."""


class AmbiguousDecode(DecodeFailure):
    """More than one codeword is consistent with the received word."""


class InfeasibleDecode(DecodeFailure):
    """Too few non-erased symbols for the requested dimension and error budget."""


class EnumerationTooLarge(SPPCError):
    """An exact audit would enumerate more entries than the configured cap."""

    def __init__(self, size, cap):
        super().__init__(f"enumeration of {size} entries exceeds cap {cap}")
        self.size = size
        self.cap = cap


class ProtocolFailure(SPPCError):
    """A protocol round could not be decoded."""

    def __init__(self, round_index, cause):
        super().__init__(f"round {round_index} failed: {cause}")
        self.round_index = round_index
        self.cause = cause
