"""Exception types shared across the package."""


class XradaptError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(XradaptError, ValueError):
    """An argument is outside its documented domain."""


class UnsupportedConfigurationError(XradaptError, ValueError):
    """A (bandwidth, SCS) combination has no entry in the PRB table."""


class ReservedIndexError(XradaptError, ValueError):
    """An MCS index is reserved or outside the table's defined range."""


class TableIntegrityError(XradaptError, RuntimeError):
    """A bundled standards table failed its checksum or shape validation."""


class LadderError(XradaptError, ValueError):
    """A quality ladder violates one of its invariants."""


class TraceRangeError(XradaptError, ValueError):
    """A sample time falls outside the scenario's defined range."""


class ConfigError(XradaptError, ValueError):
    """A scenario config file is malformed or inconsistent."""


class ProtocolError(XradaptError, ValueError):
    """A telemetry message could not be parsed or fails schema checks."""


class PollTimeoutError(XradaptError, RuntimeError):
    """The telemetry service did not answer within the poll timeout."""


class ConfigSkewError(XradaptError, RuntimeError):
    """Service-side and client-side rate computations disagree."""
