"""Exception types shared across the library."""


class FeasikError(Exception):
    """Base class for all feasik errors."""


class ConfigError(FeasikError):
    """Invalid problem/run configuration (bad parameter, malformed document)."""


class PoolIndexError(FeasikError, LookupError):
    """A constraint index is outside the problem's pool."""


class InconsistentConstraintError(FeasikError):
    """A sublevel constraint has positive value with zero subgradient,
    which signals an empty sublevel set."""


class ControlError(FeasikError):
    """A control sequence cannot produce the requested index set."""


class CertificateError(FeasikError):
    """A certificate precondition is violated."""
