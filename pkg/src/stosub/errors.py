"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: :class:`CapacityError` exits with 2,
every other :class:`StosubError` with 1.
"""


class StosubError(Exception):
    """Base class for all package errors."""


class InputError(StosubError):
    """Malformed or out-of-domain input."""


class CapacityError(StosubError):
    """Instance size exceeds a configured exact-computation cap."""


class ConditioningError(InputError):
    """Conditioning on an observation that has probability zero."""


class PolicyError(InputError):
    """Policy tree is malformed or does not cover a reachable observation."""


class ConfigurationError(InputError):
    """A required configuration value is missing or inconsistent."""


class DegenerateBoundError(InputError):
    """Bound formula is undefined for the supplied parameters."""


class UnsupportedKindError(InputError):
    """Operation does not support this constraint kind."""
