"""Exception types shared across the package."""


class GroupsyncError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(GroupsyncError, ValueError):
    """An experiment or trial configuration violates an invariant.

    The message names the offending field so CLI users can fix their
    spec files without reading tracebacks.
    """


class SignalError(GroupsyncError, ValueError):
    """A signal cannot be processed (all-gap, all-zero, flat spectrum)."""


class StatisticsError(GroupsyncError, ValueError):
    """Degenerate input to a statistical routine (empty, zero variance)."""
