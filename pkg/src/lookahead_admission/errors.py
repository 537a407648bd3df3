"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Model or configuration parameters out of range."""


class UnsupportedParameterError(ValueError):
    """A closed form is undefined at the requested parameters (e.g. theta == 1)."""


class InvalidDeletionError(ValueError):
    """A deletion slot is duplicated or is not an arrival of the path."""


class InsufficientHorizonError(ValueError):
    """A lookahead window reaches past the end of the generated path."""


class InsufficientDataError(ValueError):
    """Too few observations to form the requested statistic."""
