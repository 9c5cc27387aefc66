"""Exception types shared across the package."""


class DissocError(Exception):
    """Base class for all errors raised by :mod:`dissoc`."""


class ResourceLimitError(DissocError):
    """A computation would exceed a configured size cap.

    ``largest_feasible`` carries the largest parameter value that fits
    under the cap when the caller can use it (e.g. the largest arity).
    """

    def __init__(self, message, largest_feasible=None):
        super().__init__(message)
        self.largest_feasible = largest_feasible
