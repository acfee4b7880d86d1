"""Exception hierarchy.

Validation problems derive from :class:`ValueError` so that callers who do
not care about the finer classes can catch them generically; numerical
failures derive from :class:`NumericalError`.
"""


class ConfigError(ValueError):
    """Invalid run configuration. ``path`` names the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class NumericalError(RuntimeError):
    """A computation produced a result that cannot be trusted."""


class TruncationError(NumericalError):
    """Fock truncation could not reach the requested probability mass."""

    def __init__(self, message, achieved_mass, cutoffs):
        self.achieved_mass = achieved_mass
        self.cutoffs = cutoffs
        super().__init__(f"{message} (achieved mass {achieved_mass!r}, cutoffs {cutoffs})")


class BasisMismatchError(ValueError):
    pass


class UnsupportedBasisError(ValueError):
    pass


class SingularityError(ValueError):
    """Formula evaluated at a singular point. ``index`` locates it in a grid."""

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"{message} (grid index {index})"
        super().__init__(message)


class EmptyBandError(ValueError):
    pass


class DepletionError(ValueError):
    def __init__(self, message, required, available):
        self.required = required
        self.available = available
        super().__init__(f"{message}: required {required!r}, available {available!r}")
