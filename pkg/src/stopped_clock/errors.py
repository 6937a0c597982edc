"""Exception hierarchy shared by every stopped_clock module."""


class StoppedClockError(ValueError):
    """Base class for all domain errors raised by this package."""


class EmptyPathError(StoppedClockError):
    pass


class LengthMismatchError(StoppedClockError):
    pass


class UndefinedOriginError(StoppedClockError):
    """Raised when Y_1 cannot be built because U_1 = 0 and no pre-window was given."""


class InvalidSeriesError(StoppedClockError):
    pass


class EnumerationTooLargeError(StoppedClockError):
    pass


class TooFewExceedancesError(StoppedClockError):
    """The chosen threshold leaves too few exceedances for a stable estimate."""


class SampleTooSmallError(StoppedClockError):
    pass


class DimensionMismatchError(StoppedClockError):
    pass
