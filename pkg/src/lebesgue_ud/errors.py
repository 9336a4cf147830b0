class UDError(ValueError):
    """Base class for errors raised by this package."""


class SequenceError(UDError):
    pass


class IntegrandError(UDError):
    pass


class EstimatorError(UDError):
    pass


class DiscrepancyError(UDError):
    pass


class DiagnosticsError(UDError):
    pass
