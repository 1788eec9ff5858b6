"""Exception types raised by puritymeter."""


class PurityMeterError(Exception):
    """Base class for all package errors."""


class DimensionError(PurityMeterError, ValueError):
    """Operands do not share the same level count N."""


class NonPhysicalStateError(PurityMeterError, ValueError):
    """A matrix fails the density-matrix checks (Hermitian, unit trace, PSD)."""


class EstimatorError(PurityMeterError, ValueError):
    """Estimator inputs are inconsistent, e.g. a reconstructed |a|^2 outside [0, 1]."""


class EstimatorSelectionError(PurityMeterError, ValueError):
    """An estimator was requested for a dimension it does not support."""


class InsufficientAncillaError(PurityMeterError, RuntimeError):
    """Harvesting from the target ensemble produced fewer ancillas than needed."""
