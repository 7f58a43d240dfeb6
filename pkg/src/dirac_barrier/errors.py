"""Exception hierarchy shared by all modules."""


class DiracBarrierError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DiracBarrierError, ValueError):
    """Inputs lie outside the domain where the formulas apply."""


class SingularMatchError(DiracBarrierError, ArithmeticError):
    """Boundary-matching system is singular or numerically rank deficient."""


class NormalizationError(DiracBarrierError, ValueError):
    """Incoming helicity amplitudes are not unit-normalized."""


class ZoneError(DiracBarrierError, ValueError):
    """Requested operation is not defined in the energy zone at hand."""


class UndefinedPhaseError(DiracBarrierError, ArithmeticError):
    """A relative phase was requested between amplitudes that vanish."""


class InconsistentMeasurementError(DiracBarrierError, ValueError):
    """Measured intensities cannot be produced by any relative phase."""
