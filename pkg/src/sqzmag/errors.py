"""Exception hierarchy for the simulator.

Everything derives from :class:`SqzmagError` so callers can catch the whole
family; validation-style failures also derive from :class:`ValueError` and
run-time measurement failures from :class:`RuntimeError`.
"""


class SqzmagError(Exception):
    """Base class for all simulator errors."""


class NegativeIntensity(SqzmagError, ValueError):
    """An optical intensity was negative."""


class InconsistentBases(SqzmagError, ValueError):
    """The three polarization basis pairs disagree on total power."""


class NonPositiveRatio(SqzmagError, ValueError):
    """A linear power ratio must be > 0 to convert to dB."""


class GainBelowUnity(SqzmagError, ValueError):
    """Parametric gain below 1 has no meaning for a phase-sensitive amplifier."""


class EfficiencyOutOfRange(SqzmagError, ValueError):
    """An efficiency factor must lie in [0, 1]."""


class NoPhysicalSolution(SqzmagError, ValueError):
    """The measured variance pair cannot be produced by the source model."""


class ZeroPower(SqzmagError, ValueError):
    """Polarimeter signal is undefined for zero total power."""


class NyquistViolation(SqzmagError, ValueError):
    """Requested analysis frequency does not fit below the Nyquist limit."""


class EmptyDuration(SqzmagError, ValueError):
    """Requested synthesis spans fewer than two samples."""


class ConfigModeMismatch(SqzmagError, ValueError):
    """Spectrum-analyzer config mode does not match the requested operation."""


class MeasurementFailure(SqzmagError, RuntimeError):
    """The noise-power measurement callable raised during a lock step."""


class LockNotAcquired(SqzmagError, RuntimeError):
    """The noise lock exhausted its step budget without settling."""


class ToneNotFound(SqzmagError, RuntimeError):
    """No calibration tone could be extracted at the expected frequency."""


class InsufficientBins(SqzmagError, ValueError):
    """Too few off-signal bins remain to estimate a noise floor."""
