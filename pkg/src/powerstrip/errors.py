"""Exception types shared across the package.

Everything derives from PowerStripError so callers can catch the whole
family; the ValueError mixin keeps plain ``except ValueError`` code working.
"""


class PowerStripError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(PowerStripError, ValueError):
    """An argument is outside its admissible domain."""


class EmptyInputError(PowerStripError, ValueError):
    """An operation that needs at least one demand received none."""


class AchievabilityError(PowerStripError, ValueError):
    """A width that must be achievable is not."""


class CaseMismatchError(PowerStripError, ValueError):
    """An operation was invoked for an instance case it does not handle."""


class InfeasiblePolicyError(PowerStripError, ValueError):
    """A policy violates the scheduling window or duration constraints."""


class UnsupportedPolicyError(PowerStripError, TypeError):
    """A policy lacks the structure (slot indices) the operation needs."""


class InstanceTooLargeError(PowerStripError, ValueError):
    """The exhaustive search refuses instances beyond its size cap."""


class BoundViolationError(PowerStripError, RuntimeError):
    """A recorded peak exceeded its guaranteed upper bound.

    This is never statistical noise; it indicates an implementation bug and
    aborts the experiment that detected it.
    """
