"""Exception types raised by avnlab."""


class AvnError(Exception):
    """Base class for every error raised by this package."""


class CapacityError(AvnError, ValueError):
    """A state or operator would exceed the supported qubit count."""


class DimensionError(AvnError, ValueError):
    """Operands act on different numbers of qubits."""


class NumericalIntegrityError(AvnError, ArithmeticError):
    """A quantity that must be real or normalized is not, within tolerance."""


class WeightSumError(AvnError, ValueError):
    """Mixture weights are negative or do not sum to one."""


class NoSupportError(AvnError, ValueError):
    """Conditioning on an outcome that has (numerically) zero probability."""


class UniverseTooLargeError(AvnError, ValueError):
    """Exhaustive enumeration requested over too many labels."""


class BracketError(AvnError, ValueError):
    """Root search interval does not bracket the target."""


class PhysicsViolationError(AvnError, RuntimeError):
    """An invariant guaranteed by quantum mechanics failed to hold."""


class InsufficientStatisticsError(AvnError, RuntimeError):
    """A Monte-Carlo run produced no usable samples for some estimator."""
