"""Exception hierarchy shared by every solver route."""


class OscidispError(Exception):
    """Base class for errors raised by oscidisp."""


class DomainError(OscidispError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class InputError(OscidispError, ValueError):
    """Malformed or inconsistent input data."""


class UnsupportedError(OscidispError):
    """The requested combination is valid physics but not provided by this route."""


class PreconditionError(OscidispError, ValueError):
    """A documented precondition of the operation does not hold."""


class SingularSystemError(OscidispError, ArithmeticError):
    """Zero pivot in the tridiagonal elimination."""


class SimulationError(OscidispError, RuntimeError):
    """The Monte Carlo state became non-finite."""
