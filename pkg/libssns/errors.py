"""
Exceptions raised by libssns. Every error carries a human readable
``message``; numeric failures additionally carry the quantities that
tripped them so that a report can print both sides.
"""


class SSNSError(Exception):
    """ Base class of all libssns errors """

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message


class DomainError(SSNSError, ValueError):
    """ Argument outside the domain of an operation """


class DimensionError(SSNSError, ValueError):
    """ Operands live on different grids or have malformed shapes """


class PreconditionError(SSNSError):
    """ A documented precondition of an operation does not hold """


class ConfigError(SSNSError):
    """ Invalid run configuration; maps to exit code 2 """


class NumericError(SSNSError):
    """ A numerical procedure failed; maps to exit code 1 """


class QuadratureError(NumericError):
    """ Quadrature did not self-converge """

    def __init__(self, message="", coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class RecurrenceViolation(NumericError):
    """ The ledger recurrence K_{n+1} <= K_0 + M K_n^2 failed beyond slack """

    def __init__(self, lhs, rhs, iteration=None):
        if iteration is None:
            msg = "recurrence violated: %.6e > %.6e" % (lhs, rhs)
        else:
            msg = "recurrence violated at n=%d: %.6e > %.6e" % \
                (iteration, lhs, rhs)
        super().__init__(msg)
        self.lhs = lhs
        self.rhs = rhs
        self.iteration = iteration


class SchemeBlowupError(NumericError):
    """ Time stepping produced non-finite values """

    def __init__(self, tau, last_good=None):
        super().__init__("non-finite state at tau=%.6e" % tau)
        self.tau = tau
        self.last_good = last_good


class OperationInProgress(SSNSError):
    """ Error used to indicate that an existing operation is in progress """

    def __init__(self, op_name=""):
        if op_name == "":
            msg = "An operation is in progress"
        else:
            msg = "%s operation is in progress" % op_name
        super().__init__(msg)
