"""
Error Types
"""


class VerificationError(Exception):
    """Base class for all toolkit errors"""


class PreconditionError(VerificationError, ValueError):
    """Input outside an operation's domain"""


class SupportClassError(PreconditionError):
    """Test-function supports violate the hypotheses an identity needs"""


class PoleError(PreconditionError):
    """Evaluation requested at a pole"""


class ConvergenceError(VerificationError, ArithmeticError):
    """A cap was exceeded or a tail failed to decay"""


class ConsistencyError(VerificationError, ArithmeticError):
    """Two redundant formulas disagree"""
