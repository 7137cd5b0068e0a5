"""Exception hierarchy.

Every error that can terminate the command line front end carries an
``exit_code``; codes are distinct per failure class.
"""


class DiracExtError(Exception):
    exit_code = 1


class InvalidParameters(DiracExtError, ValueError):
    exit_code = 2


class SupNormExceeded(DiracExtError, ValueError):
    exit_code = 3


class CriticalAnomalous(DiracExtError, ValueError):
    exit_code = 4


class QuadratureFailure(DiracExtError, RuntimeError):
    exit_code = 5


class NoDeficiency(DiracExtError, ValueError):
    exit_code = 6


class EssentiallySelfAdjointChannel(DiracExtError, ValueError):
    """Raised when boundary data is requested on a channel that has none."""

    exit_code = 7


class DegenerateRelation(DiracExtError, ValueError):
    exit_code = 8


class ChannelMismatch(DiracExtError, ValueError):
    exit_code = 9


class IllConditionedFit(DiracExtError, RuntimeError):
    exit_code = 10


class NonConvergent(DiracExtError, RuntimeError):
    exit_code = 11


class NotUnitary(DiracExtError, ValueError):
    exit_code = 12


class ValidationFailed(DiracExtError, RuntimeError):
    exit_code = 13


class EnergyOutsideGap(DiracExtError, ValueError):
    exit_code = 14


class MatchingIllConditioned(DiracExtError, RuntimeError):
    exit_code = 15
