"""Exception hierarchy.

Three families map onto the CLI exit codes: bad input (1), a violated
mathematical invariant (2), a numerical procedure that failed to converge (3).
"""


class EtaHatError(Exception):
    exit_code = 1


class InputError(EtaHatError, ValueError):
    exit_code = 1


class InvariantError(EtaHatError):
    exit_code = 2


class NumericalError(EtaHatError, ArithmeticError):
    exit_code = 3


# input / domain errors
class BadModulus(InputError):
    pass


class DegenerateCurve(InputError):
    pass


class BadConfiguration(InputError):
    pass


class ChartDomain(InputError):
    pass


class PoleError(InputError):
    pass


class PoleOnPath(PoleError):
    pass


class DiagonalPole(PoleError):
    pass


class AsymmetricInput(InputError):
    pass


class CriticalPoint(InputError):
    pass


class ContourTopologyChanged(InputError):
    pass


# invariant failures
class ContractViolation(InvariantError):
    pass


class AsymmetricSolution(InvariantError):
    pass


# numerical failures
class NoConvergence(NumericalError):
    pass


class SingularPiA(NumericalError):
    pass


class SingularImTau(NumericalError):
    pass


class IllConditionedFit(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass
