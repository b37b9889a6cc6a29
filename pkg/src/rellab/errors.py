"""Exception hierarchy.

Two roots: `ValidationError` for bad inputs (CLI exit code 1) and
`NumericalError` for failures of a computation on valid inputs (exit code 2).
"""


class RellabError(Exception):
    pass


class ValidationError(RellabError, ValueError):
    pass


class NumericalError(RellabError, ArithmeticError):
    pass


class DimensionTooSmall(ValidationError):
    pass


class ExponentOutOfRange(ValidationError):
    pass


class LambdaAboveRellich(ValidationError):
    pass


class NonPositiveCoefficient(ValidationError):
    pass


class AlphaOutOfRange(ValidationError):
    pass


class BadGridSpec(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class MeshMismatch(ValidationError):
    pass


class ConeConditionViolated(ValidationError):
    pass


class ParameterOutOfRange(ValidationError):
    pass


class NonConvergence(NumericalError):
    pass


class DegenerateProfile(NumericalError):
    pass


class NewtonDivergence(NumericalError):
    pass


class NoSignChangeInBracket(NumericalError):
    pass


class ZeroDenominator(NumericalError):
    pass


class BoundaryDecayViolated(NumericalError):
    pass


class NonIntegrableProfile(NumericalError):
    pass
