"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class BiocircuitError(Exception):
    """Base class for all errors raised by biocircuit_tf."""


# symbolic core


class ZeroDenominator(BiocircuitError, ZeroDivisionError):
    """A rational function was built with the zero polynomial as denominator."""


class DivisionByZeroFn(BiocircuitError, ZeroDivisionError):
    """Division by the zero rational function."""


class EvalPole(BiocircuitError, ZeroDivisionError):
    """The denominator vanishes at the requested evaluation point."""


class UnboundParameter(BiocircuitError, KeyError):
    """A parameter needed for numeric evaluation has no binding."""

    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__(", ".join(self.names))

    def __str__(self) -> str:
        return f"unbound parameter(s): {', '.join(self.names)}"


class ExpressionSyntaxError(BiocircuitError, ValueError):
    """Malformed rendered expression text."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at offset {position}")


# block diagrams


class EmptyComponentList(BiocircuitError, ValueError):
    pass


class AlgebraicLoop(BiocircuitError, ZeroDivisionError):
    """Closed-loop denominator 1 -/+ forward*feedback is identically zero.

    ``obligations`` holds the convergence condition the loop violates.
    """

    def __init__(self, message: str, obligations=()):
        self.obligations = list(obligations)
        super().__init__(message)


# ODE models


class OdeError(BiocircuitError, ValueError):
    pass


class ImproperSystem(OdeError):
    pass


class EmptyCoefficients(OdeError):
    pass


class ZeroLeadingCoefficient(OdeError):
    pass


# numeric oracle


class OracleError(BiocircuitError, ValueError):
    pass


class StepTooLarge(OracleError):
    pass


class RegionOfConvergence(OracleError):
    pass


class InputTransformNearZero(OracleError):
    pass


# certificates


class CertificateError(BiocircuitError):
    pass


class MalformedCertificate(CertificateError, ValueError):
    pass


class StepMismatch(CertificateError):
    def __init__(self, index: int, expected, got):
        self.index = index
        self.expected = expected
        self.got = got
        super().__init__(f"step {index}: recorded {expected!r}, replay produced {got!r}")
