"""Derivation traces: the data carried by a certificate."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

from .obligations import merge
from .symbolic import cross_difference, render

Operand = Union[str, tuple]


class Rule(str, enum.Enum):
    SERIES_COMP = "SeriesComp"
    SUMM_JUN = "SummJun"
    PICK_POINT = "PickPoint"
    FEEDBACK_CLOSED_FORM = "FeedbackClosedForm"
    LAPLACE_LINEARITY = "LaplaceLinearity"
    LAPLACE_DERIV_RULE = "LaplaceDerivRule"
    CROSS_MULT_EQ = "CrossMultEq"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Step:
    """One rewrite.  ``inputs`` and ``output`` hold canonical renderings.

    Operand layout per rule:

    ``SeriesComp`` / ``SummJun``
        inputs: rational functions; output: rational function
    ``PickPoint``
        inputs: gain then branches; output: tuple of rational functions
    ``FeedbackClosedForm``
        inputs: forward, feedback, ``"+"`` or ``"-"``; output: rational function
    ``LaplaceDerivRule``
        inputs: ``"y"``/``"u"``, coefficient, derivative order; output: polynomial
    ``LaplaceLinearity``
        inputs: (output-side terms, input-side terms); output: rational function
    ``CrossMultEq``
        inputs: lhs, rhs; output: cross-multiplied difference (``"0"`` iff equal)
    """

    rule: Rule
    inputs: tuple
    output: Operand


@dataclass(frozen=True)
class Conclusion:
    lhs: str
    rhs: str
    holds: bool = True

    def __str__(self) -> str:
        return f"{self.lhs} {'=' if self.holds else '!='} {self.rhs}"


@dataclass(frozen=True)
class Certificate:
    steps: tuple
    obligations: tuple
    conclusion: Conclusion
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def then(self, other: "Certificate", conclusion: Conclusion) -> "Certificate":
        return Certificate(
            self.steps + other.steps,
            tuple(merge(self.obligations, other.obligations)),
            conclusion,
            dict(self.meta),
        )

    def with_meta(self, **meta) -> "Certificate":
        return Certificate(self.steps, self.obligations, self.conclusion, {**self.meta, **meta})

    def with_step(self, step: Step, conclusion: Conclusion) -> "Certificate":
        return Certificate(self.steps + (step,), self.obligations, conclusion, dict(self.meta))


def trivial(rendered: str, obligations: tuple = ()) -> Certificate:
    """Certificate with no steps concluding ``f = f``."""
    return Certificate((), tuple(obligations), Conclusion(rendered, rendered))


def cross_mult_step(lhs, rhs) -> Step:
    """``CrossMultEq`` step comparing two :class:`RationalFn` values."""
    return Step(Rule.CROSS_MULT_EQ, (render(lhs), render(rhs)), str(cross_difference(lhs, rhs)))


def conclude_equal(cert: Certificate, lhs, rhs) -> Certificate:
    """Extend ``cert`` with a cross-multiplication check of ``lhs`` against ``rhs``."""
    step = cross_mult_step(lhs, rhs)
    return cert.with_step(step, Conclusion(step.inputs[0], step.inputs[1], step.output == "0"))
