"""Block-diagram IR and its reduction to a single transfer function.

A diagram is a finite tree of :class:`Tf`, :class:`Series`, :class:`Sum`,
:class:`Pickoff` and :class:`Feedback` nodes.  :func:`reduce` folds it
bottom-up with :func:`series_comp`, :func:`summ_jun`, :func:`pick_point`
and :func:`feedback_block`, collecting side conditions and a step-by-step
trace on the way.  Nothing is ever discharged here.

A pickoff node has one input and several parallel branches; inside a
single-input single-output tree its branches are recombined by an implicit
summation junction, so ``reduce(Pickoff(g, bs)) = summ_jun(pick_point(g, bs))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from . import obligations as obl
from .errors import AlgebraicLoop, EmptyComponentList
from .symbolic import ONE, ZERO, RationalFn, render
from .trace import Certificate, Conclusion, Rule, Step


class Sign(str, enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    @classmethod
    def parse(cls, text) -> "Sign":
        if isinstance(text, Sign):
            return text
        if text in ("+", "positive"):
            return cls.POSITIVE
        if text in ("-", "negative"):
            return cls.NEGATIVE
        raise ValueError(f"feedback sign must be '+' or '-', got {text!r}")


# -- IR ---------------------------------------------------------------------


@dataclass(frozen=True)
class Tf:
    f: RationalFn
    label: Optional[str] = None


@dataclass(frozen=True)
class Series:
    children: tuple

    def __init__(self, children: Sequence["BlockDiagram"]):
        object.__setattr__(self, "children", _nonempty(children, "Series"))


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __init__(self, children: Sequence["BlockDiagram"]):
        object.__setattr__(self, "children", _nonempty(children, "Sum"))


@dataclass(frozen=True)
class Pickoff:
    gain: RationalFn
    branches: tuple

    def __init__(self, gain: RationalFn, branches: Sequence["BlockDiagram"]):
        object.__setattr__(self, "gain", RationalFn.coerce(gain))
        object.__setattr__(self, "branches", _nonempty(branches, "Pickoff"))


@dataclass(frozen=True)
class Feedback:
    """Closed loop around ``forward`` with ``feedback`` in the return path.

    Both paths may be plain rational functions or whole sub-diagrams.
    """

    forward: "BlockDiagram"
    feedback: "BlockDiagram"
    sign: Sign = Sign.POSITIVE

    def __init__(self, forward, feedback, sign: Sign | str = Sign.POSITIVE):
        object.__setattr__(self, "forward", _as_node(forward))
        object.__setattr__(self, "feedback", _as_node(feedback))
        object.__setattr__(self, "sign", Sign.parse(sign))


BlockDiagram = Union[Tf, Series, Sum, Pickoff, Feedback]


def _as_node(x) -> BlockDiagram:
    if isinstance(x, (Tf, Series, Sum, Pickoff, Feedback)):
        return x
    return Tf(RationalFn.coerce(x))


def _nonempty(children, kind: str) -> tuple:
    children = tuple(_as_node(c) for c in children)
    if not children:
        raise EmptyComponentList(f"{kind} needs at least one child")
    return children


# -- configuration rules ----------------------------------------------------


def series_comp(components: Sequence[RationalFn]) -> RationalFn:
    """Product of the component transfer functions."""
    if not components:
        raise EmptyComponentList("series_comp of an empty list")
    out = components[0]
    for c in components[1:]:
        out = out * c
    return out


def summ_jun(components: Sequence[RationalFn]) -> RationalFn:
    """Sum of the component transfer functions."""
    if not components:
        raise EmptyComponentList("summ_jun of an empty list")
    out = components[0]
    for c in components[1:]:
        out = out + c
    return out


def pick_point(gain: RationalFn, branches: Sequence[RationalFn]) -> list:
    if not branches:
        raise EmptyComponentList("pick_point with no branches")
    return [gain * b for b in branches]


def branch_tf(forward: RationalFn, feedback: RationalFn, k: int) -> RationalFn:
    """k-th loop traversal ``(forward*feedback)**k``; ``k = 0`` is the direct path."""
    if k < 0:
        raise ValueError("branch index must be >= 0")
    return series_comp([forward, feedback]) ** k if k else ONE


def feedback_block(
    forward: RationalFn,
    feedback: RationalFn,
    sign: Sign | str = Sign.POSITIVE,
    origin: str = "feedback",
) -> tuple:
    """Closed form of the loop: ``forward / (1 - forward*feedback)`` for
    positive feedback, ``forward / (1 + forward*feedback)`` for negative.

    Returns ``(fn, obligations)``.  The obligations record that the
    geometric-series argument needs ``|forward*feedback| < 1`` and that the
    closed-form denominator is nonzero.
    """
    sign = Sign.parse(sign)
    a, b = forward.num, forward.den
    c, d = feedback.num, feedback.den
    loop = a * c
    den = b * d - loop if sign is Sign.POSITIVE else b * d + loop
    converge = obl.convergence(forward, feedback, f"FeedbackClosedForm@{origin}")
    if den.is_zero():
        raise AlgebraicLoop(
            f"1 {'-' if sign is Sign.POSITIVE else '+'} ({render(forward)})*({render(feedback)}) is identically zero",
            [converge],
        )
    fn = RationalFn(a * d, den)
    return fn, [converge, obl.nonzero_denom(fn.den, f"FeedbackClosedForm@{origin}")]


def geometric_partial_sum(forward: RationalFn, feedback: RationalFn, K: int) -> RationalFn:
    """``sum_{k=0..K} branch_tf(forward, feedback, k) * forward``."""
    total = ZERO
    for k in range(K + 1):
        total = total + branch_tf(forward, feedback, k) * forward
    return total


# -- reduction --------------------------------------------------------------


class Reduction(NamedTuple):
    fn: RationalFn
    obligations: list
    certificate: Certificate


def reduce(diagram: BlockDiagram) -> Reduction:
    steps: list = []
    obligations: list = []
    fn = _reduce(_as_node(diagram), "root", steps, obligations)
    r = render(fn)
    cert = Certificate(tuple(steps), tuple(obligations), Conclusion(r, r))
    return Reduction(fn, obligations, cert)


def _leaf_obligations(f: RationalFn, where: str) -> list:
    if f.den.is_constant() and f.den.is_numeric():
        return []
    return [obl.nonzero_denom(f.den, where)]


def _reduce(node: BlockDiagram, path: str, steps: list, obligations: list) -> RationalFn:
    if isinstance(node, Tf):
        where = f"Tf@{path}" + (f" ({node.label})" if node.label else "")
        obligations.extend(_leaf_obligations(node.f, where))
        return node.f
    if isinstance(node, Series):
        parts = [_reduce(c, f"{path}/series[{i}]", steps, obligations) for i, c in enumerate(node.children)]
        out = series_comp(parts)
        steps.append(Step(Rule.SERIES_COMP, tuple(map(render, parts)), render(out)))
        return out
    if isinstance(node, Sum):
        parts = [_reduce(c, f"{path}/sum[{i}]", steps, obligations) for i, c in enumerate(node.children)]
        out = summ_jun(parts)
        steps.append(Step(Rule.SUMM_JUN, tuple(map(render, parts)), render(out)))
        return out
    if isinstance(node, Pickoff):
        obligations.extend(_leaf_obligations(node.gain, f"PickPoint@{path}"))
        parts = [_reduce(c, f"{path}/branch[{i}]", steps, obligations) for i, c in enumerate(node.branches)]
        scaled = pick_point(node.gain, parts)
        steps.append(
            Step(Rule.PICK_POINT, (render(node.gain), *map(render, parts)), tuple(map(render, scaled)))
        )
        out = summ_jun(scaled)
        steps.append(Step(Rule.SUMM_JUN, tuple(map(render, scaled)), render(out)))
        return out
    if isinstance(node, Feedback):
        fwd = _reduce(node.forward, f"{path}/forward", steps, obligations)
        back = _reduce(node.feedback, f"{path}/feedback", steps, obligations)
        out, obs = feedback_block(fwd, back, node.sign, path)
        obligations.extend(obs)
        steps.append(
            Step(Rule.FEEDBACK_CLOSED_FORM, (render(fwd), render(back), node.sign.value), render(out))
        )
        return out
    raise TypeError(f"not a block diagram node: {node!r}")
