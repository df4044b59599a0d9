"""Certificate serialization and the replay checker.

File format (``.tfcert.json``): a JSON object with the keys ``steps``,
``obligations``, ``conclusion`` and ``meta`` in that order.  Every operand
is a canonical text rendering, so a reader can audit each step by hand and
:func:`replay` can recompute it with the symbolic core.

``meta`` carries the tool version and source file and is the only part
excluded from byte-stability comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from . import __version__
from .blockdiag import feedback_block, pick_point, series_comp, summ_jun
from .errors import BiocircuitError, CertificateError, MalformedCertificate, StepMismatch
from .notation import parse_param_poly, parse_rational, parse_spoly
from .obligations import INPUT_TRANSFORM, Obligation, ObligationKind
from .symbolic import RationalFn, SPoly, cross_difference, rat_eq, render
from .trace import Certificate, Conclusion, Rule, Step

FILE_SUFFIX = ".tfcert.json"
_KEYS = ("steps", "obligations", "conclusion", "meta")


# -- emit -------------------------------------------------------------------


def _step_json(step: Step) -> dict:
    def operand(x):
        return list(map(operand, x)) if isinstance(x, tuple) else x

    return {"rule": step.rule.value, "inputs": operand(step.inputs), "output": operand(step.output)}


def to_json(cert: Certificate) -> dict:
    return {
        "steps": [_step_json(s) for s in cert.steps],
        "obligations": [o.to_json() for o in cert.obligations],
        "conclusion": str(cert.conclusion),
        "meta": {"tool": f"biocircuit_tf {__version__}", **cert.meta},
    }


def emit(cert: Certificate) -> str:
    """Deterministic JSON text for ``cert`` (trailing newline included)."""
    return json.dumps(to_json(cert), indent=2, ensure_ascii=False) + "\n"


def body(doc: str) -> str:
    """The certificate text minus ``meta``, for byte-stability checks."""
    data = json.loads(doc)
    data.pop("meta", None)
    return json.dumps(data, indent=2, ensure_ascii=False)


# -- parse ------------------------------------------------------------------


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    if isinstance(x, str):
        return x
    raise MalformedCertificate(f"operand must be a string or a list, got {type(x).__name__}")


def parse_conclusion(text: str) -> Conclusion:
    if not isinstance(text, str):
        raise MalformedCertificate("conclusion must be a string")
    for sep, holds in ((" != ", False), (" = ", True)):
        if text.count(sep) == 1:
            lhs, rhs = text.split(sep)
            return Conclusion(lhs, rhs, holds)
    raise MalformedCertificate(f"conclusion is not an equation: {text!r}")


def parse(doc: str) -> Certificate:
    try:
        data = json.loads(doc)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedCertificate(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict) or any(k not in data for k in _KEYS[:3]):
        raise MalformedCertificate(f"certificate must be an object with keys {', '.join(_KEYS)}")
    extra = set(data) - set(_KEYS)
    if extra:
        raise MalformedCertificate(f"unknown top-level keys: {', '.join(sorted(extra))}")
    if not isinstance(data["steps"], list) or not isinstance(data["obligations"], list):
        raise MalformedCertificate("steps and obligations must be lists")
    steps = []
    for i, raw in enumerate(data["steps"]):
        if not isinstance(raw, dict) or set(raw) != {"rule", "inputs", "output"}:
            raise MalformedCertificate(f"step {i} must have exactly rule, inputs, output")
        try:
            rule = Rule(raw["rule"])
        except ValueError:
            raise MalformedCertificate(f"step {i}: unknown rule {raw['rule']!r}") from None
        if not isinstance(raw["inputs"], list):
            raise MalformedCertificate(f"step {i}: inputs must be a list")
        steps.append(Step(rule, _tuplify(raw["inputs"]), _tuplify(raw["output"])))
    obligations = []
    for i, raw in enumerate(data["obligations"]):
        try:
            obligations.append(Obligation.from_json(raw))
        except (KeyError, TypeError, ValueError):
            raise MalformedCertificate(f"obligation {i} is malformed") from None
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise MalformedCertificate("meta must be an object")
    meta = {k: v for k, v in meta.items() if k != "tool"}
    return Certificate(tuple(steps), tuple(obligations), parse_conclusion(data["conclusion"]), meta)


# -- replay -----------------------------------------------------------------


@dataclass(frozen=True)
class ReplayVerdict:
    accepted: bool
    steps_checked: int
    error: Optional[CertificateError] = None

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return f"ACCEPT ({self.steps_checked} steps replayed)"
        return f"REJECT: {self.error}"


def _rat(text, where: str) -> RationalFn:
    if not isinstance(text, str):
        raise MalformedCertificate(f"{where}: expected a rendered rational function")
    try:
        return parse_rational(text)
    except BiocircuitError as exc:
        raise MalformedCertificate(f"{where}: {exc}") from None


def _rats(inputs, where: str) -> list:
    if not inputs:
        raise MalformedCertificate(f"{where}: no inputs")
    return [_rat(x, where) for x in inputs]


def _recompute(index: int, step: Step, history: list):
    where = f"step {index} ({step.rule.value})"
    rule, inputs = step.rule, step.inputs
    try:
        if rule is Rule.SERIES_COMP:
            return render(series_comp(_rats(inputs, where)))
        if rule is Rule.SUMM_JUN:
            return render(summ_jun(_rats(inputs, where)))
        if rule is Rule.PICK_POINT:
            if len(inputs) < 2:
                raise MalformedCertificate(f"{where}: needs a gain and at least one branch")
            fns = _rats(inputs, where)
            return tuple(render(f) for f in pick_point(fns[0], fns[1:]))
        if rule is Rule.FEEDBACK_CLOSED_FORM:
            if len(inputs) != 3 or inputs[2] not in ("+", "-"):
                raise MalformedCertificate(f"{where}: expected forward, feedback, sign")
            fwd, back = _rats(inputs[:2], where)
            return render(feedback_block(fwd, back, inputs[2])[0])
        if rule is Rule.LAPLACE_DERIV_RULE:
            if len(inputs) != 3 or inputs[0] not in ("y", "u") or not str(inputs[2]).isdigit():
                raise MalformedCertificate(f"{where}: expected role, coefficient, order")
            coeff = parse_param_poly(inputs[1])
            return str(SPoly.const(coeff) * SPoly.s(int(inputs[2])))
        if rule is Rule.LAPLACE_LINEARITY:
            if len(inputs) != 2 or not all(isinstance(x, tuple) for x in inputs):
                raise MalformedCertificate(f"{where}: expected output-side and input-side term lists")
            sums = []
            for role, terms in zip(("y", "u"), inputs):
                derived = [h.output for h in history if h.rule is Rule.LAPLACE_DERIV_RULE and h.inputs[0] == role]
                total = SPoly()
                for t in terms:
                    if t not in derived:
                        raise StepMismatch(index, f"a {role}-side LaplaceDerivRule output", t)
                    total = total + parse_spoly(t)
                sums.append(total)
            return render(RationalFn(sums[1], sums[0]))
        if rule is Rule.CROSS_MULT_EQ:
            if len(inputs) != 2:
                raise MalformedCertificate(f"{where}: expected two operands")
            produced = [h.output for h in history if isinstance(h.output, str) and h.output.startswith("(")]
            if produced and inputs[0] not in produced:
                raise StepMismatch(index, "an earlier step output", inputs[0])
            lhs, rhs = _rats(inputs, where)
            return str(cross_difference(lhs, rhs))
    except CertificateError:
        raise
    except BiocircuitError as exc:
        raise MalformedCertificate(f"{where}: {exc}") from None
    raise MalformedCertificate(f"{where}: unsupported rule")


def _check_obligations(cert: Certificate) -> None:
    for i, ob in enumerate(cert.obligations):
        try:
            if ob.kind is ObligationKind.NONZERO_DENOM and ob.subject != INPUT_TRANSFORM:
                if parse_spoly(ob.subject).is_zero():
                    raise MalformedCertificate(f"obligation {i}: denominator is identically zero")
            elif ob.kind is ObligationKind.CONVERGENCE:
                parts = ob.subject.split("; ")
                if len(parts) != 2:
                    raise MalformedCertificate(f"obligation {i}: expected 'forward; feedback'")
                for p in parts:
                    parse_rational(p)
        except CertificateError:
            raise
        except BiocircuitError as exc:
            raise MalformedCertificate(f"obligation {i}: {exc}") from None


def check(cert: Union[str, Certificate]) -> int:
    """Replay ``cert``; return the number of steps checked or raise."""
    if isinstance(cert, str):
        cert = parse(cert)
    _check_obligations(cert)
    history: list = []
    for i, step in enumerate(cert.steps):
        got = _recompute(i, step, history)
        if got != step.output:
            raise StepMismatch(i, step.output, got)
        history.append(step)

    concl = cert.conclusion
    lhs = _rat(concl.lhs, "conclusion")
    rhs = _rat(concl.rhs, "conclusion")
    n = len(cert.steps)
    if render(lhs) != concl.lhs or render(rhs) != concl.rhs:
        raise StepMismatch(n, str(concl), f"{render(lhs)} / {render(rhs)} (conclusion not canonical)")
    if cert.steps:
        last = cert.steps[-1]
        if last.rule is Rule.CROSS_MULT_EQ:
            if (last.inputs[0], last.inputs[1]) != (concl.lhs, concl.rhs):
                raise StepMismatch(n, str(concl), f"{last.inputs[0]} vs {last.inputs[1]}")
            if (last.output == "0") != concl.holds:
                raise StepMismatch(n, str(concl), f"cross difference {last.output}")
        elif not isinstance(last.output, str) or not rat_eq(_rat(last.output, "last step"), lhs):
            raise StepMismatch(n, concl.lhs, last.output)
    if rat_eq(lhs, rhs) != concl.holds:
        raise StepMismatch(n, str(concl), "the opposite relation")
    return n


def replay(doc: Union[str, Certificate]) -> ReplayVerdict:
    """Re-execute every step; accept iff all outputs and the conclusion match."""
    try:
        n = check(doc)
    except CertificateError as exc:
        return ReplayVerdict(False, getattr(exc, "index", 0), exc)
    return ReplayVerdict(True, n)


def write(cert: Certificate, path) -> None:
    Path(path).write_text(emit(cert), encoding="utf-8")
