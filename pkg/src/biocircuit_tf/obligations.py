"""Side conditions recorded during a derivation.

An :class:`Obligation` is plain data: building one never evaluates or
discharges it.  Subjects are stored in their canonical text rendering so
obligations hash, compare and serialize without touching the symbolic core.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .symbolic import RationalFn, SPoly, render

INPUT_TRANSFORM = "L[u](s)"


class ObligationKind(str, enum.Enum):
    NONZERO_DENOM = "NonzeroDenom"
    POSITIVITY = "Positivity"
    CONVERGENCE = "Convergence"
    LAPLACE_EXISTS = "LaplaceExists"
    ZERO_INIT_COND = "ZeroInitCond"
    DIFFERENTIABILITY = "Differentiability"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Obligation:
    kind: ObligationKind
    subject: str
    origin: str

    def describe(self) -> str:
        return f"{self.kind.value}({self.subject})" if self.subject else self.kind.value

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "subject": self.subject, "origin": self.origin}

    @classmethod
    def from_json(cls, data: dict) -> "Obligation":
        return cls(ObligationKind(data["kind"]), str(data["subject"]), str(data["origin"]))


def nonzero_denom(poly: SPoly | str, origin: str) -> Obligation:
    subject = poly if isinstance(poly, str) else str(poly)
    return Obligation(ObligationKind.NONZERO_DENOM, subject, origin)


def positivity(name: str, origin: str) -> Obligation:
    return Obligation(ObligationKind.POSITIVITY, name, origin)


def convergence(forward: RationalFn, feedback: RationalFn, origin: str) -> Obligation:
    # |forward * feedback| < 1 pointwise
    return Obligation(ObligationKind.CONVERGENCE, f"{render(forward)}; {render(feedback)}", origin)


def laplace_exists(role: str, origin: str) -> Obligation:
    return Obligation(ObligationKind.LAPLACE_EXISTS, role, origin)


def zero_init_cond(origin: str, order: int = 1) -> Obligation:
    return Obligation(ObligationKind.ZERO_INIT_COND, f"u, y up to derivative order {order - 1}" if order > 1 else "u, y", origin)


def differentiability(origin: str, order: int = 1) -> Obligation:
    return Obligation(ObligationKind.DIFFERENTIABILITY, f"u, y up to derivative order {order}", origin)


def merge(*groups) -> list:
    """Concatenate obligation lists, dropping exact duplicates, keeping order."""
    seen = set()
    out = []
    for group in groups:
        for ob in group:
            if ob not in seen:
                seen.add(ob)
                out.append(ob)
    return out
