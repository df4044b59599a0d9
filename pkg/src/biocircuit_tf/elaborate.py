"""Elaboration of a resolved circuit into a block diagram and an ODE.

The two models are built independently from the same AST so that comparing
their transfer functions is a real cross-check:

* the diagram is assembled structurally: each gene is a gain block feeding
  ``1/(s + alpha)``, regulation chains compose in series, several regulators
  of one gene meet at a summation junction and declared feedback edges
  become :class:`Feedback` nodes;
* the ODE comes from the linear state equations
  ``x_i' + alpha_i x_i = sum_j g_ij x_j + b_i u``.  Writing ``D`` for
  ``d/dt`` the system is ``M(D) x = b u`` and Cramer's rule gives the
  scalar input-output equation ``det M(D) y = det M_out(D) u``, where
  ``M_out`` has the output column replaced by ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .blockdiag import BlockDiagram, Feedback, Series, Sum, Tf, reduce
from .circuit import (
    CircuitAst,
    FeedbackDecl,
    RegulationDecl,
    Span,
    UnsupportedTopology,
)
from .errors import UnboundParameter
from .ode import LinearOde, check_equivalence, derive_tf, ode_make
from .symbolic import ParamPoly, RationalFn, SPoly, ZERO, param


@dataclass(frozen=True)
class ElaboratedCircuit:
    diagram: BlockDiagram
    ode: LinearOde
    bindings: dict
    spans: dict = field(default_factory=dict, compare=False)
    expected: Optional[RationalFn] = None
    ast: Optional[CircuitAst] = field(default=None, compare=False, repr=False)


class _Graph:
    def __init__(self, ast: CircuitAst):
        self.ast = ast
        self.genes = ast.genes
        self.input = ast.input.name
        self.output = ast.output.gene
        self.regs: dict = {g: [] for g in self.genes}
        self.fbs: dict = {g: [] for g in self.genes}
        for d in ast.of(RegulationDecl):
            self.regs[d.target].append(d)
        for d in ast.of(FeedbackDecl):
            self.fbs[d.target].append(d)

    def successors(self, name: str, with_feedback: bool = True) -> list:
        out = [d.target for d in self.ast.of(RegulationDecl) if d.source == name]
        if with_feedback:
            out += [d.target for d in self.ast.of(FeedbackDecl) if d.source == name]
        return out

    def check_acyclic(self) -> None:
        state: dict = {}

        def visit(g: str, via: Span) -> None:
            if state.get(g) == 1:
                raise UnsupportedTopology(
                    f"regulation cycle through {g!r}; declare loops with 'feedback'", via
                )
            if state.get(g) == 2:
                return
            state[g] = 1
            for d in self.ast.of(RegulationDecl):
                if d.source == g:
                    visit(d.target, d.span)
            state[g] = 2

        for g, decl in self.genes.items():
            visit(g, decl.span)

    def relevant(self) -> list:
        """Genes driven by the input that can influence the output, in declaration order."""
        down = set()
        todo = [self.input]
        while todo:
            for nxt in self.successors(todo.pop()):
                if nxt not in down:
                    down.add(nxt)
                    todo.append(nxt)
        up = {self.output}
        changed = True
        while changed:
            changed = False
            for g in self.genes:
                if g not in up and any(t in up for t in self.successors(g)):
                    up.add(g)
                    changed = True
        keep = (down & up) | {self.output}
        return [g for g in self.genes if g in keep]


def _gain(d: RegulationDecl) -> RationalFn:
    return param(d.gain) * d.sign


def _stage(graph: _Graph, gene: str) -> Tf:
    alpha = param(graph.genes[gene].degrade)
    return Tf(1 / (RationalFn.coerce(SPoly.s()) + alpha), f"gene {gene}")


def _loop_path(graph: _Graph, fb: FeedbackDecl) -> list:
    """Diagram parts from ``fb.target`` forward to ``fb.source`` (exclusive of the target stage)."""
    parts: list = []
    gene = fb.source
    while gene != fb.target:
        regs = graph.regs[gene]
        if len(regs) != 1 or graph.fbs[gene] or regs[0].source not in graph.genes:
            raise UnsupportedTopology(
                f"feedback from {fb.source!r} to {fb.target!r} must close over a simple regulation chain",
                fb.span,
            )
        parts[:0] = [Tf(_gain(regs[0]), regs[0].mode), _stage(graph, gene)]
        gene = regs[0].source
    return parts


def _parts(graph: _Graph, gene: str, memo: dict) -> list:
    """Series parts of the path from the input to ``gene``."""
    if gene in memo:
        return memo[gene]
    core: BlockDiagram = _stage(graph, gene)
    for fb in graph.fbs[gene]:
        back = _loop_path(graph, fb) + [Tf(param(fb.gain), "feedback gain")]
        core = Feedback(core, back[0] if len(back) == 1 else Series(back), fb.sign)

    branches = []
    for d in graph.regs[gene]:
        upstream = [] if d.source == graph.input else _parts(graph, d.source, memo)
        branches.append(upstream + [Tf(_gain(d), d.mode)])
    if not branches:
        parts = [Tf(ZERO, f"unregulated {gene}")]
    elif len(branches) == 1:
        parts = branches[0] + [core]
    else:
        parts = [Sum([b[0] if len(b) == 1 else Series(b) for b in branches]), core]
    memo[gene] = parts
    return parts


def build_diagram(ast: CircuitAst) -> BlockDiagram:
    graph = _Graph(ast)
    graph.check_acyclic()
    parts = _parts(graph, graph.output, {})
    return parts[0] if len(parts) == 1 else Series(parts)


# -- ODE route --------------------------------------------------------------


def _det(m: list) -> SPoly:
    """Determinant by cofactor expansion along the first row (small systems only)."""
    n = len(m)
    memo: dict = {}

    def minor(row: int, cols: tuple) -> SPoly:
        if row == n:
            return SPoly.const(1)
        key = (row, cols)
        if key not in memo:
            total = SPoly()
            for i, c in enumerate(cols):
                entry = m[row][c]
                if entry.is_zero():
                    continue
                term = entry * minor(row + 1, cols[:i] + cols[i + 1 :])
                total = total - term if i % 2 else total + term
            memo[key] = total
        return memo[key]

    return minor(0, tuple(range(n)))


def build_ode(ast: CircuitAst) -> LinearOde:
    graph = _Graph(ast)
    graph.check_acyclic()
    genes = graph.relevant()
    index = {g: i for i, g in enumerate(genes)}
    n = len(genes)
    D = SPoly.s()
    m = [[SPoly() for _ in range(n)] for _ in range(n)]
    b = [SPoly() for _ in range(n)]
    for g, i in index.items():
        m[i][i] = D + SPoly.const(ParamPoly.var(graph.genes[g].degrade))
    for d in ast.of(RegulationDecl):
        if d.target not in index:
            continue
        gain = SPoly.const(ParamPoly.var(d.gain).scale(d.sign))
        if d.source == graph.input:
            b[index[d.target]] = b[index[d.target]] + gain
        elif d.source in index:
            m[index[d.target]][index[d.source]] = m[index[d.target]][index[d.source]] - gain
    for d in ast.of(FeedbackDecl):
        if d.target in index and d.source in index:
            k = ParamPoly.var(d.gain).scale(1 if d.sign == "+" else -1)
            m[index[d.target]][index[d.source]] = m[index[d.target]][index[d.source]] - SPoly.const(k)

    out = index[graph.output]
    m_out = [row[:out] + [b[r]] + row[out + 1 :] for r, row in enumerate(m)]
    den, num = _det(m), _det(m_out)
    ode_params = den.params() | num.params()
    positive = [p.name for p in ast.params.values() if p.positive and p.name in ode_params]
    return ode_make(den.coeffs, num.coeffs or [0], positive)


def elaborate(ast: CircuitAst, overrides: Optional[dict] = None) -> ElaboratedCircuit:
    """Paired diagram and ODE for a resolved AST.

    ``overrides`` map parameter names to values and take precedence over
    the ``= value`` defaults written in the source.
    """
    declared = ast.params
    bindings = {name: d.value for name, d in declared.items() if d.value is not None}
    for name, value in (overrides or {}).items():
        if name not in declared:
            raise UnboundParameter([name])
        bindings[name] = Fraction(value)
    spans = {d.name: d.span for d in ast.declarations if hasattr(d, "name")}
    expect = ast.expect
    return ElaboratedCircuit(
        diagram=build_diagram(ast),
        ode=build_ode(ast),
        bindings=bindings,
        spans=spans,
        expected=expect.fn if expect else None,
        ast=ast,
    )


def derive_both(circuit: ElaboratedCircuit, source: Optional[str] = None):
    """Reduce the diagram, derive the ODE transfer function and compare them.

    Returns the equivalence report; its certificate carries both
    derivations followed by the cross-multiplication check.
    """
    report = check_equivalence(reduce(circuit.diagram), derive_tf(circuit.ode))
    if source is not None:
        report = replace(report, certificate=report.certificate.with_meta(source=source))
    return report
