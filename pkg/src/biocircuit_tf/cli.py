"""Command-line front end.

Exit status: 0 on success, 1 when a check fails (inequivalence, validation
miss, sampled obligation violated, certificate rejected), 2 for usage and
input errors.  Parameter values given with ``--set`` take precedence over
``= value`` defaults in the circuit file.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from . import certificate as certs
from .blockdiag import reduce
from .circuit import CircuitError, parse
from .elaborate import ElaboratedCircuit, derive_both, elaborate
from .errors import BiocircuitError, CertificateError, MalformedCertificate, OracleError
from .notation import parse_rational, parse_spoly
from .obligations import INPUT_TRANSFORM, Obligation, ObligationKind
from .oracle import DEFAULT_DT, DEFAULT_TOLERANCE, InputSpec, simulate, validate_tf, write_csv
from .symbolic import rat_eq, rat_eval, render, spoly_eval

COMMANDS = ("derive", "check-equiv", "simulate", "validate", "obligations", "replay")
SEED_ENV = "BIOCIRCUIT_TF_SEED"
DEFAULT_S_POINTS = (1.0, 2.0, 5.0)
SAMPLE_FLOOR = 1e-12


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    path: Path
    overrides: dict = field(default_factory=dict)
    dt: float = DEFAULT_DT
    duration: Optional[float] = None
    s_points: tuple = DEFAULT_S_POINTS
    tolerance: float = DEFAULT_TOLERANCE
    input: str = "step"
    out: Optional[Path] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise UsageError("--dt must be positive")
        if not self.tolerance > 0:
            raise UsageError("--tolerance must be positive")
        if self.duration is not None and not self.duration > 0:
            raise UsageError("--duration must be positive")


# -- argument parsing -------------------------------------------------------


def _override(text: str) -> tuple:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {value!r}") from None


def _s_points(text: str) -> tuple:
    try:
        points = tuple(complex(p.strip().replace(" ", "")) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    return tuple(p.real if p.imag == 0 else p for p in points)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biocircuit-tf", description="Transfer functions of linear genetic circuits.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, help: str, numeric: bool = False):
        p = sub.add_parser(name, help=help)
        p.add_argument("path", type=Path, help="circuit file (.gnc)")
        p.add_argument("--set", dest="overrides", action="append", type=_override, default=[],
                       metavar="NAME=VALUE", help="bind a declared parameter (overrides the file)")
        if numeric:
            p.add_argument("--dt", type=float, default=DEFAULT_DT, help="integration step")
            p.add_argument("--duration", type=float, default=None, help="simulation window length")
            p.add_argument("--input", choices=("step", "impulse", "sine"), default="step")
        return p

    p = command("derive", "derive the transfer function by both routes and write a certificate")
    p.add_argument("--out", type=Path, default=None, help="certificate path (default <stem>.tfcert.json)")
    command("check-equiv", "exit 0 iff the diagram, ODE and any expected form agree")
    p = command("simulate", "simulate the circuit ODE and write t,u,y as CSV", numeric=True)
    p.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")
    p = command("validate", "compare the symbolic transfer function against simulation", numeric=True)
    p.add_argument("--s", dest="s_points", type=_s_points, default=DEFAULT_S_POINTS, help="e.g. 1,2,5")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p = command("obligations", "list the obligation ledger, sampling what the bindings allow")
    p.add_argument("--s", dest="s_points", type=_s_points, default=DEFAULT_S_POINTS)
    p = sub.add_parser("replay", help="re-check a certificate file")
    p.add_argument("path", type=Path, help="certificate (.tfcert.json)")
    return parser


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    overrides = {}
    for name, value in getattr(ns, "overrides", []):
        overrides[name] = value
    return RunConfig(
        command=ns.command,
        path=ns.path,
        overrides=overrides,
        dt=getattr(ns, "dt", DEFAULT_DT),
        duration=getattr(ns, "duration", None),
        s_points=getattr(ns, "s_points", DEFAULT_S_POINTS),
        tolerance=getattr(ns, "tolerance", DEFAULT_TOLERANCE),
        input=getattr(ns, "input", "step"),
        out=getattr(ns, "out", None),
    )


# -- commands ---------------------------------------------------------------


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load(cfg: RunConfig) -> ElaboratedCircuit:
    ast = parse(_read(cfg.path))
    declared = ast.params
    unknown = sorted(set(cfg.overrides) - set(declared))
    if unknown:
        raise UsageError(f"--set names undeclared parameter(s): {', '.join(unknown)}")
    return elaborate(ast, cfg.overrides)


def cmd_derive(cfg: RunConfig, out, err) -> int:
    circuit = _load(cfg)
    report = derive_both(circuit, cfg.path.name)
    target = cfg.out or Path.cwd() / (cfg.path.stem + certs.FILE_SUFFIX)
    certs.write(report.certificate, target)
    out.write(f"block-diagram: {render(report.lhs)}\n")
    out.write(f"ode: {render(report.rhs)}\n")
    out.write("EQUIVALENT\n" if report.equivalent else "NOT EQUIVALENT\n")
    out.write(f"certificate: {target.name}\n")
    return 0 if report.equivalent else 1


def cmd_check_equiv(cfg: RunConfig, out, err) -> int:
    circuit = _load(cfg)
    report = derive_both(circuit)
    ok = report.equivalent
    out.write(f"block-diagram: {render(report.lhs)}\n")
    out.write(f"ode: {render(report.rhs)}\n")
    if circuit.expected is not None:
        out.write(f"expected: {render(circuit.expected)}\n")
        ok = ok and rat_eq(report.lhs, circuit.expected)
    out.write("EQUIVALENT\n" if ok else "NOT EQUIVALENT\n")
    return 0 if ok else 1


def cmd_simulate(cfg: RunConfig, out, err) -> int:
    circuit = _load(cfg)
    u, y = simulate(circuit.ode, circuit.bindings, InputSpec(cfg.input), cfg.duration or 20.0, cfg.dt)
    if cfg.out is None:
        write_csv(u, y, out)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(u, y, fh)
    return 0


def cmd_validate(cfg: RunConfig, out, err) -> int:
    circuit = _load(cfg)
    red = reduce(circuit.diagram)
    report = validate_tf(
        circuit.ode, circuit.bindings, red.fn, cfg.s_points, cfg.tolerance,
        duration=cfg.duration, dt=cfg.dt, input=InputSpec(cfg.input),
    )
    out.write(str(report) + "\n")
    return 0 if report.passed else 1


def sample_obligation(ob: Obligation, bindings: dict, s_points) -> Optional[bool]:
    """Numerically sample ``ob``; ``None`` when it cannot be sampled."""
    try:
        if ob.kind is ObligationKind.POSITIVITY:
            if ob.subject not in bindings:
                return None
            return bindings[ob.subject] > 0
        if ob.kind is ObligationKind.NONZERO_DENOM and ob.subject != INPUT_TRANSFORM:
            poly = parse_spoly(ob.subject)
            if not poly.params() <= set(bindings):
                return None
            return all(abs(spoly_eval(poly, bindings, s)) > SAMPLE_FLOOR for s in s_points)
        if ob.kind is ObligationKind.CONVERGENCE:
            f, g = (parse_rational(p) for p in ob.subject.split("; "))
            if not (f.params() | g.params()) <= set(bindings):
                return None
            return all(abs(rat_eval(f, bindings, s) * rat_eval(g, bindings, s)) < 1 for s in s_points)
    except ZeroDivisionError:
        return False
    return None


def cmd_obligations(cfg: RunConfig, out, err) -> int:
    circuit = _load(cfg)
    report = derive_both(circuit)
    failed = 0
    for ob in report.obligations:
        verdict = sample_obligation(ob, circuit.bindings, cfg.s_points)
        if verdict is None:
            status = "open"
        else:
            status = f"numerically-sampled: {'pass' if verdict else 'FAIL'}"
            failed += not verdict
        out.write(f"[{status}] {ob.describe()}  # {ob.origin}\n")
    out.write(f"{len(report.obligations)} obligations, {failed} failed samples\n")
    return 1 if failed else 0


def cmd_replay(cfg: RunConfig, out, err) -> int:
    verdict = certs.replay(_read(cfg.path))
    if isinstance(verdict.error, MalformedCertificate):
        raise verdict.error
    out.write(str(verdict) + "\n")
    return 0 if verdict.accepted else 1


_HANDLERS = {
    "derive": cmd_derive,
    "check-equiv": cmd_check_equiv,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "obligations": cmd_obligations,
    "replay": cmd_replay,
}


def _report_circuit_error(cfg: RunConfig, exc: CircuitError, err) -> None:
    span = exc.span
    err.write(f"{cfg.path}:{span.line}:{span.column}: error: {exc.message}\n")
    try:
        lines = cfg.path.read_text(encoding="utf-8").splitlines()
    except OSError:
        return
    if 1 <= span.line <= len(lines):
        err.write(f"  {lines[span.line - 1]}\n  {' ' * (span.column - 1)}^\n")


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return _HANDLERS[cfg.command](cfg, out, err)
    except CircuitError as exc:
        _report_circuit_error(cfg, exc, err)
    except (UsageError, MalformedCertificate, CertificateError, OracleError, BiocircuitError, ValueError) as exc:
        err.write(f"error: {exc}\n")
    return 2


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
