"""Numerical cross-validation of symbolic transfer functions.

The pipeline is: simulate the ODE from rest with classical RK4 on its
controllable canonical realization, integrate ``f(t) * exp(-s t)`` over the
sampled window with composite Simpson, bound the neglected tail with an
exponential-order envelope ``|f(t)| <= M exp(a t)``, and compare the ratio
``L[y](s) / L[u](s)`` with the symbolic transfer function evaluated at the
same ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    EvalPole,
    InputTransformNearZero,
    OracleError,
    RegionOfConvergence,
    StepTooLarge,
    UnboundParameter,
)
from .ode import LinearOde
from .symbolic import RationalFn, rat_eval, render

MAX_STEP_POLE_PRODUCT = 0.1
DEFAULT_TOLERANCE = 1e-4
DEFAULT_DT = 1e-3
TAIL_TARGET = 1e-12
INPUT_TRANSFORM_FLOOR = 1e-12


@dataclass(frozen=True)
class Signal:
    samples: np.ndarray
    dt: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("a signal needs at least two samples")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, f: Callable, duration: float, dt: float) -> "Signal":
        t = np.arange(_steps(duration, dt) + 1) * dt
        return cls(np.asarray(f(t), dtype=float) * np.ones_like(t), dt)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt

    @property
    def duration(self) -> float:
        return (self.samples.size - 1) * self.dt

    def __add__(self, other: "Signal") -> "Signal":
        return Signal(self.samples + other.samples, self.dt)

    def __rmul__(self, c: float) -> "Signal":
        return Signal(c * self.samples, self.dt)


@dataclass(frozen=True)
class ExpOrderBound:
    """Envelope ``|f(t)| <= M * exp(a * t)`` for ``t >= 0``."""

    M: float
    a: float = 0.0

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("M must be positive")


@dataclass(frozen=True)
class InputSpec:
    kind: str = "step"
    amplitude: float = 1.0
    frequency: float = 1.0  # rad/s, sine only
    width: float = 0.01  # s, impulse only

    def __post_init__(self):
        if self.kind not in ("step", "impulse", "sine"):
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.kind == "impulse" and not self.width > 0:
            raise ValueError("impulse width must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "step":
            return np.where(t >= 0, self.amplitude, 0.0)
        if self.kind == "sine":
            return self.amplitude * np.sin(self.frequency * t)
        # unit-area rectangular pulse
        return np.where((t >= 0) & (t < self.width), self.amplitude / self.width, 0.0)


def _steps(duration: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not duration > 0:
        raise ValueError("duration must be positive")
    return max(int(round(duration / dt)), 1)


# -- simulation -------------------------------------------------------------


def _numeric_coeffs(ode: LinearOde, bindings: Mapping[str, Fraction]) -> tuple:
    missing = ode.params() - set(bindings)
    if missing:
        raise UnboundParameter(missing)
    a = [float(c.evaluate(bindings)) for c in ode.out_coeffs]
    b = [float(c.evaluate(bindings)) for c in ode.in_coeffs]
    if a[-1] == 0:
        raise OracleError("leading output coefficient vanishes for these bindings")
    return a, b


def max_pole_magnitude(out_coeffs: Sequence[float]) -> float:
    if len(out_coeffs) < 2:
        return 0.0
    roots = np.roots(list(reversed(out_coeffs)))
    return float(np.max(np.abs(roots))) if roots.size else 0.0


def realization(a: Sequence[float], b: Sequence[float]) -> tuple:
    """Controllable canonical ``(A, B, C, D)`` for ``b(s)/a(s)``, coefficients lowest first."""
    a_m = np.asarray(a, dtype=float) / a[-1]
    b_m = np.zeros(len(a))
    b_m[: len(b)] = np.asarray(b, dtype=float) / a[-1]
    return _ccf(a_m, b_m, len(a) - 1)


def _ccf(a: np.ndarray, b: np.ndarray, n: int) -> tuple:
    D = b[n] if n < b.size else 0.0
    resid = b[:n] - D * a[:n]
    A = np.zeros((n, n))
    if n:
        A[:-1, 1:] = np.eye(n - 1)
        A[-1, :] = -a[:n]
    B = np.zeros(n)
    if n:
        B[-1] = 1.0
    return A, B, resid.copy(), float(D)


def simulate(
    ode: LinearOde,
    bindings: Mapping[str, object],
    input: InputSpec | Callable = InputSpec(),
    duration: float = 20.0,
    dt: float = DEFAULT_DT,
) -> tuple:
    """Integrate ``ode`` from zero initial conditions; return ``(u, y)``."""
    bindings = {k: Fraction(v) for k, v in bindings.items()}
    a, b = _numeric_coeffs(ode, bindings)
    pole = max_pole_magnitude(a)
    if dt * pole >= MAX_STEP_POLE_PRODUCT:
        raise StepTooLarge(
            f"dt={dt:g} with fastest pole |p|={pole:.6g}: dt*|p| must stay below {MAX_STEP_POLE_PRODUCT}"
        )
    A, B, C, D = realization(a, b)
    n = len(a) - 1

    N = _steps(duration, dt)
    t = np.arange(N + 1) * dt
    u_at = input
    u = np.asarray(u_at(t), dtype=float) * np.ones_like(t)
    y = np.empty(N + 1)
    x = np.zeros(n)
    y[0] = C @ x + D * u[0]
    half = dt / 2
    for i in range(N):
        ti = t[i]
        u0 = u[i]
        um = float(u_at(ti + half))
        u1 = u[i + 1]
        k1 = A @ x + B * u0
        k2 = A @ (x + half * k1) + B * um
        k3 = A @ (x + half * k2) + B * um
        k4 = A @ (x + dt * k3) + B * u1
        x = x + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        y[i + 1] = C @ x + D * u1
    return Signal(u, dt), Signal(y, dt)


# -- Laplace quadrature -----------------------------------------------------


def simpson(values: np.ndarray, h: float) -> complex:
    """Composite Simpson on a uniform grid; 3/8 rule closes an odd interval count."""
    m = values.size - 1
    if m < 1:
        return 0j
    if m == 1:
        return h * (values[0] + values[1]) / 2
    if m % 2 == 0:
        return h / 3 * (values[0] + values[-1] + 4 * values[1:-1:2].sum() + 2 * values[2:-1:2].sum())
    head = simpson(values[: m - 2], h) if m > 3 else 0j
    tail = values[m - 3 :]
    return head + 3 * h / 8 * (tail[0] + 3 * tail[1] + 3 * tail[2] + tail[3])


@dataclass(frozen=True)
class LaplaceEstimate:
    value: complex
    truncation_bound: float
    quadrature_error: float
    bound_holds: bool

    @property
    def error_bound(self) -> float:
        return self.truncation_bound + self.quadrature_error

    def __complex__(self) -> complex:
        return self.value


def truncation_bound(bound: ExpOrderBound, s: complex, T: float) -> float:
    """``M * exp((a - Re s) T) / (Re s - a)``: the neglected tail beyond T."""
    gap = s.real - bound.a
    return bound.M * math.exp(-gap * T) / gap


def numerical_laplace(f: Signal, s: complex, tail_bound: ExpOrderBound) -> LaplaceEstimate:
    """Truncated transform of ``f`` at ``s`` with error estimates."""
    s = complex(s)
    if not s.real > tail_bound.a:
        raise RegionOfConvergence(
            f"Re(s)={s.real:g} is not inside the region of convergence Re(s) > {tail_bound.a:g}"
        )
    t = f.times
    g = f.samples * np.exp(-s * t)
    value = complex(simpson(g, f.dt))
    quad = 0.0
    if g.size >= 9:
        m = (g.size - 1) // 2 * 2
        fine = simpson(g[: m + 1], f.dt)
        coarse = simpson(g[: m + 1 : 2], 2 * f.dt)
        quad = abs(fine - coarse) / 15
    return LaplaceEstimate(
        value, truncation_bound(tail_bound, s, f.duration), quad, exp_order_check(f, tail_bound)
    )


def exp_order_check(f: Signal, bound: ExpOrderBound) -> bool:
    """True iff ``|f(t_i)| <= M exp(a t_i)`` at every sample."""
    env = bound.M * np.exp(bound.a * f.times)
    return bool(np.all(np.abs(f.samples) <= env * (1 + 1e-12)))


def estimate_exp_order(f: Signal) -> ExpOrderBound:
    """Envelope fitted to the samples: growth rate from the second half, M from the max.

    The returned bound always holds on the samples themselves.
    """
    t, x = f.times, np.abs(f.samples)
    a = 0.0
    half = x.size // 2
    lo, hi = x[half], x[-1]
    if lo > 0 and hi > lo and t[-1] > t[half]:
        a = max(0.0, math.log(hi / lo) / (t[-1] - t[half]))
    M = float(np.max(x * np.exp(-a * t)))
    return ExpOrderBound(M if M > 0 else 1e-300, a)


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class PointResult:
    s: complex
    expected: complex
    measured: complex
    rel_error: float
    error_bound: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    tf: str
    points: tuple
    tolerance: float
    duration: float
    dt: float
    bounds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.points)

    def __str__(self) -> str:
        lines = [
            f"transfer function: {self.tf}",
            f"window T={self.duration:g} dt={self.dt:g} tolerance={self.tolerance:g}",
        ]
        for p in self.points:
            lines.append(
                f"  s={_fmt_c(p.s)}  symbolic={_fmt_c(p.expected)}  numeric={_fmt_c(p.measured)}"
                f"  rel_err={p.rel_error:.3e}  {'PASS' if p.passed else 'FAIL'}"
            )
        lines.append("VALID" if self.passed else "INVALID")
        return "\n".join(lines)


def _fmt_c(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.9g}"
    return f"{z.real:.9g}{z.imag:+.9g}j"


def default_duration(min_re_s: float, M: float = 1.0, a: float = 0.0) -> float:
    """Window length for which ``M exp((a - Re s) T) < TAIL_TARGET``."""
    gap = min_re_s - a
    if gap <= 0:
        raise RegionOfConvergence(f"Re(s)={min_re_s:g} is not above the growth rate a={a:g}")
    return max(math.log(max(M, 1.0) / TAIL_TARGET) / gap, 1.0)


def validate_tf(
    ode: LinearOde,
    bindings: Mapping[str, object],
    tf: RationalFn,
    s_points: Sequence[complex],
    tolerance: float = DEFAULT_TOLERANCE,
    *,
    duration: Optional[float] = None,
    dt: float = DEFAULT_DT,
    input: InputSpec = InputSpec(),
) -> ValidationReport:
    """Compare ``tf`` against ``L[y](s)/L[u](s)`` from a simulated trajectory."""
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    if not s_points:
        raise ValueError("at least one s point is required")
    s_points = [complex(s) for s in s_points]
    min_re = min(s.real for s in s_points)
    if duration is None:
        duration = default_duration(min_re)
        u, y = simulate(ode, bindings, input, duration, dt)
        ub, yb = estimate_exp_order(u), estimate_exp_order(y)
        needed = max(default_duration(min_re, b.M, b.a) for b in (ub, yb))
        if needed > duration * 1.0001:
            duration = min(needed, 50 * duration)
            u, y = simulate(ode, bindings, input, duration, dt)
    else:
        u, y = simulate(ode, bindings, input, duration, dt)
    ub, yb = estimate_exp_order(u), estimate_exp_order(y)

    points = []
    for s in s_points:
        Lu = numerical_laplace(u, s, ub)
        Ly = numerical_laplace(y, s, yb)
        if abs(Lu.value) < INPUT_TRANSFORM_FLOOR:
            raise InputTransformNearZero(f"|L[u]({_fmt_c(s)})| = {abs(Lu.value):.3e}")
        measured = Ly.value / Lu.value
        try:
            expected = rat_eval(tf, bindings, s)
        except EvalPole:
            points.append(PointResult(s, complex("nan"), measured, math.inf, math.inf, False))
            continue
        scale = abs(expected) if expected != 0 else 1.0
        rel = abs(measured - expected) / scale
        err = (Ly.error_bound + abs(measured) * Lu.error_bound) / abs(Lu.value) / scale
        points.append(PointResult(s, expected, measured, rel, err, rel < tolerance))
    return ValidationReport(render(tf), tuple(points), tolerance, duration, dt, {"u": ub, "y": yb})


def write_csv(u: Signal, y: Signal, stream) -> None:
    """``t,u,y`` rows with 9 significant digits."""
    stream.write("t,u,y\n")
    for t, a, b in zip(u.times, u.samples, y.samples):
        stream.write(f"{t:.9g},{a:.9g},{b:.9g}\n")
