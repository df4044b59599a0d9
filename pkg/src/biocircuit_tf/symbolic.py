"""Exact symbolic arithmetic for transfer functions.

Three layers, each an immutable value type:

* :class:`ParamPoly` -- multivariate polynomial in named circuit parameters
  with :class:`fractions.Fraction` coefficients.
* :class:`SPoly` -- polynomial in the Laplace variable ``s`` whose
  coefficients are ``ParamPoly`` values (lowest power first).
* :class:`RationalFn` -- ``num / den`` of two ``SPoly`` values.

No multivariate GCD is ever computed.  Equality of rational functions is
decided by cross-multiplication (:func:`rat_eq`); the stored form is only
normalized by cheap, exact steps (see :func:`rat_make`).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce as _fold
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

from .errors import DivisionByZeroFn, EvalPole, UnboundParameter, ZeroDenominator

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by name
Number = Union[int, Fraction]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
LAPLACE_VAR = "s"


def check_param_name(name: str) -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise ValueError(f"invalid parameter name {name!r}")
    if name == LAPLACE_VAR:
        raise ValueError(f"{LAPLACE_VAR!r} is reserved for the Laplace variable")
    return name


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


def _mono_str(m: Monomial) -> str:
    return "*".join(name if e == 1 else f"{name}^{e}" for name, e in m)


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class ParamPoly:
    """Polynomial in named parameters with exact rational coefficients.

    Terms are kept sorted by monomial (lexicographic on the sorted
    ``(name, exponent)`` pairs, the constant monomial first) and zero
    coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for mono, c in items:
            mono = tuple(sorted((check_param_name(n), int(e)) for n, e in mono if e))
            acc[mono] = acc.get(mono, 0) + Fraction(c)
        self._terms = tuple(sorted((m, c) for m, c in acc.items() if c != 0))
        self._hash = None

    @classmethod
    def _raw(cls, items: Iterable) -> "ParamPoly":
        obj = cls.__new__(cls)
        obj._terms = tuple(sorted((m, c) for m, c in items if c != 0))
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Number) -> "ParamPoly":
        return cls._raw([((), Fraction(c))])

    @classmethod
    def var(cls, name: str, exponent: int = 1) -> "ParamPoly":
        check_param_name(name)
        if exponent < 1:
            raise ValueError("exponent must be >= 1")
        return cls._raw([(((name, exponent),), Fraction(1))])

    @classmethod
    def coerce(cls, value) -> "ParamPoly":
        if isinstance(value, ParamPoly):
            return value
        if isinstance(value, str):
            return cls.var(value)
        return cls.const(value)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> tuple:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == () for m, _ in self._terms)

    def constant_value(self) -> Fraction:
        """Value of a parameter-free polynomial (raises if symbolic)."""
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self._terms[0][1] if self._terms else Fraction(0)

    def params(self) -> frozenset:
        return frozenset(n for m, _ in self._terms for n, _ in m)

    def leading(self) -> tuple:
        """(monomial, coefficient) of the largest monomial."""
        return self._terms[-1]

    def coefficients(self) -> list:
        return [c for _, c in self._terms]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "ParamPoly":
        other = ParamPoly.coerce(other)
        acc = dict(self._terms)
        for m, c in other._terms:
            acc[m] = acc.get(m, 0) + c
        return ParamPoly._raw(acc.items())

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._raw((m, -c) for m, c in self._terms)

    def __sub__(self, other) -> "ParamPoly":
        return self + (-ParamPoly.coerce(other))

    def __rsub__(self, other) -> "ParamPoly":
        return ParamPoly.coerce(other) - self

    def __mul__(self, other) -> "ParamPoly":
        other = ParamPoly.coerce(other)
        acc: dict = {}
        for ma, ca in self._terms:
            for mb, cb in other._terms:
                m = _mono_mul(ma, mb)
                acc[m] = acc.get(m, 0) + ca * cb
        return ParamPoly._raw(acc.items())

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ParamPoly":
        if k < 0:
            raise ValueError("negative power")
        out = ParamPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, q: Number) -> "ParamPoly":
        q = Fraction(q)
        return ParamPoly._raw((m, c * q) for m, c in self._terms)

    def evaluate(self, bindings: Mapping[str, Number]) -> Fraction:
        missing = self.params() - set(bindings)
        if missing:
            raise UnboundParameter(missing)
        total = Fraction(0)
        for m, c in self._terms:
            v = c
            for name, e in m:
                v *= Fraction(bindings[name]) ** e
            total += v
        return total

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, ParamPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ParamPoly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self) -> str:
        return f"ParamPoly({str(self)!r})"

    def __str__(self) -> str:
        return _join_terms([(c, _mono_str(m)) for m, c in reversed(self._terms)])


def _term_str(c: Fraction, body: str) -> str:
    if not body:
        return format_fraction(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{format_fraction(c)}*{body}"


def _join_terms(terms: Sequence[tuple]) -> str:
    if not terms:
        return "0"
    out = ""
    for i, (c, body) in enumerate(terms):
        t = _term_str(c, body)
        if i == 0:
            out = t
        elif t.startswith("-"):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


PPZERO = ParamPoly()
PPONE = ParamPoly.const(1)


class SPoly:
    """Polynomial in ``s`` with :class:`ParamPoly` coefficients, lowest power first."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [ParamPoly.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self._coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def const(cls, c) -> "SPoly":
        return cls([c])

    @classmethod
    def s(cls, power: int = 1) -> "SPoly":
        return cls([0] * power + [1])

    @classmethod
    def coerce(cls, value) -> "SPoly":
        return value if isinstance(value, SPoly) else cls([value])

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def degree(self) -> int:
        """Degree in s; -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def leading(self) -> ParamPoly:
        return self._coeffs[-1] if self._coeffs else PPZERO

    def is_numeric(self) -> bool:
        return all(c.is_constant() for c in self._coeffs)

    def is_constant(self) -> bool:
        return self.degree <= 0

    def params(self) -> frozenset:
        return frozenset().union(*(c.params() for c in self._coeffs))

    def numeric_coeffs(self) -> list:
        return [c.constant_value() for c in self._coeffs]

    def __add__(self, other) -> "SPoly":
        other = SPoly.coerce(other)
        a, b = self._coeffs, other._coeffs
        n = max(len(a), len(b))
        return SPoly(
            (a[i] if i < len(a) else PPZERO) + (b[i] if i < len(b) else PPZERO) for i in range(n)
        )

    __radd__ = __add__

    def __neg__(self) -> "SPoly":
        return SPoly(-c for c in self._coeffs)

    def __sub__(self, other) -> "SPoly":
        return self + (-SPoly.coerce(other))

    def __rsub__(self, other) -> "SPoly":
        return SPoly.coerce(other) - self

    def __mul__(self, other) -> "SPoly":
        other = SPoly.coerce(other)
        if self.is_zero() or other.is_zero():
            return SPoly()
        out = [PPZERO] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other._coeffs):
                out[i + j] = out[i + j] + a * b
        return SPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SPoly":
        out = SPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, q: Number) -> "SPoly":
        return SPoly(c.scale(q) for c in self._coeffs)

    def substitute(self, bindings: Mapping[str, Number]) -> list:
        """Exact rational coefficients after binding every parameter."""
        missing = self.params() - set(bindings)
        if missing:
            raise UnboundParameter(missing)
        return [c.evaluate(bindings) for c in self._coeffs]

    def __eq__(self, other) -> bool:
        if isinstance(other, SPoly):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._coeffs)
        return self._hash

    def __repr__(self) -> str:
        return f"SPoly({str(self)!r})"

    def __str__(self) -> str:
        terms = []
        for k in range(len(self._coeffs) - 1, -1, -1):
            spow = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
            for m, c in reversed(self._coeffs[k].terms):
                body = "*".join(x for x in (_mono_str(m), spow) if x)
                terms.append((c, body))
        return _join_terms(terms)

    # slices: the numeric polynomial in s multiplying each parameter monomial

    def slices(self) -> dict:
        out: dict = {}
        for k, c in enumerate(self._coeffs):
            for m, q in c.terms:
                row = out.setdefault(m, [Fraction(0)] * len(self._coeffs))
                row[k] = q
        return {m: _strip(row) for m, row in out.items()}

    @classmethod
    def from_slices(cls, slices: Mapping[Monomial, Sequence[Fraction]]) -> "SPoly":
        n = max((len(v) for v in slices.values()), default=0)
        cols: list = [[] for _ in range(n)]
        for m, row in slices.items():
            for k, q in enumerate(row):
                if q:
                    cols[k].append((m, q))
        return cls(ParamPoly._raw(col) for col in cols)


SZERO = SPoly()
SONE = SPoly.const(1)


# -- univariate rational polynomial helpers (coefficient lists, lowest first)


def _strip(p: list) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _divmod(a: list, b: list) -> tuple:
    a = _strip(a)
    b = _strip(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        f = r[-1] / lb
        q[k] = f
        for i, bc in enumerate(b):
            r[i + k] -= f * bc
        r = _strip(r)
    return _strip(q), r


def _monic(p: list) -> list:
    p = _strip(p)
    return [c / p[-1] for c in p] if p else p


def _poly_gcd(a: list, b: list) -> list:
    a, b = _strip(a), _strip(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    return _monic(a)


def _content(values: Iterable[Fraction]) -> Fraction:
    nums = dens = None
    for v in values:
        if v == 0:
            continue
        nums = abs(v.numerator) if nums is None else gcd(nums, v.numerator)
        dens = v.denominator if dens is None else lcm(dens, v.denominator)
    return Fraction(1) if nums is None else Fraction(nums, dens)


# -- rational functions -----------------------------------------------------


class RationalFn:
    """Transfer function ``num(s) / den(s)``.

    Construct through :func:`rat_make` (or :meth:`RationalFn.make`) to get
    the canonical representative; ``RationalFn(num, den)`` does the same.
    Python ``==`` is structural; use :func:`rat_eq` for mathematical
    equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=SONE, *, _canonical: bool = False):
        num, den = SPoly.coerce(num), SPoly.coerce(den)
        if not _canonical:
            num, den = _canonicalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFn is immutable")

    @classmethod
    def make(cls, num, den=SONE) -> "RationalFn":
        return cls(num, den)

    @classmethod
    def coerce(cls, value) -> "RationalFn":
        return value if isinstance(value, RationalFn) else cls(SPoly.coerce(value))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def params(self) -> frozenset:
        return self.num.params() | self.den.params()

    def __add__(self, other):
        return rat_add(self, RationalFn.coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return rat_add(self, -RationalFn.coerce(other))

    def __rsub__(self, other):
        return rat_add(RationalFn.coerce(other), -self)

    def __neg__(self):
        return RationalFn(-self.num, self.den, _canonical=True)

    def __mul__(self, other):
        return rat_mul(self, RationalFn.coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return rat_div(self, RationalFn.coerce(other))

    def __rtruediv__(self, other):
        return rat_div(RationalFn.coerce(other), self)

    def __pow__(self, k: int):
        if k < 0:
            return rat_div(ONE, self ** (-k))
        return RationalFn(self.num**k, self.den**k)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFn):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFn({render(self)!r})"

    def __str__(self) -> str:
        return render(self)


def _canonicalize(num: SPoly, den: SPoly) -> tuple:
    if den.is_zero():
        raise ZeroDenominator("denominator is the zero polynomial")
    if num.is_zero():
        return SZERO, SONE
    # Cancel the greatest common factor in Q[s] shared by every parameter
    # slice of num and den; this is the full gcd when both are numeric.
    ns, ds = num.slices(), den.slices()
    g = _fold(_poly_gcd, list(ns.values()) + list(ds.values()))
    if len(g) > 1:
        ns = {m: _divmod(p, g)[0] for m, p in ns.items()}
        ds = {m: _divmod(p, g)[0] for m, p in ds.items()}
        num, den = SPoly.from_slices(ns), SPoly.from_slices(ds)
    if den.is_numeric():
        lc = den.leading().constant_value()
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return num, den
    scale = 1 / _content(
        q for p in (num, den) for c in p.coeffs for q in c.coefficients()
    )
    if den.leading().leading()[1] * scale < 0:
        scale = -scale
    if scale != 1:
        num, den = num.scale(scale), den.scale(scale)
    return num, den


def rat_make(num, den=SONE) -> RationalFn:
    """Canonical rational function ``num/den``.

    Raises :class:`ZeroDenominator` when ``den`` is the zero polynomial.
    """
    return RationalFn(num, den)


ZERO = RationalFn(SZERO, SONE, _canonical=True)
ONE = RationalFn(SONE, SONE, _canonical=True)


def rat_add(a: RationalFn, b: RationalFn) -> RationalFn:
    if a.den == b.den:
        return RationalFn(a.num + b.num, a.den)
    return RationalFn(a.num * b.den + b.num * a.den, a.den * b.den)


def rat_mul(a: RationalFn, b: RationalFn) -> RationalFn:
    nums = [a.num, b.num]
    dens = [a.den, b.den]
    # structural cancellation of identical non-constant factors
    for i in range(2):
        for j in range(2):
            if not nums[i].is_constant() and nums[i] == dens[j]:
                nums[i] = SONE
                dens[j] = SONE
    return RationalFn(nums[0] * nums[1], dens[0] * dens[1])


def rat_div(a: RationalFn, b: RationalFn) -> RationalFn:
    if b.is_zero():
        raise DivisionByZeroFn("division by the zero rational function")
    return rat_mul(a, RationalFn(b.den, b.num, _canonical=False))


def rat_neg(a: RationalFn) -> RationalFn:
    return -a


def cross_difference(a: RationalFn, b: RationalFn) -> SPoly:
    """``a.num*b.den - b.num*a.den``; zero exactly when ``a`` equals ``b``."""
    return a.num * b.den - b.num * a.den


def rat_eq(a: RationalFn, b: RationalFn) -> bool:
    return cross_difference(a, b).is_zero()


# -- numeric evaluation ---------------------------------------------------

def _to_gaussian(z) -> tuple:
    if isinstance(z, complex):
        return Fraction(z.real), Fraction(z.imag)
    return Fraction(z), Fraction(0)


def _horner(coeffs: Sequence[Fraction], z: tuple) -> tuple:
    zr, zi = z
    re, im = Fraction(0), Fraction(0)
    for c in reversed(coeffs):
        re, im = re * zr - im * zi + c, re * zi + im * zr
    return re, im


def rat_eval(f: RationalFn, bindings: Mapping[str, Number], s_value) -> complex:
    """Evaluate ``f`` at ``s_value`` with every parameter bound.

    The arithmetic is exact (Gaussian rationals built from the binary value
    of ``s_value``), so poles are detected exactly and only the final
    conversion to ``complex`` rounds.
    """
    bindings = {k: Fraction(v) for k, v in bindings.items()}
    z = _to_gaussian(s_value)
    dr, di = _horner(f.den.substitute(bindings), z)
    if dr == 0 and di == 0:
        raise EvalPole(f"denominator of {render(f)} vanishes at s={s_value}")
    nr, ni = _horner(f.num.substitute(bindings), z)
    norm = dr * dr + di * di
    return complex(float((nr * dr + ni * di) / norm), float((ni * dr - nr * di) / norm))


def spoly_eval(p: SPoly, bindings: Mapping[str, Number], s_value) -> complex:
    re, im = _horner(p.substitute({k: Fraction(v) for k, v in bindings.items()}), _to_gaussian(s_value))
    return complex(float(re), float(im))


def bind(f: RationalFn, bindings: Mapping[str, Number]) -> RationalFn:
    """Substitute values for the bound parameters, leaving others symbolic."""

    def sub(p: SPoly) -> SPoly:
        out = []
        for c in p.coeffs:
            acc = PPZERO
            for m, q in c.terms:
                term = ParamPoly.const(q)
                for name, e in m:
                    if name in bindings:
                        term = term.scale(Fraction(bindings[name]) ** e)
                    else:
                        term = term * ParamPoly.var(name, e)
                acc = acc + term
            out.append(acc)
        return SPoly(out)

    return RationalFn(sub(f.num), sub(f.den))


# -- rendering --------------------------------------------------------------


def render(f: RationalFn) -> str:
    """Render as ``(<num>)/(<den>)``; parseable by :func:`notation.parse_rational`."""
    return f"({f.num})/({f.den})"


# convenience constructors

def param(name: str) -> RationalFn:
    return RationalFn(SPoly.const(ParamPoly.var(name)), SONE, _canonical=True)


def const(q: Number) -> RationalFn:
    return RationalFn(SPoly.const(q))


S = RationalFn(SPoly.s(), SONE, _canonical=True)
