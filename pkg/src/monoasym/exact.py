"""Exact arithmetic core.

Rationals are :class:`fractions.Fraction`, multi-indices are plain tuples of
ints and integer matrices are tuples of row tuples.  On top of that this
module defines polynomial amplitudes, Laurent monomials, the closed class of
finite log-power sums ``sum c * t^s * ln(t)^k`` and sublevel functions, plus
the one-dimensional integration step that drives the sublevel recursion.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DimensionMismatchError,
    DivergentRecursionError,
    InputError,
    NotExactEverywhereError,
    ParseError,
    SingularMatrixError,
)

MultiIndex = tuple[int, ...]
IntMatrix = tuple[tuple[int, ...], ...]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact values")
    return Fraction(x)


def fmt_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector with
    the same direction."""
    fr = [Fraction(v) for v in vec]
    den = 1
    for v in fr:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in fr]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(v // g for v in ints)


# --------------------------------------------------------------------------
# integer matrices

def as_matrix(rows) -> IntMatrix:
    m = tuple(tuple(int(v) for v in row) for row in rows)
    if any(len(r) != len(m) for r in m):
        raise DimensionMismatchError("matrix must be square")
    return m


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(a, b):
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a):
    return tuple(tuple(r) for r in zip(*a))


def det(m) -> int:
    """Bareiss fraction-free elimination; exact for integer input."""
    a = [list(r) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def adjugate(m) -> IntMatrix:
    n = len(m)
    if n == 1:
        return ((1,),)
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            cof[i][j] = (-1) ** (i + j) * det(minor)
    adj = transpose(cof)
    if __debug__:
        d = det(m)
        assert matmul(adj, m) == tuple(tuple(d * v for v in r) for r in identity(n))
    return adj


def inverse_times_det(m) -> tuple[IntMatrix, int]:
    """Return ``(adj(m), det(m))`` so that ``adj(m) @ m == det(m) * I``."""
    d = det(m)
    if d == 0:
        raise SingularMatrixError("matrix is singular")
    return adjugate(m), d


def matrix_exact(m, op: str):
    m = as_matrix(m)
    if op == "det":
        return det(m)
    if op == "adjugate":
        if det(m) == 0:
            raise SingularMatrixError("adjugate requested for a singular matrix")
        return adjugate(m)
    if op == "inverse_times_det":
        return inverse_times_det(m)
    raise ValueError(f"unknown matrix op {op!r}")


def solve_exact(a, b) -> tuple[Fraction, ...] | None:
    """Solve a square rational system by Gaussian elimination; ``None`` if singular."""
    n = len(a)
    rows = [[Fraction(v) for v in a[i]] + [Fraction(b[i])] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if piv is None:
            return None
        rows[c], rows[piv] = rows[piv], rows[c]
        p = rows[c][c]
        rows[c] = [v / p for v in rows[c]]
        for r in range(n):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return tuple(rows[i][n] for i in range(n))


def rank(vectors) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    if not rows:
        return 0
    r = 0
    ncol = len(rows[0])
    for c in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


# --------------------------------------------------------------------------
# monomials and polynomial amplitudes

def multi_index(exps: Iterable[int], n: int | None = None) -> MultiIndex:
    t = tuple(int(e) for e in exps)
    if any(e < 0 for e in t):
        raise InputError(f"multi-index entries must be nonnegative: {t}")
    if n is not None and len(t) != n:
        raise DimensionMismatchError(f"expected {n} exponents, got {len(t)}")
    return t


@dataclass(frozen=True)
class LaurentMonomial:
    """``coefficient * prod x_i^exponents[i]`` with signed integer exponents."""

    coefficient: Fraction
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficient", as_fraction(self.coefficient))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if self.coefficient <= 0:
            raise InputError("monomial coefficient must be positive")

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    def is_constant(self) -> bool:
        return not any(self.exponents)

    def reciprocal(self) -> LaurentMonomial:
        return LaurentMonomial(1 / self.coefficient, tuple(-e for e in self.exponents))

    def __mul__(self, other: LaurentMonomial) -> LaurentMonomial:
        _check_dim(self.dimension, other.dimension)
        return LaurentMonomial(self.coefficient * other.coefficient,
                               tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __truediv__(self, other: LaurentMonomial) -> LaurentMonomial:
        return self * other.reciprocal()

    def evaluate(self, x: Sequence[float]) -> float:
        v = float(self.coefficient)
        for xi, e in zip(x, self.exponents):
            v *= xi ** e
        return v

    def __str__(self):
        parts = [] if self.coefficient == 1 else [fmt_fraction(self.coefficient)]
        for i, e in enumerate(self.exponents, 1):
            if e == 1:
                parts.append(f"x{i}")
            elif e:
                parts.append(f"x{i}^{e}")
        return "*".join(parts) or "1"


def _check_dim(a: int, b: int):
    if a != b:
        raise DimensionMismatchError(f"dimension mismatch: {a} vs {b}")


class PolynomialAmplitude:
    """Polynomial in ``x1..xn`` with rational coefficients, stored sparsely."""

    __slots__ = ("dimension", "_terms")

    def __init__(self, terms: Mapping[Sequence[int], object], dimension: int | None = None):
        clean: dict[MultiIndex, Fraction] = {}
        for exps, c in terms.items():
            mi = multi_index(exps)
            if dimension is None:
                dimension = len(mi)
            _check_dim(len(mi), dimension)
            c = as_fraction(c)
            v = clean.get(mi, Fraction(0)) + c
            if v:
                clean[mi] = v
            else:
                clean.pop(mi, None)
        if dimension is None:
            raise InputError("cannot infer dimension of an empty amplitude")
        self.dimension = dimension
        self._terms = dict(sorted(clean.items()))

    @classmethod
    def constant(cls, n: int, c=1) -> PolynomialAmplitude:
        return cls({(0,) * n: c}, n)

    @classmethod
    def variable(cls, n: int, i: int) -> PolynomialAmplitude:
        return cls({tuple(int(j == i) for j in range(n)): 1}, n)

    @property
    def terms(self) -> dict[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def axis_degree(self, i: int) -> int:
        return max((e[i] for e in self._terms), default=0)

    def __eq__(self, other):
        return (isinstance(other, PolynomialAmplitude) and self.dimension == other.dimension
                and self._terms == other._terms)

    def __hash__(self):
        return hash((self.dimension, tuple(self._terms.items())))

    def __add__(self, other: PolynomialAmplitude) -> PolynomialAmplitude:
        _check_dim(self.dimension, other.dimension)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return PolynomialAmplitude(out, self.dimension)

    def __neg__(self):
        return PolynomialAmplitude({e: -c for e, c in self._terms.items()}, self.dimension)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PolynomialAmplitude):
            c = as_fraction(other)
            return PolynomialAmplitude({e: c * v for e, v in self._terms.items()}, self.dimension)
        _check_dim(self.dimension, other.dimension)
        out: dict[MultiIndex, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return PolynomialAmplitude(out, self.dimension)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PolynomialAmplitude.constant(self.dimension)
        for _ in range(k):
            out = out * self
        return out

    def times_monomial(self, coefficient, exponents: Sequence[int]) -> PolynomialAmplitude:
        c = as_fraction(coefficient)
        return PolynomialAmplitude(
            {tuple(a + b for a, b in zip(e, exponents)): c * v for e, v in self._terms.items()},
            self.dimension)

    def integral(self) -> Fraction:
        """Exact integral over the unit cube."""
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for a in e:
                term /= a + 1
            total += term
        return total

    def __repr__(self):
        return f"PolynomialAmplitude({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for e, c in self._terms.items():
            mono = str(LaurentMonomial(1, e))
            if mono == "1":
                body = fmt_fraction(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{fmt_fraction(abs(c))}*{mono}"
            out.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


# --------------------------------------------------------------------------
# log-power sums

_Key = tuple[Fraction, int]


class LogPowerSum:
    """Finite sum ``sum coeff * t^s * ln(t)^k``.

    Terms are keyed by ``(s, k)``, zero coefficients are dropped and the terms
    are kept sorted by ``(s, k)`` ascending, so ``terms[0]`` is the leading
    term as ``t -> 0+``.  Coefficients are Fractions on the sublevel side and
    complex floats on the transfer side.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, object] | Iterable[tuple] = ()):
        acc: dict[_Key, object] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((t[:2], t[2]) for t in terms)
        for (s, k), c in items:
            k = int(k)
            if k < 0:
                raise InputError("log power must be nonnegative")
            key = (as_fraction(s), k)
            acc[key] = acc.get(key, 0) + c
        self._terms = tuple((s, k, c) for (s, k), c in sorted(acc.items()) if c != 0)

    @property
    def terms(self) -> tuple[tuple[Fraction, int, object], ...]:
        return self._terms

    def as_dict(self) -> dict[_Key, object]:
        return {(s, k): c for s, k, c in self._terms}

    def __iter__(self) -> Iterator[tuple[Fraction, int, object]]:
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        return isinstance(other, LogPowerSum) and self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __repr__(self):
        return f"LogPowerSum({self.pretty()!r})"

    def leading(self):
        """Dominant term as ``t -> 0``: smallest exponent, then the largest
        log power at that exponent."""
        if not self._terms:
            return None
        s0 = self._terms[0][0]
        return [t for t in self._terms if t[0] == s0][-1]

    def exponents(self) -> list[Fraction]:
        return sorted({s for s, _, _ in self._terms})

    def max_logpower(self) -> int:
        return max((k for _, k, _ in self._terms), default=0)

    def __add__(self, other: LogPowerSum) -> LogPowerSum:
        return LogPowerSum([*self._terms, *other._terms])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> LogPowerSum:
        return LogPowerSum([(s, k, c * v) for s, k, v in self._terms])

    def multiply_term(self, s, k: int = 0, c=1) -> LogPowerSum:
        s = as_fraction(s)
        return LogPowerSum([(s0 + s, k0 + k, c * v) for s0, k0, v in self._terms])

    def at_one(self):
        """Value at ``t = 1`` where every logarithmic term vanishes."""
        return sum((c for _, k, c in self._terms if k == 0), Fraction(0))

    def substitute_scale(self, c) -> LogPowerSum:
        """Rewrite ``G(t/c)`` as a sum in ``t``.  Only exact when every
        ``c^{-s}`` is rational and ``ln c`` does not appear, i.e. ``c == 1``;
        otherwise coefficients become floats."""
        c = as_fraction(c)
        if c == 1:
            return self
        import math

        lc = math.log(c)
        out = []
        for s, k, v in self._terms:
            f = complex(v) * float(c) ** (-float(s))
            for j in range(k + 1):
                out.append((s, k - j, f * comb(k, j) * (-lc) ** j))
        return LogPowerSum(out)

    # -- text and json forms -------------------------------------------

    def to_text(self, var: str = "t") -> str:
        """Canonical form, one ``coeff * t^(p/q) * ln(t)^k`` term per line."""
        lines = []
        for s, k, c in self._terms:
            lines.append(f"{_fmt_coeff(c)} * {var}^({s.numerator}/{s.denominator}) * ln({var})^{k}")
        return "\n".join(lines)

    def pretty(self, var: str = "t") -> str:
        if not self._terms:
            return "0"
        out = []
        for s, k, c in self._terms:
            neg = _is_negative(c)
            mag = -c if neg else c
            factors = []
            if s != 0:
                if s == 1:
                    factors.append(var)
                elif s.denominator == 1 and s > 0:
                    factors.append(f"{var}^{s.numerator}")
                else:
                    factors.append(f"{var}^({fmt_fraction(s)})")
            if k:
                factors.append(f"ln({var})" if k == 1 else f"ln({var})^{k}")
            if mag == 1 and factors:
                body = "*".join(factors)
            else:
                body = "*".join([_fmt_coeff(mag), *factors])
            out.append(("- " if neg else "+ ") + body)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    @classmethod
    def from_text(cls, text: str, var: str = "t") -> LogPowerSum:
        return _LogPowerParser(text, var).parse()

    def to_json(self) -> list[dict]:
        out = []
        for s, k, c in self._terms:
            d = {"s_num": s.numerator, "s_den": s.denominator, "k": k}
            if isinstance(c, Fraction) or isinstance(c, int):
                c = Fraction(c)
                d.update(coeff_num=c.numerator, coeff_den=c.denominator)
            else:
                c = complex(c)
                d.update(re=c.real, im=c.imag)
            out.append(d)
        return out

    @classmethod
    def from_json(cls, data) -> LogPowerSum:
        if isinstance(data, str):
            data = json.loads(data)
        terms = []
        for d in data:
            s = Fraction(d["s_num"], d["s_den"])
            if "coeff_num" in d:
                c = Fraction(d["coeff_num"], d["coeff_den"])
            else:
                c = complex(d["re"], d["im"])
            terms.append((s, d["k"], c))
        return cls(terms)


def _is_negative(c) -> bool:
    if isinstance(c, complex):
        return False
    return c < 0


def _fmt_coeff(c) -> str:
    if isinstance(c, (Fraction, int)):
        return fmt_fraction(Fraction(c))
    if isinstance(c, complex):
        return f"({c.real!r}{c.imag:+}j)"
    return repr(float(c))


class _LogPowerParser:
    """Reads both the canonical one-term-per-line form and the compact
    ``t - t*ln(t)`` form back into a :class:`LogPowerSum`."""

    _token = re.compile(r"\s*(?:(\d+)|(ln)|([A-Za-z_]\w*)|(.))")

    def __init__(self, text: str, var: str):
        self.var = var
        self.toks: list[tuple[str, str, int]] = []
        text = "\n".join(line for line in text.strip().splitlines() if line.strip())
        text = text.replace("\n", " + ")
        for m in self._token.finditer(text):
            col = m.start() + 1
            if m.group(1):
                self.toks.append(("int", m.group(1), col))
            elif m.group(2):
                self.toks.append(("ln", "ln", col))
            elif m.group(3):
                self.toks.append(("name", m.group(3), col))
            elif m.group(4) and not m.group(4).isspace():
                self.toks.append(("op", m.group(4), col))
        self.i = 0

    def peek(self, value=None):
        if self.i >= len(self.toks):
            return None
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            return None
        return tok

    def take(self, value=None):
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            col = tok[2] if tok else None
            raise ParseError(f"expected {value or 'token'}", col)
        self.i += 1
        return tok

    def parse(self) -> LogPowerSum:
        terms = []
        if self.peek() is None or self.peek("0"):
            if self.peek("0"):
                self.take()
            if self.peek() is None:
                return LogPowerSum()
        sign = 1
        while True:
            while self.peek("+") or self.peek("-"):
                if self.take()[1] == "-":
                    sign = -sign
            terms.append(self.term(sign))
            sign = 1
            if self.peek() is None:
                break
            if not (self.peek("+") or self.peek("-")):
                raise ParseError("expected + or -", self.peek()[2])
        return LogPowerSum(terms)

    def rational(self) -> Fraction:
        neg = False
        while self.peek("-"):
            self.take()
            neg = not neg
        num = int(self.take()[1])
        den = 1
        if self.peek("/"):
            self.take()
            den = int(self.take()[1])
        q = Fraction(num, den)
        return -q if neg else q

    def term(self, sign):
        coeff, s, k = Fraction(sign), Fraction(0), 0
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError("unexpected end of input")
            if tok[0] == "int":
                coeff *= self.rational()
            elif tok[0] == "name" and tok[1] == self.var:
                self.take()
                e = Fraction(1)
                if self.peek("^"):
                    self.take()
                    if self.peek("("):
                        self.take()
                        e = self.rational()
                        self.take(")")
                    else:
                        e = self.rational()
                s += e
            elif tok[0] == "ln":
                self.take()
                self.take("(")
                name = self.take()
                if name[1] != self.var:
                    raise ParseError(f"expected ln({self.var})", name[2])
                self.take(")")
                e = 1
                if self.peek("^"):
                    self.take()
                    e = int(self.take()[1])
                k += e
            else:
                raise ParseError(f"unexpected {tok[1]!r}", tok[2])
            if self.peek("*"):
                self.take()
                continue
            return (s, k, coeff)


# --------------------------------------------------------------------------
# sublevel functions

@dataclass(frozen=True)
class SublevelFunction:
    """Volume-type function ``V(t)`` of a sublevel set.

    ``V(t) = germ(t / scale)`` exactly for ``0 < t < threshold`` and
    ``V(t) = total_mass`` once ``t`` passes the saturation point
    ``scale``.  ``scale`` records a constant phase coefficient ``c``
    (``{c*m(x) < t} = {m(x) < t/c}``); it stays symbolic so the germ keeps
    rational coefficients.  ``exact_everywhere`` means the germ holds on the
    whole of ``(0, 1)`` and the total mass from ``t = 1`` on.
    """

    germ: LogPowerSum
    threshold: Fraction = Fraction(1)
    total_mass: Fraction = Fraction(0)
    exact_everywhere: bool = True
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("threshold", "total_mass", "scale"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.threshold <= 0 or self.scale <= 0:
            raise InputError("threshold and scale must be positive")

    @property
    def parts(self) -> tuple[SublevelFunction, ...]:
        return (self,)

    def with_scale(self, c) -> SublevelFunction:
        """``t -> V(t/c)``."""
        c = as_fraction(c)
        if c <= 0:
            raise InputError("scale must be positive")
        scale = self.scale * c
        return SublevelFunction(self.germ, self.threshold * c, self.total_mass,
                                self.exact_everywhere and scale == 1, scale)

    def __add__(self, other):
        if isinstance(other, SublevelSum):
            return other + self
        if other.scale != self.scale:
            return SublevelSum((self, other))
        return SublevelFunction(self.germ + other.germ, min(self.threshold, other.threshold),
                                self.total_mass + other.total_mass,
                                self.exact_everywhere and other.exact_everywhere, self.scale)

    def scale_values(self, c) -> SublevelFunction:
        c = as_fraction(c)
        return SublevelFunction(self.germ.scale(c), self.threshold, self.total_mass * c,
                                self.exact_everywhere, self.scale)

    def to_json(self) -> dict:
        return {
            "germ": self.germ.to_json(),
            "germ_text": self.germ.pretty(self.variable),
            "variable": self.variable,
            "scale": fmt_fraction(self.scale),
            "threshold": fmt_fraction(self.threshold),
            "total_mass": fmt_fraction(self.total_mass),
            "exact_everywhere": self.exact_everywhere,
        }

    @property
    def variable(self) -> str:
        return "t" if self.scale == 1 else "u"

    def describe(self) -> str:
        body = self.germ.pretty(self.variable)
        if self.scale != 1:
            body += f"  where u = t/{fmt_fraction(self.scale)}"
        return (f"{body}  (valid on (0,{fmt_fraction(self.threshold)}); "
                f"total mass {fmt_fraction(self.total_mass)})")


@dataclass(frozen=True)
class SublevelSum:
    """Sum of sublevel functions whose germs live at different scales."""

    components: tuple[SublevelFunction, ...] = field(default=())

    def __post_init__(self):
        merged: dict[Fraction, SublevelFunction] = {}
        for part in self.components:
            for p in part.parts:
                merged[p.scale] = merged[p.scale] + p if p.scale in merged else p
        object.__setattr__(self, "components", tuple(merged[k] for k in sorted(merged)))

    @property
    def parts(self) -> tuple[SublevelFunction, ...]:
        return self.components

    @property
    def threshold(self) -> Fraction:
        return min(p.threshold for p in self.components)

    @property
    def total_mass(self) -> Fraction:
        return sum((p.total_mass for p in self.components), Fraction(0))

    @property
    def exact_everywhere(self) -> bool:
        return False

    def __add__(self, other):
        return SublevelSum(self.components + tuple(other.parts))

    def to_json(self) -> dict:
        return {"parts": [p.to_json() for p in self.components],
                "threshold": fmt_fraction(self.threshold),
                "total_mass": fmt_fraction(self.total_mass),
                "exact_everywhere": False}

    def describe(self) -> str:
        return "\n".join(p.describe() for p in self.components)


def collapse(parts: Sequence[SublevelFunction]) -> SublevelFunction | SublevelSum:
    if not parts:
        raise InputError("no parts to sum")
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    if isinstance(out, SublevelSum) and len(out.components) == 1:
        return out.components[0]
    return out


def logpowersum_arith(a: LogPowerSum, b, op: str) -> LogPowerSum:
    """``add`` two sums, ``scale`` by a constant or ``multiply_term`` by a
    single term ``(s, k)`` or ``(s, k, c)``."""
    if op == "add":
        return a + b
    if op == "scale":
        return a.scale(b)
    if op == "multiply_term":
        return a.multiply_term(*b)
    raise ValueError(f"unknown op {op!r}")


def derivative(germ: LogPowerSum, order: int = 1) -> LogPowerSum:
    """Termwise derivative ``d/dt[c t^s ln^k t] = c s t^{s-1} ln^k t + c k t^{s-1} ln^{k-1} t``."""
    if order < 0:
        raise InputError("derivative order must be nonnegative")
    out = germ
    for _ in range(order):
        terms = []
        for s, k, c in out:
            terms.append((s - 1, k, c * s))
            if k:
                terms.append((s - 1, k - 1, c * k))
        out = LogPowerSum(terms)
    return out


def antiderivative(germ: LogPowerSum) -> LogPowerSum:
    """Primitive of a germ whose exponents all differ from -1, without
    constant of integration."""
    work = dict(germ.as_dict())
    out: dict[_Key, object] = {}
    # peel the top log power first: int t^s ln^k = t^{s+1} ln^k/(s+1) - k/(s+1) int t^s ln^{k-1}
    while work:
        (s, k) = max(work, key=lambda key: key[1])
        c = work.pop((s, k))
        if s == -1:
            raise InputError("t^-1 has a logarithmic primitive outside this routine")
        out[(s + 1, k)] = out.get((s + 1, k), 0) + c / (s + 1)
        if k:
            key = (s, k - 1)
            work[key] = work.get(key, 0) - c * k / (s + 1)
            if work[key] == 0:
                del work[key]
    return LogPowerSum(out)


def termwise_derivative(g: SublevelFunction, order: int = 1) -> LogPowerSum:
    """Derivative of ``V(t) = germ(t/scale)`` in ``t``, returned as a sum in
    the germ's own variable ``u = t/scale`` (``scale**-order`` folded into the
    coefficients)."""
    d = derivative(g.germ, order)
    return d.scale(Fraction(1) / g.scale ** order) if g.scale != 1 else d


def integrate_scaled(g: SublevelFunction, a: int, b: int) -> SublevelFunction:
    """``t -> int_0^1 y^a g(t / y^b) dy`` for ``g`` exact on ``(0, 1)`` and
    equal to its total mass from 1 on.

    For ``y < t^(1/b)`` the argument exceeds 1 and contributes
    ``M t^{(a+1)/b} / (a+1)``; on the rest each germ term
    ``c u^s ln^k u`` turns into ``c t^s y^(a-bs) (ln t - b ln y)^k`` which
    integrates in closed form.  A log power is gained only when
    ``a - b s == -1``.
    """
    if not g.exact_everywhere:
        raise NotExactEverywhereError("integrate_scaled needs a function exact on (0,1)")
    if a < 0 or b <= 0:
        raise InputError("need a >= 0 and b > 0")
    crit = Fraction(a + 1, b)
    for s, _, _ in g.germ:
        if s <= -crit:
            raise DivergentRecursionError(f"germ exponent {s} is not integrable against y^{a}")
    out: list[tuple[Fraction, int, Fraction]] = [(crit, 0, g.total_mass / (a + 1))]
    for s, k, c in g.germ:
        p = a - b * s
        q = p + 1
        for j in range(k + 1):
            base = c * comb(k, j) * Fraction(-b) ** j
            # base * t^s ln^{k-j}(t) * int_{t^{1/b}}^1 y^p ln^j(y) dy
            if q == 0:
                out.append((s, k + 1, -base / ((j + 1) * Fraction(b) ** (j + 1))))
                continue
            out.append((s, k - j, base * (-1) ** j * factorial(j) / q ** (j + 1)))
            for r in range(j + 1):
                coef = base * (-1) ** r * Fraction(factorial(j), factorial(j - r))
                out.append((crit, k - r, -coef / (q ** (r + 1) * Fraction(b) ** (j - r))))
    return SublevelFunction(LogPowerSum(out), Fraction(1), g.total_mass / (a + 1), True)


# 0-dimensional sublevel function: the unit step at t = 1.
UNIT_STEP = SublevelFunction(LogPowerSum(), Fraction(1), Fraction(1), True)
