"""Parser for the small expression language used on the command line.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := integer ['/' integer] | var ['^' ['-'] integer] | '(' expr ')' ['^' integer]
    var    := 'x' digits              (x1, x2, ...)

Whitespace is ignored.  Columns in error messages are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, NegativeExponentForbiddenError, ParseError
from .exact import LaurentMonomial, PolynomialAmplitude
from .sublevel import MonomialPhase

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>x\d+)|(?P<op>[-+*/^()])|(?P<bad>\S))")

# sparse monomial: sorted ((var_index, power), ...) with 0-based indices
Sparse = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ExpressionAST:
    """Canonical sum of terms: like terms merged, zero terms dropped,
    monomials sorted."""

    terms: tuple[tuple[Sparse, Fraction], ...]

    @property
    def dimension(self) -> int:
        """Largest variable index used (0 for a constant)."""
        return max((i + 1 for mono, _ in self.terms for i, _ in mono), default=0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def dense(self, n: int) -> dict[tuple[int, ...], Fraction]:
        if self.dimension > n:
            raise InputError(f"expression uses x{self.dimension} but dimension is {n}")
        out = {}
        for mono, c in self.terms:
            e = [0] * n
            for i, k in mono:
                e[i] = k
            out[tuple(e)] = c
        return out

    def to_amplitude(self, n: int) -> PolynomialAmplitude:
        if any(k < 0 for mono, _ in self.terms for _, k in mono):
            raise InputError("amplitude must be a polynomial")
        return PolynomialAmplitude(self.dense(n), n)

    def to_monomial(self, n: int) -> LaurentMonomial:
        if not self.is_monomial():
            raise InputError(f"expected a single monomial, got {self}")
        (e, c), = self.dense(n).items()
        if c <= 0:
            raise InputError("monomial coefficient must be positive")
        return LaurentMonomial(c, e)

    def to_phase(self, n: int) -> MonomialPhase:
        m = self.to_monomial(n)
        if any(k < 0 for k in m.exponents):
            raise InputError("phase exponents must be nonnegative")
        return MonomialPhase(m.coefficient, m.exponents)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for mono, c in self.terms:
            factors = [f"x{i + 1}" + (f"^{k}" if k != 1 else "") for i, k in mono]
            mag = abs(c)
            if mag != 1 or not factors:
                factors.insert(0, str(mag))
            body = "*".join(factors)
            if not out:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)


class _Parser:
    def __init__(self, text: str, allow_negative: bool):
        self.text = text
        self.allow_negative = allow_negative
        self.tokens = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None:      # only trailing whitespace is left
                break
            kind = mt.lastgroup
            col = mt.start(kind) + 1
            if kind == "bad":
                raise ParseError(f"unexpected character {mt.group(kind)!r}", col)
            self.tokens.append((kind, mt.group(kind), col))
            pos = mt.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text) + 1)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_int(self, what: str) -> tuple[int, int]:
        kind, val, col = self.take()
        if kind != "num":
            raise ParseError(f"expected {what}", col)
        return int(val), col

    def parse(self) -> ExpressionAST:
        if not self.tokens:
            raise ParseError("empty expression", 1)
        acc = self.expr()
        kind, val, col = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected {val!r}", col)
        return ExpressionAST(tuple(sorted(acc.items())))

    def expr(self) -> dict[Sparse, Fraction]:
        acc: dict[Sparse, Fraction] = {}
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        while True:
            for mono, c in self.term().items():
                acc[mono] = acc.get(mono, Fraction(0)) + sign * c
            kind, val, col = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
                continue
            break
        return {m: c for m, c in acc.items() if c != 0}

    def term(self) -> dict[Sparse, Fraction]:
        poly: dict[Sparse, Fraction] = {(): Fraction(1)}
        while True:
            poly = _poly_mul(poly, self.factor())
            if self.peek()[:2] == ("op", "*"):
                self.take()
                continue
            return poly

    def factor(self) -> dict[Sparse, Fraction]:
        kind, val, col = self.take()
        if kind == "num":
            num = Fraction(int(val))
            if self.peek()[:2] == ("op", "/"):
                self.take()
                den, dcol = self.expect_int("denominator")
                if den == 0:
                    raise ParseError("zero denominator", dcol)
                num /= den
            return {(): num}
        if kind == "op" and val == "(":
            inner = self.expr()
            k2, v2, c2 = self.take()
            if (k2, v2) != ("op", ")"):
                raise ParseError("expected ')'", c2)
            if self.peek()[:2] == ("op", "^"):
                self.take()
                if self.peek()[:2] == ("op", "-"):
                    raise ParseError("negative power of a group", self.peek()[2])
                k, _ = self.expect_int("integer exponent")
                out = {(): Fraction(1)}
                for _ in range(k):
                    out = _poly_mul(out, inner)
                return out
            return inner
        if kind == "var":
            idx = int(val[1:])
            if idx < 1:
                raise ParseError("variables are numbered from x1", col)
            k = 1
            if self.peek()[:2] == ("op", "^"):
                _, _, ccol = self.take()
                neg = False
                if self.peek()[:2] == ("op", "-"):
                    self.take()
                    neg = True
                k, _ = self.expect_int("integer exponent")
                if neg:
                    if not self.allow_negative:
                        raise NegativeExponentForbiddenError(
                            "negative exponents are only allowed in ratios", ccol)
                    k = -k
            return {((idx - 1, k),) if k else (): Fraction(1)}
        raise ParseError("expected a number, a variable or '('", col)


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict[Sparse, Fraction] = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            powers = dict(ma)
            for i, k in mb:
                powers[i] = powers.get(i, 0) + k
            mono = tuple(sorted((i, k) for i, k in powers.items() if k != 0))
            out[mono] = out.get(mono, Fraction(0)) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def parse_expression(s: str, allow_negative_exponents: bool = False) -> ExpressionAST:
    return _Parser(s, allow_negative_exponents).parse()


def parse_ratio_list(s: str, n: int | None = None) -> tuple[list[LaurentMonomial], int]:
    """Comma separated monomial ratios; returns the monomials and the dimension."""
    asts = []
    offset = 0
    for piece in s.split(","):
        try:
            asts.append(parse_expression(piece, allow_negative_exponents=True))
        except ParseError as exc:
            if exc.column is None:
                raise
            raise type(exc)(str(exc).rsplit(" (column", 1)[0], exc.column + offset) from None
        offset += len(piece) + 1
    dim = max(a.dimension for a in asts) if n is None else n
    return [a.to_monomial(dim) for a in asts], dim
