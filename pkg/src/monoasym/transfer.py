"""From sublevel germs to oscillatory, Laplace and Mellin asymptotics.

Every germ derivative term ``B u^a ln(u)^i`` is transferred through the
one-dimensional transform

    int_0^inf e^{i lam t} t^a ln(t)^i dt  ~  d^i/da^i [Gamma(a+1) e^{i pi (a+1)/2} lam^{-a-1}]

(for Laplace drop the phase factor and read ``tau`` for ``lam``), or through
``int_0^1 t^{a+z} ln(t)^i dt = (-1)^i i! / (z+a+1)^{i+1}`` for the Mellin
continuation.  The ``a``-derivatives are complete Bell polynomials in the
derivatives of ``g(a) = ln Gamma(a+1) + i theta (a+1) - (a+1) ln(c lam)``;
powers of ``ln lam`` are collected into the ``(s, k)`` grid of the series.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .errors import InputError, NotExactEverywhereError, UnsupportedSignedPhaseError
from .exact import LogPowerSum, MultiIndex, as_fraction, derivative, fmt_fraction, multi_index
from .special import gamma, polygamma


@dataclass(frozen=True)
class AsymptoticSeries:
    """``sum coeff * var^(-s) * ln(var)^k`` with float/complex coefficients."""

    variable: str
    terms: LogPowerSum

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, s, k: int = 0):
        return self.terms.as_dict().get((as_fraction(s), k), 0)

    def truncate(self, order_cap) -> AsymptoticSeries:
        cap = as_fraction(order_cap)
        return AsymptoticSeries(self.variable,
                                LogPowerSum([(s, k, c) for s, k, c in self.terms if s <= cap]))

    def __call__(self, value: float) -> complex:
        lv = math.log(value)
        return sum(c * value ** (-float(s)) * lv ** k for s, k, c in self.terms)

    def to_json(self) -> dict:
        return {"variable": self.variable, "terms": self.terms.to_json()}

    def describe(self) -> str:
        v = self.variable
        lines = []
        for s, k, c in self.terms:
            if isinstance(c, complex):
                body = f"({c.real:.12g}{c.imag:+.12g}j) * {v}^(-{fmt_fraction(s)})"
            else:
                body = f"{float(c):.12g} * {v}^(-{fmt_fraction(s)})"
            if k:
                body += f" * ln({v})" + (f"^{k}" if k > 1 else "")
            lines.append(body)
        return "\n".join(lines) or "0"


def bell_polynomial(xs: Sequence) -> list:
    """Complete Bell polynomials ``Y_0..Y_n`` of ``xs = (x_1..x_n)``;
    entries may be numbers or polynomials given as coefficient lists."""
    def mul(a, b):
        if not isinstance(a, list):
            a = [a]
        if not isinstance(b, list):
            b = [b]
        out = [0] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            for j, w in enumerate(b):
                out[i + j] += u * w
        return out

    def add(a, b):
        if not isinstance(a, list):
            a = [a]
        if not isinstance(b, list):
            b = [b]
        out = [0] * max(len(a), len(b))
        for i, u in enumerate(a):
            out[i] += u
        for i, u in enumerate(b):
            out[i] += u
        return out

    ys = [[1]]
    for n in range(len(xs)):
        acc = [0]
        for k in range(n + 1):
            acc = add(acc, mul([comb(n, k) * c for c in ys[n - k]], xs[k]))
        ys.append(acc)
    return ys


def _log_derivative_poly(alpha: float, order: int, theta: float, log_scale: float):
    """Derivatives ``g', ..., g^(order)`` of
    ``g(a) = ln Gamma(a+1) + i theta (a+1) - (a+1)(log_scale + L)``
    at ``a = alpha``; ``g'`` is returned as a polynomial in ``L``."""
    xs: list = [[polygamma(0, alpha + 1) + 1j * theta - log_scale, -1]]
    for j in range(2, order + 1):
        xs.append(polygamma(j - 1, alpha + 1))
    return xs


def gamma_power_derivative(alpha, x: float, order: int, theta: float = 0.0) -> complex:
    """``d^order/da^order [Gamma(a+1) e^{i theta (a+1)} x^{-a-1}]`` at ``a = alpha``."""
    alpha = float(alpha)
    L = math.log(x)
    poly = bell_polynomial(_log_derivative_poly(alpha, order, theta, 0.0))[order]
    if not isinstance(poly, list):
        poly = [poly]
    val = sum(c * L ** j for j, c in enumerate(poly))
    return gamma(alpha + 1) * cmath.exp(1j * theta * (alpha + 1)) * x ** (-alpha - 1) * val


def _transfer(V, order_cap, theta: float, variable: str) -> AsymptoticSeries:
    cap = as_fraction(order_cap)
    if cap <= 0:
        raise InputError("order cap must be positive")
    out = []
    for part in V.parts:
        dgerm = derivative(part.germ, 1)
        log_scale = math.log(part.scale)
        for a, i, B in dgerm:
            s = a + 1
            if s > cap:
                continue
            if s <= 0:
                raise InputError(f"germ derivative exponent {a} is not integrable at 0")
            af = float(a)
            pref = (float(B) * gamma(af + 1) * cmath.exp(1j * theta * (af + 1))
                    * float(part.scale) ** (-(af + 1)))
            poly = bell_polynomial(_log_derivative_poly(af, i, theta, log_scale))[i]
            if not isinstance(poly, list):
                poly = [poly]
            for k, c in enumerate(poly):
                out.append((s, k, pref * c))
    terms = LogPowerSum([(s, k, c) for s, k, c in out if c != 0])
    return AsymptoticSeries(variable, terms)


def oscillatory_expansion(V, order_cap, *, conjugate: bool = False,
                          signed: bool = False) -> AsymptoticSeries:
    """Series in ``lam^(-s) ln(lam)^k`` for ``int e^{i lam f} phi`` with a
    nonnegative phase ``f``.  ``conjugate=True`` gives the ``e^{-i lam f}``
    branch.  Sign-changing phases are rejected."""
    if signed:
        raise UnsupportedSignedPhaseError("phase must be nonnegative on the cube")
    theta = -math.pi / 2 if conjugate else math.pi / 2
    return _transfer(V, order_cap, theta, "lambda")


def laplace_expansion(V, order_cap) -> AsymptoticSeries:
    series = _transfer(V, order_cap, 0.0, "tau")
    real = LogPowerSum([(s, k, complex(c).real) for s, k, c in series.terms])
    return AsymptoticSeries("tau", real)


@dataclass(frozen=True)
class PoleDatum:
    """Pole at ``location`` with principal part
    ``sum_j principal_part[j-1] / (z - location)^j``."""

    location: Fraction
    order: int
    principal_part: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"location_num": self.location.numerator,
                "location_den": self.location.denominator,
                "order": self.order,
                "principal_part": [fmt_fraction(c) for c in self.principal_part]}


def _poles_from_dict(acc: dict[Fraction, dict[int, Fraction]]) -> list[PoleDatum]:
    poles = []
    for loc, parts in acc.items():
        parts = {j: c for j, c in parts.items() if c != 0}
        if not parts:
            continue
        order = max(parts)
        poles.append(PoleDatum(loc, order, tuple(parts.get(j, Fraction(0))
                                                 for j in range(1, order + 1))))
    return sorted(poles, key=lambda p: p.location, reverse=True)


def mellin_meromorphic(V) -> list[PoleDatum]:
    """Poles of ``F(z) = int f^z phi = int_0^1 t^z dV(t)``.

    Exact because ``V`` is a finite germ on ``(0,1)`` and constant after 1:
    ``F(z) = sum B (-1)^i i! / (z + a + 1)^(i+1)`` over the derivative terms
    ``B t^a ln^i t``.
    """
    if not V.exact_everywhere:
        raise NotExactEverywhereError("continuation needs a germ exact on (0,1); "
                                      "normalise the phase constant to 1 first")
    acc: dict[Fraction, dict[int, Fraction]] = {}
    for a, i, B in derivative(V.germ, 1):
        loc = -(a + 1)
        slot = acc.setdefault(loc, {})
        slot[i + 1] = slot.get(i + 1, Fraction(0)) + B * (-1) ** i * factorial(i)
    return _poles_from_dict(acc)


@dataclass(frozen=True)
class ProductMellin:
    """``constant * prod_i 1 / (b_i + m_i z)`` kept in factored form."""

    constant: Fraction
    factors: tuple[tuple[int, int], ...]   # (b_i, m_i) with m_i > 0

    def __call__(self, z) -> Fraction:
        z = as_fraction(z)
        val = self.constant
        for b, m in self.factors:
            val /= b + m * z
        return val

    def principal_parts(self) -> list[PoleDatum]:
        """Partial-fraction principal parts, by exact Laurent expansion of the
        remaining factors around each root."""
        roots: dict[Fraction, int] = {}
        lead = self.constant
        for b, m in self.factors:
            lead /= m
            r = Fraction(-b, m)
            roots[r] = roots.get(r, 0) + 1
        acc = {}
        for r, p in roots.items():
            # h(z) = lead * prod_{other roots} (z - r_o)^{-mult}, Taylor in w = z - r
            series = [lead] + [Fraction(0)] * (p - 1)
            for ro, q in roots.items():
                if ro == r:
                    continue
                d = r - ro
                inv = [Fraction((-1) ** k) / d ** (k + 1) for k in range(p)]
                for _ in range(q):
                    series = [sum(series[i] * inv[k - i] for i in range(k + 1)) for k in range(p)]
            # coefficient of w^{-j} is series[p - j]
            acc[r] = {j: series[p - j] for j in range(1, p + 1)}
        return _poles_from_dict(acc)

    def __str__(self):
        fs = "*".join(f"({b}+{m}*z)" for b, m in self.factors)
        return f"{fmt_fraction(self.constant)}/({fs})" if fs else fmt_fraction(self.constant)


def mellin_product_oracle(beta: MultiIndex, m: MultiIndex) -> ProductMellin:
    """``int_{(0,1)^n} y^beta (y^m)^z dy = prod_i 1/(beta_i + 1 + m_i z)``."""
    beta = multi_index(beta)
    m = multi_index(m, len(beta))
    if not any(m):
        raise InputError("monomial must be nonconstant")
    const = Fraction(1)
    factors = []
    for b, e in zip(beta, m):
        if e:
            factors.append((b + 1, e))
        else:
            const /= b + 1
    return ProductMellin(const, tuple(factors))
