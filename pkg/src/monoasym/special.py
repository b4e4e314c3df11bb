"""Gamma and polygamma functions on the positive real axis."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

EULER_GAMMA = 0.57721566490153286061

# shift the argument above this before using the asymptotic series
_SHIFT = 20.0
_MAX_TERMS = 30


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number ``B_n`` with ``B_1 = -1/2``."""
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0] if n != 1 else Fraction(-1, 2)


def lngamma(x) -> float:
    return math.lgamma(float(x))


def gamma(x) -> float:
    return math.gamma(float(x))


def polygamma(k: int, x) -> float:
    """``psi^(k)(x)`` for ``x > 0`` and ``0 <= k <= 8``.

    Upward recurrence ``psi_k(x) = psi_k(x+1) - (-1)^k k!/x^(k+1)`` moves the
    argument above 20, then the asymptotic series in ``1/x`` is summed until
    its terms stop mattering.
    """
    if k < 0 or k > 8:
        raise ValueError("polygamma order must be in 0..8")
    x = float(x)
    if not x > 0:
        raise ValueError("polygamma needs x > 0")
    kfact = math.factorial(k)
    sign = -1.0 if k % 2 else 1.0
    shift = []
    while x < _SHIFT:
        shift.append(-sign * kfact / x ** (k + 1))
        x += 1.0
    if k == 0:
        terms = [math.log(x), -0.5 / x]
        for j in range(1, _MAX_TERMS):
            t = -float(bernoulli(2 * j)) / (2 * j * x ** (2 * j))
            terms.append(t)
            if abs(t) < 1e-18 * abs(terms[0]):
                break
    else:
        outer = (-1.0) ** (k + 1)
        terms = [outer * math.factorial(k - 1) / x ** k, outer * kfact / (2 * x ** (k + 1))]
        for j in range(1, _MAX_TERMS):
            t = (outer * float(bernoulli(2 * j)) * math.factorial(2 * j + k - 1)
                 / (math.factorial(2 * j) * x ** (2 * j + k)))
            terms.append(t)
            if abs(t) < 1e-18 * abs(terms[0]):
                break
    return math.fsum(terms + shift)


def digamma(x) -> float:
    return polygamma(0, x)
