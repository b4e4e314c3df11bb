import math

import pytest
from fractions import Fraction as F
from scipy import special as sp

from monoasym.special import EULER_GAMMA, bernoulli, digamma, polygamma


def test_reference_values():
    assert abs(digamma(1) + 0.5772156649015329) <= 1e-12
    assert abs(polygamma(1, 1) - math.pi ** 2 / 6) <= 1e-12
    assert abs(polygamma(0, 2) - polygamma(0, 1) - 1) <= 1e-12
    assert EULER_GAMMA == pytest.approx(0.5772156649015329, abs=1e-16)


def test_bernoulli_numbers():
    assert [bernoulli(k) for k in range(7)] == [1, F(-1, 2), F(1, 6), 0, F(-1, 30), 0, F(1, 42)]


@pytest.mark.parametrize("k", range(0, 9))
def test_recurrence(k):
    for x in (0.5, 1.0, 7 / 3, 10.0, 33.3):
        lhs = polygamma(k, x + 1) - polygamma(k, x)
        rhs = (-1) ** k * math.factorial(k) / x ** (k + 1)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


@pytest.mark.parametrize("k", range(0, 9))
def test_against_scipy(k):
    for x in (0.1, 0.5, 1.0, 2.5, 7 / 3, 19.9, 20.0, 50.0):
        ref = float(sp.polygamma(k, x))
        assert abs(polygamma(k, x) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_domain():
    with pytest.raises(ValueError):
        polygamma(9, 1.0)
    with pytest.raises(ValueError):
        polygamma(0, 0.0)
