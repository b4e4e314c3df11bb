import cmath
import math
import random
from fractions import Fraction as F

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from monoasym.errors import InputError, NotExactEverywhereError, UnsupportedSignedPhaseError
from monoasym.exact import LogPowerSum, PolynomialAmplitude as P, SublevelFunction
from monoasym.special import EULER_GAMMA, gamma
from monoasym.sublevel import MonomialPhase, SublevelProblem, expand_multi, monomial_cell_volume
from monoasym.transfer import (
    bell_polynomial,
    gamma_power_derivative,
    laplace_expansion,
    mellin_meromorphic,
    mellin_product_oracle,
    oscillatory_expansion,
)


def V_of(d, total=1):
    return SublevelFunction(LogPowerSum(d), 1, total, True)


XY = V_of({(1, 0): 1, (1, 1): -1})
SQRT = V_of({(F(1, 2), 0): 1})
LIN = V_of({(1, 0): 1})


def test_fresnel_leading_coefficient():
    S = oscillatory_expansion(SQRT, F(1, 2))
    expect = 0.5 * math.sqrt(math.pi) * cmath.exp(1j * math.pi / 4)
    assert abs(S.coefficient(F(1, 2)) - expect) < 1e-14


def test_linear_phase_gives_i_over_lambda():
    S = oscillatory_expansion(LIN, 1)
    assert S.coefficient(1) == pytest.approx(1j)


def test_empty_germ_gives_empty_series():
    assert len(oscillatory_expansion(V_of({}, 0), 3)) == 0
    assert mellin_meromorphic(V_of({(0, 0): 1})) == []


def test_signed_phase_rejected():
    with pytest.raises(UnsupportedSignedPhaseError):
        oscillatory_expansion(LIN, 1, signed=True)
    with pytest.raises(InputError):
        oscillatory_expansion(LIN, 0)


def test_laplace_examples():
    assert laplace_expansion(SQRT, 1).coefficient(F(1, 2)) == pytest.approx(0.886226925452758, rel=1e-14)
    L = laplace_expansion(XY, 2)
    assert L.coefficient(1, 0) == pytest.approx(EULER_GAMMA, rel=1e-14)
    assert L.coefficient(1, 1) == pytest.approx(1.0, rel=1e-14)
    assert laplace_expansion(LIN, 2).coefficient(1) == pytest.approx(1.0)


def test_order_cap_is_inclusive():
    V = expand_multi(SublevelProblem((MonomialPhase(1, (2,)),), P({(0,): 1, (2,): -1}, 1)))
    S = oscillatory_expansion(V, F(3, 2))
    assert [s for s, _, _ in S] == [F(1, 2), F(3, 2)]
    assert len(S.truncate(F(1, 2))) == 1


def test_mellin_examples():
    (p,) = mellin_meromorphic(SQRT)
    assert (p.location, p.order, p.principal_part) == (F(-1, 2), 1, (F(1, 2),))
    (p,) = mellin_meromorphic(XY)
    assert (p.location, p.order, p.principal_part) == (-1, 2, (0, 1))
    with pytest.raises(NotExactEverywhereError):
        mellin_meromorphic(XY.with_scale(2))


def test_product_oracle_examples():
    assert str(mellin_product_oracle((0,), (2,))) == "1/((1+2*z))"
    o = mellin_product_oracle((0, 0), (1, 1))
    assert o(F(1)) == F(1, 4)
    o = mellin_product_oracle((1, 0), (2, 3))
    assert o(F(1)) == F(1, 4 * 4)
    assert [(p.location, p.order) for p in o.principal_parts()] == [(F(-1, 3), 1), (-1, 1)]


def test_mellin_cross_check_random():
    rng = random.Random(2024)
    for _ in range(100):
        n = rng.randint(1, 4)
        m = tuple(rng.randint(0, 5) for _ in range(n))
        if not any(m):
            m = (1,) + m[1:]
        beta = tuple(rng.randint(0, 5) for _ in range(n))
        got = mellin_meromorphic(monomial_cell_volume(beta, m))
        want = mellin_product_oracle(beta, m).principal_parts()
        assert got == want
        assert all(p.order <= n for p in got)


def test_conjugate_symmetry():
    for V in (XY, SQRT, monomial_cell_volume((1, 0, 2), (1, 2, 1))):
        a = oscillatory_expansion(V, 4)
        b = oscillatory_expansion(V, 4, conjugate=True)
        assert [(s, k) for s, k, _ in a] == [(s, k) for s, k, _ in b]
        for (_, _, ca), (_, _, cb) in zip(a, b):
            assert cb == pytest.approx(ca.conjugate(), rel=1e-13, abs=1e-15)


def test_laplace_oscillatory_phase_factor():
    V = monomial_cell_volume((1, 0), (2, 3))     # log-free germ
    assert V.germ.max_logpower() == 0
    osc, lap = oscillatory_expansion(V, 4), laplace_expansion(V, 4)
    for (s, k, c), (_, _, d) in zip(osc, lap):
        assert c == pytest.approx(d * cmath.exp(1j * math.pi * float(s) / 2), rel=1e-13)


def test_log_power_in_lambda_bounded_by_input():
    for alpha, m in [((0, 0), (1, 1)), ((0, 0, 0), (1, 1, 1)), ((1, 0, 2), (2, 1, 3))]:
        V = monomial_cell_volume(alpha, m)
        assert oscillatory_expansion(V, 5).terms.max_logpower() <= V.germ.max_logpower()


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.5])
@pytest.mark.parametrize("x", [10.0, 100.0])
@pytest.mark.parametrize("theta", [0.0, math.pi / 2])
def test_bell_derivatives_match_finite_differences(alpha, x, theta):
    # step 1e-5 central differences; evaluated at 30 digits so the second
    # difference is not swamped by double rounding (eps/h^2 ~ 1e-6)
    mp.mp.dps = 30
    f = lambda a: mp.gamma(a + 1) * mp.expj(theta * (a + 1)) * mp.mpf(x) ** (-a - 1)
    a0, h = mp.mpf(alpha), mp.mpf("1e-5")
    d1 = complex((f(a0 + h) - f(a0 - h)) / (2 * h))
    d2 = complex((f(a0 + h) - 2 * f(a0) + f(a0 - h)) / h ** 2)
    assert abs(gamma_power_derivative(alpha, x, 1, theta) - d1) <= 1e-6 * abs(d1)
    assert abs(gamma_power_derivative(alpha, x, 2, theta) - d2) <= 1e-6 * abs(d2)


def test_bell_polynomial_small_cases():
    ys = bell_polynomial([2, 3, 5])
    # Y1 = x1, Y2 = x1^2 + x2, Y3 = x1^3 + 3 x1 x2 + x3
    assert [y[0] if isinstance(y, list) else y for y in ys] == [1, 2, 7, 8 + 18 + 5]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(1, 3), st.integers(0, 3), st.integers(1, 3))
def test_series_linear_in_germ(a1, m1, a2, m2):
    V1 = monomial_cell_volume((a1,), (m1,))
    V2 = monomial_cell_volume((a2,), (m2,))
    both = SublevelFunction(V1.germ + V2.germ, 1, V1.total_mass + V2.total_mass, True)
    s = oscillatory_expansion(both, 5)
    s1, s2 = oscillatory_expansion(V1, 5), oscillatory_expansion(V2, 5)
    for e, k, c in s:
        assert c == pytest.approx(s1.coefficient(e, k) + s2.coefficient(e, k), rel=1e-12)
