import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from monoasym.errors import DivergentRecursionError, InputError, SingularMatrixError
from monoasym.exact import (
    UNIT_STEP,
    LaurentMonomial,
    LogPowerSum,
    PolynomialAmplitude,
    SublevelFunction,
    adjugate,
    antiderivative,
    as_fraction,
    derivative,
    det,
    identity,
    integrate_scaled,
    logpowersum_arith,
    matmul,
    matrix_exact,
    primitive,
    termwise_derivative,
)


def lps(d):
    return LogPowerSum(d)


# --- rationals and matrices -------------------------------------------------

def test_as_fraction_rejects_floats():
    assert as_fraction("3/6") == F(1, 2)
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_primitive_normalises_gcd():
    assert primitive((4, -2, 6)) == (2, -1, 3)


def test_det_and_adjugate_examples():
    H = ((2, -1), (-1, 2))
    assert det(H) == 3
    assert adjugate(H) == ((2, 1), (1, 2))
    assert matmul(adjugate(H), H) == ((3, 0), (0, 3))
    assert det(identity(4)) == 1
    assert matrix_exact(H, "det") == 3


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(SingularMatrixError):
        matrix_exact(((1, 2), (2, 4)), "inverse_times_det")


def test_adjugate_identity_random():
    rng = random.Random(7)
    done = 0
    while done < 100:
        n = rng.randint(1, 4)
        M = tuple(tuple(rng.randint(-9, 9) for _ in range(n)) for _ in range(n))
        d = det(M)
        if d == 0:
            continue
        prod = matmul(adjugate(M), M)
        assert prod == tuple(tuple(d if i == j else 0 for j in range(n)) for i in range(n))
        done += 1


# --- LogPowerSum --------------------------------------------------------------

def test_arith_examples():
    assert logpowersum_arith(lps({(1, 0): 1}), lps({(1, 0): -1}), "add") == LogPowerSum()
    assert logpowersum_arith(lps({(1, 1): 1}), 3, "scale") == lps({(1, 1): 3})
    assert logpowersum_arith(lps({(1, 0): 1}), (F(1, 2), 1), "multiply_term") == lps({(F(3, 2), 1): 1})


def test_terms_sorted_and_zero_free():
    s = lps({(2, 0): 1, (1, 1): 2, (1, 0): 0, (F(1, 2), 0): 5})
    assert [(t[0], t[1]) for t in s] == [(F(1, 2), 0), (1, 1), (2, 0)]


def test_text_forms():
    g = lps({(1, 0): 1, (1, 1): -1})
    assert g.pretty() == "t - t*ln(t)"
    assert g.to_text() == "1 * t^(1/1) * ln(t)^0\n-1 * t^(1/1) * ln(t)^1"
    assert lps({(F(1, 2), 0): 2, (1, 0): -1}).pretty() == "2*t^(1/2) - t"
    assert lps({(2, 0): 1}).pretty() == "t^2"


exps = st.fractions(min_value=-F(1, 2), max_value=5, max_denominator=6)
coefs = st.fractions(min_value=-20, max_value=20, max_denominator=9).filter(lambda c: c != 0)
sums = st.lists(st.tuples(exps, st.integers(0, 3), coefs), max_size=6).map(LogPowerSum)


@settings(max_examples=150, deadline=None)
@given(sums)
def test_serialisation_round_trips(g):
    assert LogPowerSum.from_text(g.to_text()) == g
    assert LogPowerSum.from_text(g.pretty()) == g
    assert LogPowerSum.from_json(g.to_json()) == g


# --- integration primitive ----------------------------------------------------

def test_integrate_scaled_examples():
    g = SublevelFunction(lps({(1, 0): 1}), 1, 1, True)
    r = integrate_scaled(g, 0, 1)
    assert r.germ == lps({(1, 0): 1, (1, 1): -1}) and r.total_mass == 1 and r.exact_everywhere
    one = SublevelFunction(lps({(0, 0): 1}), 1, 1, True)
    r = integrate_scaled(one, 2, 1)
    assert r.germ == lps({(0, 0): F(1, 3)}) and r.total_mass == F(1, 3)
    half = SublevelFunction(lps({(F(1, 2), 0): 1}), 1, 1, True)
    r = integrate_scaled(half, 0, 2)
    # sqrt(t) from y < sqrt(t), then int_{sqrt t}^1 sqrt(t)/y dy = -sqrt(t) ln(t)/2
    assert r.germ == lps({(F(1, 2), 0): 1, (F(1, 2), 1): F(-1, 2)})


def test_integrate_scaled_rejects_divergent_germ():
    g = SublevelFunction(lps({(F(-1, 2), 0): 1}), 1, 1, True)
    with pytest.raises(DivergentRecursionError):
        integrate_scaled(g, 0, 2)


def test_integrate_scaled_needs_exact_everywhere():
    g = SublevelFunction(lps({(1, 0): 1}), F(1, 2), 1, False)
    with pytest.raises(InputError):
        integrate_scaled(g, 0, 1)


def _step_like(c1, c2):
    # germ c1*t + c2*t^2 saturating at c1 + c2
    return SublevelFunction(lps({(1, 0): c1, (2, 0): c2}), 1, c1 + c2, True)


@settings(max_examples=60, deadline=None)
@given(coefs, coefs, coefs, coefs, st.integers(0, 4), st.integers(1, 4))
def test_integrate_scaled_is_linear(a1, a2, b1, b2, a, b):
    g1, g2 = _step_like(a1, a2), _step_like(b1, b2)
    lhs = integrate_scaled(g1 + g2, a, b)
    rhs = integrate_scaled(g1, a, b) + integrate_scaled(g2, a, b)
    assert lhs.germ == rhs.germ and lhs.total_mass == rhs.total_mass


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=F(1, 6), max_value=3, max_denominator=6), st.integers(0, 4), st.integers(1, 4))
def test_log_power_rises_only_on_resonance(s, a, b):
    g = SublevelFunction(lps({(s, 0): 1}), 1, 1, True)
    r = integrate_scaled(g, a, b)
    resonant = a - b * s == -1
    assert r.germ.max_logpower() == (1 if resonant else 0)


def test_termwise_derivative_examples():
    g = SublevelFunction(lps({(1, 0): 1, (1, 1): -1}), 1, 1, True)
    assert termwise_derivative(g, 1) == lps({(0, 1): -1})
    assert derivative(lps({(F(1, 2), 0): 1})) == lps({(F(-1, 2), 0): F(1, 2)})
    assert derivative(lps({(0, 0): 7})) == LogPowerSum()
    assert termwise_derivative(g, 0) == g.germ


@settings(max_examples=100, deadline=None)
@given(sums)
def test_derivative_inverts_antiderivative(g):
    g = LogPowerSum([(s, k, c) for s, k, c in g if s != 0 and s > -1 + F(1, 2)])
    assert derivative(antiderivative(g)) == g


# --- amplitudes and monomials -----------------------------------------------

def test_polynomial_amplitude_integral_and_algebra():
    x = PolynomialAmplitude.variable(2, 0)
    one = PolynomialAmplitude.constant(2)
    p = (one - x * x) ** 2
    assert p.terms == {(0, 0): 1, (2, 0): -2, (4, 0): 1}
    assert p.integral() == 1 - F(2, 3) + F(1, 5)
    assert (x - x).is_zero()


def test_laurent_monomial():
    m = LaurentMonomial(2, (1, -2))
    assert (m * m.reciprocal()).is_constant()
    assert str(LaurentMonomial(1, (2, -1))) in ("x1^2*x2^-1", "x1^2/x2", "x1^2*x2^(-1)")
    with pytest.raises(InputError):
        LaurentMonomial(0, (1,))
