import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rellab.errors import (
    AlphaOutOfRange,
    DimensionTooSmall,
    ExponentOutOfRange,
    LambdaAboveRellich,
    NonPositiveCoefficient,
)
from rellab.params import (
    breaking_thresholds,
    char_roots,
    critical_exponent,
    derive_problem,
    gamma_N,
    special_lambda,
    sphere_area,
    weighted_params,
)


def test_derive_problem_n8_q3():
    p = derive_problem(8, 3, 0)
    assert (p.gamma_N, p.beta, p.A, p.B2) == (8, 2, 10, 64)
    assert p.two_star_star == 4
    assert not p.is_critical


def test_critical_exponent_gives_zero_beta():
    p = derive_problem(6, 6, 0)
    assert p.beta == 0 and p.is_critical


def test_lambda_above_rellich_rejected():
    with pytest.raises(LambdaAboveRellich):
        derive_problem(5, 3, 2)


@pytest.mark.parametrize(
    "args, exc",
    [((4, 3, 0), DimensionTooSmall), ((5.5, 3, 0), DimensionTooSmall), ((5, 2, 0), ExponentOutOfRange)],
)
def test_derive_problem_validation(args, exc):
    with pytest.raises(exc):
        derive_problem(*args)


def test_non_finite_input_rejected():
    with pytest.raises(ValueError):
        derive_problem(5, 3, math.nan)


@pytest.mark.parametrize("N, area", [(2, 2 * math.pi), (3, 4 * math.pi), (5, 8 * math.pi**2 / 3), (8, math.pi**4 / 3)])
def test_sphere_area(N, area):
    assert sphere_area(N) == pytest.approx(area, rel=1e-14)


def test_char_roots_examples():
    c = char_roots(5, 3)
    assert (c.c_minus, c.c_plus) == pytest.approx((1, 9), rel=1e-15)
    c = char_roots(4, 4)
    assert c.c_minus == c.c_plus == 4
    c = char_roots(1, 2)
    assert c.c_minus is None and not c.positivity_guaranteed


@pytest.mark.parametrize("A, B", [(0, 1), (1, 0), (-1, 2)])
def test_char_roots_rejects_nonpositive(A, B):
    with pytest.raises(NonPositiveCoefficient):
        char_roots(A, B)


@given(st.floats(0.01, 100), st.floats(0.0, 1.0))
def test_root_relations(B, t):
    A = B * (1 + 10 * t)
    c = char_roots(A, B)
    assert c.c_minus * c.c_plus == pytest.approx(B * B, rel=1e-14)
    assert c.c_minus + c.c_plus == pytest.approx(2 * A, rel=1e-14)
    assert c.c_minus <= B * (1 + 1e-15) and c.c_plus >= B * (1 - 1e-15)


def test_rates_match_roots():
    c = char_roots(13, 12)
    assert c.decay_rate == pytest.approx(math.sqrt(c.c_minus))
    assert c.growth_rate == pytest.approx(math.sqrt(c.c_plus))
    # complex regime: decay rate is the real part of the complex root
    z = char_roots(1, 2)
    assert 0 < z.decay_rate < 1.5


def test_special_lambda_examples():
    assert special_lambda(6, 6) == pytest.approx(0, abs=1e-12)
    assert special_lambda(8, 4) == pytest.approx(0, abs=1e-12)
    assert special_lambda(5, 3) == pytest.approx(-7.4375)
    assert special_lambda(5, 3, printed=True) == pytest.approx(1.5625 - (12 / 13) ** 2 * 3.5625**2)


@pytest.mark.parametrize("N", range(5, 13))
def test_special_lambda_vanishes_at_critical_exponent(N):
    assert abs(special_lambda(N, critical_exponent(N))) < 1e-12


@given(st.integers(5, 14), st.floats(0.001, 1.0))
def test_special_lambda_lower_bound(N, t):
    q = 2 + t * (critical_exponent(N) - 2)
    assert special_lambda(N, q) > -((N - 2) ** 2)


def test_special_lambda_rejects_supercritical():
    with pytest.raises(ExponentOutOfRange):
        special_lambda(8, 4.5)


def test_weighted_examples():
    w = weighted_params(5, 1, 2)
    assert (w.gamma_N_alpha, w.gamma_bar_N_alpha) == (2, 2.5)
    w = weighted_params(5, 0, 2)
    assert (w.gamma_N_alpha, w.gamma_bar_N_alpha) == (gamma_N(5), gamma_N(5) + 2)
    with pytest.raises(AlphaOutOfRange):
        weighted_params(5, 5, 3)
    with pytest.raises(AlphaOutOfRange):
        weighted_params(5, -1, 3)


@given(st.integers(2, 12), st.floats(0.0, 20.0))
def test_weighted_gap_identity(N, x):
    alpha = 4 - N + 1e-3 + x
    if alpha == N:
        return
    w = weighted_params(N, alpha, 3)
    assert w.gamma_bar_N_alpha - w.gamma_N_alpha == pytest.approx((alpha - 2) ** 2 / 2, abs=1e-12 * (1 + alpha**2))


def test_weighted_coefficients_use_gamma_bar_and_gamma():
    c = weighted_params(5, 1, 3).coefficients()
    assert (c.A, c.B, c.q) == (2.5, 2.0, 3.0)


def test_breaking_thresholds_examples():
    t = breaking_thresholds(5, 3)
    assert t.lambda_basic == -32
    assert t.lambda_improved is None and t.q_min_improved == pytest.approx(5.2)
    t = breaking_thresholds(5, 6)
    assert t.lambda_improved == pytest.approx(-4.9375)


@given(st.integers(5, 12), st.floats(0.001, 1.0))
def test_lambda_basic_negative(N, t):
    q = 2 + t * (critical_exponent(N) - 2)
    assert breaking_thresholds(N, q).lambda_basic < 0


@given(st.integers(5, 12), st.floats(0.0, 0.99), st.floats(0.01, 1.0))
def test_beta_decreasing_in_q(N, a, da):
    tss = critical_exponent(N)
    q1 = 2 + a * (tss - 2) + 1e-9
    q2 = min(q1 + da, tss)
    if q2 <= q1:
        return
    assert derive_problem(N, q2, 0).beta < derive_problem(N, q1, 0).beta
    assert derive_problem(N, tss, 0).beta == 0
