import numpy as np
import pytest

from rellab.closed_form import cosh_params, explicit_profile
from rellab.errors import ExponentOutOfRange, NoSignChangeInBracket
from rellab.ground_state import aligned_distance, default_grid, diagnostics
from rellab.params import char_roots
from rellab.shooting import NewtonOptions, shoot, shooting_interval, zero_energy_curvature


def test_reference_case_initial_data():
    c = char_roots(13, 12, 3)
    grid = default_grid(c)
    w = shoot(c, grid=grid)
    k = grid.center
    assert w.values[k] == pytest.approx(210, rel=1e-7)
    # curvature at the top from the profile, against the analytic value
    w2 = (w.values[k + 1] - 2 * w.values[k] + w.values[k - 1]) / grid.h**2
    assert w2 == pytest.approx(cosh_params(13, 3).second_derivative_at_zero(), rel=1e-4)
    _, exact = explicit_profile(13, 3, grid)
    assert aligned_distance(w, exact) < 1e-4


def test_zero_energy_curvature_on_closed_form():
    # the cosh profile has H = 0, so its curvature at the top lies on this curve
    assert zero_energy_curvature(210, 144, 3) == pytest.approx(-420, rel=1e-14)


@pytest.mark.parametrize("A, B, q", [(6, 5, 4), (13, 12, 3), (4, 4, 3), (6, 5, 3)])
def test_agrees_with_gradient_flow(ground_state, A, B, q):
    gs, _ = ground_state(A, B, q)
    c = char_roots(A, B, q)
    w = shoot(c, grid=gs.profile.grid)
    assert aligned_distance(w, gs.profile) < 1e-4
    f = diagnostics(w, c, q)
    assert f.is_even and f.is_positive and f.is_monotone_halfline


def test_linear_mode_collapses_to_zero():
    c = char_roots(13, 12, 3)
    w = shoot(c, newton_opts=NewtonOptions(linear=True, guess=(1e-3, 0.0)))
    assert np.max(np.abs(w.values)) < 1e-12


def test_linear_mode_has_nothing_to_bracket():
    with pytest.raises(NoSignChangeInBracket):
        shoot(char_roots(13, 12, 3), newton_opts=NewtonOptions(linear=True))


def test_requires_superlinear_exponent():
    with pytest.raises(ExponentOutOfRange):
        shoot(char_roots(13, 12))


def test_interval_respects_growth_budget():
    c = char_roots(13, 12, 3)
    opts = NewtonOptions()
    S = shooting_interval(c, opts)
    assert np.exp((c.decay_rate + c.growth_rate) * S) <= opts.growth_budget * (1 + 1e-12)
