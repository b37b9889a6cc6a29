import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rellab.cone import (
    ConeLabel,
    ConeSpec,
    cone_constants,
    cone_from_label,
    counterexample_check,
    critical_power_profile,
    dyadic_radii,
    hardy_constant,
    hardy_quotient,
    random_bump_profile,
    shell_ratios,
    verify_hardy_samples,
    write_counterexample_csv,
)
from rellab.errors import (
    ConeConditionViolated,
    DimensionTooSmall,
    MeshMismatch,
    NonIntegrableProfile,
    ParameterOutOfRange,
)


def test_full_sphere_n5():
    assert cone_constants(ConeSpec.full_sphere(5)) == pytest.approx((0.25, 25 / 16))


def test_half_sphere_n5():
    spec = ConeSpec.half_sphere(5)
    assert spec.lambda_sigma == 4
    assert cone_constants(spec) == pytest.approx((4.25, (5 / 4 + 4) ** 2))


def test_labels_and_validation():
    assert cone_from_label(6, "FullSphere").label is ConeLabel.FULL_SPHERE
    assert cone_from_label(6, "Custom", 2.5).lambda_sigma == 2.5
    with pytest.raises(ParameterOutOfRange):
        cone_from_label(6, "Custom")
    with pytest.raises(ParameterOutOfRange):
        ConeSpec.custom(6, -1)
    # gamma_3 < 0, so a small sphere eigenvalue cannot rescue the Rellich form
    spec = ConeSpec.custom(3, 0.5)
    assert not spec.rellich_admissible
    with pytest.raises(ConeConditionViolated):
        cone_constants(spec)
    assert hardy_constant(spec) == pytest.approx(0.75)


@pytest.mark.parametrize("N, lam_s", [(5, 0.0), (7, 6.0), (9, 1.5)])
def test_gaussian_in_log_r_has_closed_form_quotient(N, lam_s):
    # weight e^{kt} e^{-2t^2} is a shifted Gaussian, so the quotient is k^2/4 + 1
    t = np.linspace(-12, 12, 3001)
    spec = ConeSpec.custom(N, lam_s)
    q = hardy_quotient(spec, np.exp(t), np.exp(-(t**2)))
    assert q == pytest.approx(hardy_constant(spec) + 1, rel=1e-8)


def test_random_profiles_respect_hardy():
    rng = np.random.default_rng(0)
    for N in (5, 6, 8):
        for spec in (ConeSpec.full_sphere(N), ConeSpec.half_sphere(N)):
            qmin = verify_hardy_samples(spec, [random_bump_profile(rng, N) for _ in range(100)])
            assert qmin >= hardy_constant(spec) - 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(0.4, 1.5), st.integers(5, 9))
def test_dilation_invariance(a, width, N):
    # f(r) -> f(r e^a) is a translation in log r
    t = np.linspace(-12, 12, 4001)
    spec = ConeSpec.full_sphere(N)
    base = hardy_quotient(spec, np.exp(t), np.exp(-((t / width) ** 2)))
    moved = hardy_quotient(spec, np.exp(t), np.exp(-(((t + a) / width) ** 2)))
    assert moved == pytest.approx(base, rel=1e-7)


@pytest.mark.parametrize("N", [5, 6, 8])
def test_critical_power_approaches_constant(N):
    spec = ConeSpec.full_sphere(N)
    q20 = hardy_quotient(spec, *critical_power_profile(N, 20))
    q40 = hardy_quotient(spec, *critical_power_profile(N, 40, 8001))
    C = hardy_constant(spec)
    assert C <= q40 < q20
    assert q40 <= 1.05 * C


def test_quotient_input_checks():
    spec = ConeSpec.full_sphere(5)
    t = np.linspace(-3, 3, 101)
    with pytest.raises(NonIntegrableProfile):
        hardy_quotient(spec, np.exp(t), np.ones_like(t))
    with pytest.raises(NonIntegrableProfile):
        hardy_quotient(spec, np.exp(t), np.zeros_like(t))
    with pytest.raises(MeshMismatch):
        hardy_quotient(spec, np.linspace(1, 2, 101), np.exp(-(t**2)))
    with pytest.raises(MeshMismatch):
        hardy_quotient(spec, np.exp(t), np.exp(-(t[:-1] ** 2)))
    with pytest.raises(ValueError):
        verify_hardy_samples(spec, [])


@pytest.mark.parametrize("N", [5, 6, 7, 8])
@pytest.mark.parametrize("t", [2.0, 3.0, 3.9])
def test_counterexample_dichotomy(N, t):
    rows = counterexample_check(N, t, dyadic_radii(1.0, 14))
    grad = shell_ratios(rows, "grad_integral")
    lap = shell_ratios(rows, "bilap_integral")
    assert grad[-1] == pytest.approx(2 ** (t - 2), rel=2e-2)
    assert lap[-1] == pytest.approx(2 ** (t - 4), rel=2e-2)
    # shell contributions do not decay for the gradient, so its energy diverges;
    # for the bilaplacian they shrink geometrically, so its energy converges
    assert grad[-1] > 0.99 and lap[-1] < 0.99


def test_counterexample_is_monotone_in_R():
    rows = counterexample_check(5, 2.5, [4.0, 0.5, 1.0, 2.0])
    assert [r.R for r in rows] == [0.5, 1.0, 2.0, 4.0]
    assert all(a.grad_integral < b.grad_integral for a, b in zip(rows, rows[1:]))
    assert all(a.bilap_integral < b.bilap_integral for a, b in zip(rows, rows[1:]))


def test_counterexample_argument_checks():
    with pytest.raises(ParameterOutOfRange):
        counterexample_check(5, 4.0, [1.0])
    with pytest.raises(ParameterOutOfRange):
        counterexample_check(5, 1.5, [1.0])
    with pytest.raises(DimensionTooSmall):
        counterexample_check(4, 3.0, [1.0])
    with pytest.raises(ParameterOutOfRange):
        counterexample_check(5, 3.0, [0.0])


def test_counterexample_csv(tmp_path):
    rows = counterexample_check(6, 3.0, dyadic_radii(1.0, 4))
    write_counterexample_csv(tmp_path / "c.csv", rows)
    with open(tmp_path / "c.csv") as fh:
        read = list(csv.reader(fh))
    assert read[0] == ["R", "grad_integral", "bilap_integral"]
    assert [float(x[0]) for x in read[1:]] == [1, 2, 4, 8]
    assert float(read[-1][2]) == pytest.approx(rows[-1].bilap_integral, rel=1e-15)
