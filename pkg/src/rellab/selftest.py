"""Fast end-to-end checks run by `rellab selftest`.

Each check returns (name, passed, detail).  The full property suite lives in
tests/; this is the subset that runs in a few seconds without pytest.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from rellab.closed_form import explicit_profile, explicit_radial, radial_pde_residual
from rellab.cone import ConeSpec, cone_constants, counterexample_check, dyadic_radii, shell_ratios
from rellab.grid import make_grid
from rellab.ground_state import aligned_distance, minimize_quotient, residual, solve_radial
from rellab.params import char_roots, critical_exponent, derive_problem, special_lambda, weighted_params
from rellab.shooting import shoot
from rellab.symmetry import second_variation_certificate

Check = tuple[str, bool, str]


def _closed_form_refinement() -> Check:
    c = char_roots(13.0, 12.0, 3.0)
    res = []
    for M in (2049, 4097):
        _, w = explicit_profile(13.0, 3.0, make_grid(20.0, M))
        res.append(residual(c, 3.0, w))
    ratio = res[0] / res[1]
    return "closed-form residual ~ h^2", 3.5 < ratio < 4.5, f"residuals {res[0]:.3e}, {res[1]:.3e}, ratio {ratio:.2f}"


def _solvers_vs_closed_form() -> Check:
    c = char_roots(13.0, 12.0, 3.0)
    grid = make_grid(20.0, 4097)
    _, exact = explicit_profile(13.0, 3.0, grid)
    gs, _ = minimize_quotient(c, grid)
    d_flow = aligned_distance(gs.profile, exact)
    d_shoot = aligned_distance(shoot(c, grid=grid), exact)
    ok = d_flow < 1e-4 and d_shoot < 1e-4
    return "flow and shooting match the cosh profile", ok, f"flow {d_flow:.2e}, shooting {d_shoot:.2e}"


def _lambda_at_critical() -> Check:
    worst = max(abs(special_lambda(N, critical_exponent(N))) for N in range(5, 13))
    return "lambda(2**) = 0", worst < 1e-12, f"max |lambda| {worst:.1e}"


def _explicit_radial_pde() -> Check:
    r = np.exp(np.linspace(-20.0, 20.0, 4001))
    u = explicit_radial(5, 3.0, r)
    good = radial_pde_residual(u, special_lambda(5, 3.0), 3.0)
    bad = radial_pde_residual(u, special_lambda(5, 3.0, printed=True), 3.0)
    return "explicit radial solution solves the PDE", good < 1e-5 and bad > 1e3 * good, f"{good:.2e} vs {bad:.2e}"


def _certificates() -> Check:
    out = []
    for lam in (0.0, -64.0):
        p = derive_problem(5, 3.0, lam)
        gs, _ = solve_radial(p)
        v = second_variation_certificate(gs, p)
        out.append((v.certified_breaking, v.X > p.gamma_N))
    ok = out == [(False, True), (True, True)]
    return "symmetry certificates at N=5, q=3", ok, f"(breaking, X > gamma_N) at lambda=0, -64: {out}"


def _homogeneity() -> Check:
    A, B, q = 6.0, 5.0, 3.0
    base = minimize_quotient(char_roots(A, B, q))[0].I_value
    errs = []
    for c in (0.25, 4.0):
        ratio = minimize_quotient(char_roots(c * A, c * B, q))[0].I_value / base
        errs.append(abs(ratio / c ** ((3 * q + 2) / (2 * q)) - 1))
    return "I(cA, cB) = c^{(3q+2)/(2q)} I(A, B)", max(errs) < 1e-3, f"relative errors {errs}"


def _cone() -> Check:
    full, half = cone_constants(ConeSpec.full_sphere(5)), cone_constants(ConeSpec.half_sphere(5))
    rows = counterexample_check(5, 2.0, dyadic_radii(1.0, 12))
    g = shell_ratios(rows, "grad_integral")[-1]
    b = shell_ratios(rows, "bilap_integral")[-1]
    ok = bool(full == (0.25, 1.5625) and half == (4.25, 27.5625) and abs(g - 1) < 1e-3 and abs(b - 0.25) < 1e-3)
    return "cone constants and counterexample", ok, f"full {full}, half {half}, shell ratios {g:.5f}, {b:.5f}"


def _weighted() -> Check:
    worst = 0.0
    for N in range(2, 8):
        for alpha in (4.5 - N, 0.5, 1.0, 2.0, 3.5):
            if alpha <= 4 - N or alpha == N:
                continue
            wp = weighted_params(N, alpha, 3.0)
            worst = max(worst, abs(wp.gamma_bar_N_alpha - wp.gamma_N_alpha - (alpha - 2) ** 2 / 2))
    return "weighted gamma_bar - gamma = (alpha-2)^2/2", worst < 1e-12, f"max error {worst:.1e}"


CHECKS: list[Callable[[], Check]] = [
    _closed_form_refinement,
    _solvers_vs_closed_form,
    _lambda_at_critical,
    _explicit_radial_pde,
    _certificates,
    _homogeneity,
    _cone,
    _weighted,
]


def run_selftest() -> list[Check]:
    results = []
    for check in CHECKS:
        try:
            results.append(check())
        except Exception as exc:  # report, do not abort the remaining checks
            results.append((check.__name__.lstrip("_"), False, f"{type(exc).__name__}: {exc}"))
    return results


def all_passed(results: list[Check]) -> bool:
    return all(ok for _, ok, _ in results)
