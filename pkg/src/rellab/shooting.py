"""Independent check of the ground state by shooting on the half-line.

An even solution has w'(0) = w'''(0) = 0, leaving (w(0), w''(0)) to be fixed
by asking the state at s = S to have no component along the growing modes
exp(+sqrt(c_+-) s) of the linearisation.  A seed is found by bisection on
w(0) along the zero-energy curve H(0) = 0 (undershoot vs. overshoot), then
both unknowns are polished by damped Newton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm, schur

from rellab.errors import ExponentOutOfRange, NewtonDivergence, NoSignChangeInBracket
from rellab.grid import Grid, Profile
from rellab.params import ODECoefficients


@dataclass(frozen=True)
class NewtonOptions:
    max_iter: int = 30
    step_tol: float = 1e-13
    residual_tol: float = 1e-6
    scan_points: int = 40
    bisect_iters: int = 80
    decay: float = 1e-8
    growth_budget: float = 1e12
    linear: bool = False
    guess: Optional[tuple[float, float]] = None


def _rk4(a: float, b: float, A: float, B2: float, q: float, ds: float, n: int, linear: bool, classify: bool):
    """Integrate (w, w', w'', w''') from (a, 0, b, 0) with n fixed RK4 steps.

    With ``classify`` the run stops at the first sign change of w (-1) or of w'
    (+1) and returns only that verdict.
    """
    qm = q - 2.0

    def f4(w, w2):
        nl = 0.0 if linear else abs(w) ** qm * w
        return 2.0 * A * w2 - B2 * w + nl

    w, w1, w2, w3 = a, 0.0, b, 0.0
    out = None if classify else np.empty((n + 1, 4))
    if out is not None:
        out[0] = (w, w1, w2, w3)
    h2 = 0.5 * ds
    h6 = ds / 6.0
    for i in range(n):
        k1 = (w1, w2, w3, f4(w, w2))
        y2 = (w + h2 * k1[0], w1 + h2 * k1[1], w2 + h2 * k1[2], w3 + h2 * k1[3])
        k2 = (y2[1], y2[2], y2[3], f4(y2[0], y2[2]))
        y3 = (w + h2 * k2[0], w1 + h2 * k2[1], w2 + h2 * k2[2], w3 + h2 * k2[3])
        k3 = (y3[1], y3[2], y3[3], f4(y3[0], y3[2]))
        y4 = (w + ds * k3[0], w1 + ds * k3[1], w2 + ds * k3[2], w3 + ds * k3[3])
        k4 = (y4[1], y4[2], y4[3], f4(y4[0], y4[2]))
        w += h6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        w1 += h6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        w2 += h6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        w3 += h6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
        if classify:
            if w < 0:
                return -1
            if w1 > 0:
                return 1
        else:
            out[i + 1] = (w, w1, w2, w3)
    return 0 if classify else out


def _companion(A: float, B2: float) -> np.ndarray:
    return np.array([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-B2, 0, 2 * A, 0]], dtype=float)


def _unstable_left_basis(J: np.ndarray) -> np.ndarray:
    # rows annihilate exactly the stable invariant subspace of J
    _, Z, k = schur(J.T, sort="rhp")
    return Z[:, :k].T


def zero_energy_curvature(a: float, B2: float, q: float, linear: bool = False) -> float:
    """w''(0) < 0 making H = 0 at an even maximum of height a."""
    nl = 0.0 if linear else 2.0 * a**q / q
    return -math.sqrt(max(B2 * a * a - nl, 0.0))


def shooting_interval(coeffs: ODECoefficients, opts: NewtonOptions) -> float:
    """Default S: decay to `decay` of the peak, capped so that rounding
    amplified by exp((r_- + r_+) S) stays below 1/growth_budget."""
    rm, rp = coeffs.decay_rate, coeffs.growth_rate
    return min(math.log(1.0 / opts.decay) / rm, math.log(opts.growth_budget) / (rm + rp))


def shoot(
    coeffs: ODECoefficients,
    q: float | None = None,
    domain_S: float | None = None,
    newton_opts: NewtonOptions = NewtonOptions(),
    grid: Grid | None = None,
) -> Profile:
    q = coeffs.q if q is None else q
    if q is None or q <= 2:
        raise ExponentOutOfRange(f"q must be > 2, got {q}")
    opts = newton_opts
    A, B2 = coeffs.A, coeffs.B2
    if grid is None:
        from rellab.ground_state import default_grid

        grid = default_grid(coeffs)
    ds = grid.h
    S = shooting_interval(coeffs, opts) if domain_S is None else domain_S
    n = max(1, min(int(round(S / ds)), grid.M // 2))
    S = n * ds

    J = _companion(A, B2)
    U = _unstable_left_basis(J)

    def F(x):
        y = _rk4(x[0], x[1], A, B2, q, ds, n, opts.linear, False)[-1]
        return U @ y

    if opts.guess is not None:
        x = np.array(opts.guess, dtype=float)
    else:
        x = np.array(_bracket_seed(A, B2, q, ds, n, opts), dtype=float)

    growth = math.exp(coeffs.growth_rate * S)
    f = F(x)
    for _ in range(opts.max_iter):
        if not np.all(np.isfinite(f)):
            raise NewtonDivergence("shooting residual is not finite")
        scale = max(np.max(np.abs(x)), 1.0 if opts.linear else 0.0)
        Jm = np.empty((2, 2))
        for j in range(2):
            dx = np.zeros(2)
            dx[j] = 1e-4 * max(abs(x[j]), scale) / growth
            Jm[:, j] = (F(x + dx) - f) / dx[j]
        try:
            step = np.linalg.solve(Jm, -f)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence("singular shooting Jacobian") from exc
        t = 1.0
        while t > 1e-10:
            fn = F(x + t * step)
            if np.all(np.isfinite(fn)) and np.linalg.norm(fn) < np.linalg.norm(f):
                break
            t *= 0.5
        else:
            break  # no further decrease: rounding floor reached
        x, f = x + t * step, fn
        if np.linalg.norm(t * step) <= opts.step_tol * max(np.linalg.norm(x), 1e-300):
            break

    traj = _rk4(x[0], x[1], A, B2, q, ds, n, opts.linear, False)
    peak = max(abs(x[0]), 1e-300)
    if np.linalg.norm(f) > opts.residual_tol * max(peak, np.linalg.norm(traj[-1])) and not (
        opts.linear and np.linalg.norm(x) < 1e-12
    ):
        raise NewtonDivergence(f"growing-mode residual {np.linalg.norm(f):.3e} at S = {S:.3f}")
    return _assemble(grid, traj, J, n)


def _bracket_seed(A, B2, q, ds, n, opts: NewtonOptions) -> tuple[float, float]:
    if opts.linear:
        raise NoSignChangeInBracket("the linear problem has no nontrivial homoclinic to bracket")
    amax = (0.5 * q * B2) ** (1.0 / (q - 2.0))  # a priori sup bound

    def verdict(a):
        return _rk4(a, zero_energy_curvature(a, B2, q), A, B2, q, ds, n, False, True)

    samples = amax * np.linspace(0.02, 0.999, opts.scan_points)
    verdicts = [verdict(a) for a in samples]
    for i in range(len(samples) - 1):
        if verdicts[i] * verdicts[i + 1] < 0:
            lo, hi, vlo = samples[i], samples[i + 1], verdicts[i]
            break
    else:
        raise NoSignChangeInBracket("no undershoot/overshoot transition below the sup bound")
    for _ in range(opts.bisect_iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if verdict(mid) == vlo:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return a, zero_energy_curvature(a, B2, q)


def _assemble(grid: Grid, traj: np.ndarray, J: np.ndarray, n: int) -> Profile:
    """Even profile on `grid`: RK4 values on [0, S], linear stable tail beyond."""
    half = grid.M // 2
    vals = np.zeros(half + 1)
    vals[: n + 1] = traj[:, 0]
    m = half - n
    if m > 0:
        # drop the (already tiny) growing part of the end state and propagate
        # inside the stable subspace, where J acts as the block T11
        T, Zs, k = schur(J, sort="lhp")
        Vs = Zs[:, :k]
        c = Vs.T @ traj[-1]
        step = expm(T[:k, :k] * grid.h)
        for i in range(1, m + 1):
            c = step @ c
            vals[n + i] = Vs[0] @ c
    full = np.concatenate([vals[:0:-1], vals])
    return Profile(grid, full)
