"""Ground states of w'''' - 2A w'' + B^2 w = |w|^{q-2} w.

The minimiser of

    I(A, B) = inf  int(|w''|^2 + 2A|w'|^2 + B^2|w|^2) / (int|w|^q)^{2/q}

is computed by a gradient flow on {int|w|^q = 1} that uses the gradient with
respect to the quadratic form itself (a Sobolev gradient), so each step is one
banded solve with the discretised operator.  The unit step is the nonlinear
inverse iteration w <- normalise(L^{-1}|w|^{q-2}w); backtracking only kicks in
if it fails to decrease the quotient.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from rellab.closed_form import cosh_params
from rellab.errors import DegenerateProfile, ExponentOutOfRange, NonConvergence
from rellab.grid import (
    DEFAULT_M,
    BandedOperator,
    Grid,
    Profile,
    apply_L,
    default_half_width,
    make_grid,
    quadratic_form,
)
from rellab.params import ODECoefficients, ProblemParams, WeightedParams

log = logging.getLogger(__name__)

POSITIVITY_WARNING = "A < B: positivity of the ground state is not guaranteed; shape flags are observations only"

# relative slack in the descent test; quotient evaluation is accurate to a few ulp
_ROUNDING_SLACK = 1e-14


class Init(enum.Enum):
    CLOSED_FORM = "closed_form"
    GAUSSIAN = "gaussian"
    RANDOM = "random"


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 2000
    grad_tol: float = 1e-10
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    init: Init = Init.CLOSED_FORM
    seed: Optional[int] = None
    enforce_even: bool = False
    shape_tol: float = 1e-6

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if isinstance(self.init, str):
            object.__setattr__(self, "init", Init(self.init))


@dataclass(frozen=True)
class ShapeFlags:
    is_even: bool
    is_positive: bool
    is_monotone_halfline: bool
    sup_bound_ok: bool
    center: float
    peak: float
    even_error: float
    sup_ratio: float

    @property
    def all_ok(self) -> bool:
        return self.is_even and self.is_positive and self.is_monotone_halfline and self.sup_bound_ok


@dataclass
class GroundState:
    profile: Profile
    I_value: float
    residual_linf: float
    hamiltonian_dev: float
    is_even: bool
    is_positive: bool
    is_monotone_halfline: bool
    sup_bound_ok: bool
    coeffs: ODECoefficients
    q: float
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "A": self.coeffs.A,
            "B": self.coeffs.B,
            "q": self.q,
            "I_value": self.I_value,
            "residual_linf": self.residual_linf,
            "hamiltonian_dev": self.hamiltonian_dev,
            "is_even": self.is_even,
            "is_positive": self.is_positive,
            "is_monotone_halfline": self.is_monotone_halfline,
            "sup_bound_ok": self.sup_bound_ok,
            "peak": float(np.max(np.abs(self.profile.values))),
            "L": self.profile.grid.L,
            "M": self.profile.grid.M,
        }


@dataclass
class SolveReport:
    iterations: int
    final_grad_norm: float
    energy_history: np.ndarray


def default_grid(coeffs: ODECoefficients, M: int = DEFAULT_M, L: float | None = None) -> Grid:
    return make_grid(default_half_width(coeffs.decay_rate) if L is None else L, M)


def initial_profile(coeffs: ODECoefficients, grid: Grid, opts: SolveOptions) -> np.ndarray:
    s = grid.nodes
    q = coeffs.q
    width = 1.0 / coeffs.decay_rate
    if opts.init is Init.CLOSED_FORM:
        return cosh_params(coeffs.A, q)(s)
    if opts.init is Init.GAUSSIAN:
        return np.exp(-((s / (2.0 * width)) ** 2))
    rng = np.random.default_rng(opts.seed)
    # random shift, width and sign, plus a few smooth bumps
    shift = rng.uniform(-1.0, 1.0) * width
    scale = rng.uniform(0.6, 1.6) * 2.0 * width
    w = np.exp(-(((s - shift) / scale) ** 2))
    for _ in range(4):
        c = shift + rng.uniform(-2.0, 2.0) * width
        w += rng.uniform(-0.3, 0.3) * np.exp(-(((s - c) / (rng.uniform(0.3, 1.0) * width)) ** 2))
    return rng.choice([-1.0, 1.0]) * w


def _lq_mass(grid: Grid, w: np.ndarray, q: float) -> float:
    return grid.h * float(np.sum(np.abs(w) ** q))


def minimize_quotient(
    coeffs: ODECoefficients,
    grid: Grid | None = None,
    opts: SolveOptions = SolveOptions(),
    w0: np.ndarray | None = None,
) -> tuple[GroundState, SolveReport]:
    q = coeffs.q
    if q is None or q <= 2:
        raise ExponentOutOfRange(f"coefficients need an exponent q > 2, got {q}")
    if grid is None:
        grid = default_grid(coeffs)
    A, B2 = coeffs.A, coeffs.B2
    op = BandedOperator(grid, A, B2)

    def normalise(v):
        if opts.enforce_even:
            v = 0.5 * (v + v[::-1])
        mass = _lq_mass(grid, v, q)
        if not mass > 0:
            raise DegenerateProfile("profile vanished during the flow")
        return v / mass ** (1.0 / q)

    w = normalise(initial_profile(coeffs, grid, opts) if w0 is None else np.asarray(w0, float))
    R = quadratic_form(grid, A, B2, w)
    history = [R]
    gnorm = math.inf
    for it in range(opts.max_iters + 1):
        # with int|w|^q = 1 the Lagrange multiplier equals the quotient R
        z = R * op.solve(np.abs(w) ** (q - 2) * w)
        d = w - z
        gnorm = float(np.linalg.norm(d) / np.linalg.norm(w))
        if gnorm < opts.grad_tol:
            break
        if it == opts.max_iters:
            raise NonConvergence(f"gradient norm {gnorm:.3e} after {it} iterations (tol {opts.grad_tol:.1e})")
        t = opts.step_init
        while True:
            wn = normalise(w - t * d)
            Rn = quadratic_form(grid, A, B2, wn)
            if Rn <= R * (1.0 + _ROUNDING_SLACK):
                break
            t *= opts.backtrack_factor
            if t < 1e-12:
                raise NonConvergence(f"line search failed at iteration {it}, gradient norm {gnorm:.3e}")
        w, R = wn, Rn
        history.append(R)

    if Profile(grid, w).boundary_ratio() > 1e-6:
        raise DegenerateProfile("minimiser is not localised away from the boundary; enlarge L")
    log.debug("flow converged in %d iterations, I = %.15g", it, R)

    # rescale the constrained minimiser so it solves the ODE itself
    v = R ** (1.0 / (q - 2.0)) * w
    gs = evaluate_ground_state(Profile(grid, v), coeffs, R, opts.shape_tol)
    return gs, SolveReport(it, gnorm, np.asarray(history))


def evaluate_ground_state(
    profile: Profile, coeffs: ODECoefficients, I_value: float, shape_tol: float = 1e-6
) -> GroundState:
    q = coeffs.q
    flags = diagnostics(profile, coeffs, q, shape_tol)
    notes = []
    if not coeffs.positivity_guaranteed:
        warnings.warn(POSITIVITY_WARNING, RuntimeWarning, stacklevel=3)
        notes.append(POSITIVITY_WARNING)
    return GroundState(
        profile=profile,
        I_value=I_value,
        residual_linf=residual(coeffs, q, profile),
        hamiltonian_dev=hamiltonian_deviation(profile, coeffs, q),
        is_even=flags.is_even,
        is_positive=flags.is_positive,
        is_monotone_halfline=flags.is_monotone_halfline,
        sup_bound_ok=flags.sup_bound_ok,
        coeffs=coeffs,
        q=q,
        warnings=notes,
    )


def solve_radial(
    p: ProblemParams, M: int = DEFAULT_M, L: float | None = None, opts: SolveOptions = SolveOptions()
) -> tuple[GroundState, SolveReport]:
    """Radial ground state at (N, q, lambda), as its Emden-Fowler profile."""
    coeffs = p.coefficients()
    return minimize_quotient(coeffs, default_grid(coeffs, M, L), opts)


def solve_weighted(
    wp: WeightedParams, M: int = DEFAULT_M, L: float | None = None, opts: SolveOptions = SolveOptions()
) -> tuple[GroundState, SolveReport]:
    coeffs = wp.coefficients()
    return minimize_quotient(coeffs, default_grid(coeffs, M, L), opts)


def residual(coeffs: ODECoefficients, q: float, w: Profile) -> float:
    v = w.values
    r = apply_L(w.grid, coeffs.A, coeffs.B2, v) - np.abs(v) ** (q - 2) * v
    return float(np.max(np.abs(r)) / max(1.0, np.max(np.abs(v)) ** (q - 1)))


def hamiltonian(w: Profile, coeffs: ODECoefficients, q: float) -> np.ndarray:
    """H = -w'''w' + |w''|^2/2 + A|w'|^2 - B^2|w|^2/2 + |w|^q/q at every node."""
    h = w.grid.h
    p = np.pad(w.values, 2)
    v = p[2:-2]
    w1 = (p[3:-1] - p[1:-3]) / (2 * h)
    w2 = (p[3:-1] - 2 * v + p[1:-3]) / h**2
    w3 = (p[4:] - 2 * p[3:-1] + 2 * p[1:-3] - p[:-4]) / (2 * h**3)
    return -w3 * w1 + 0.5 * w2**2 + coeffs.A * w1**2 - 0.5 * coeffs.B2 * v**2 + np.abs(v) ** q / q


def hamiltonian_deviation(w: Profile, coeffs: ODECoefficients, q: float) -> float:
    H = hamiltonian(w, coeffs, q)
    return float(np.max(np.abs(H)) / max(1.0, np.max(np.abs(w.values)) ** q))


def peak_location(w: Profile) -> tuple[float, float, int]:
    """Sub-grid location and value of max|w| from a 3-point parabola; the value
    carries the sign of w at the peak."""
    v = w.values
    i = int(np.argmax(np.abs(v)))
    s = w.grid.nodes
    if i == 0 or i == len(v) - 1:
        return float(s[i]), float(v[i]), i
    y0, y1, y2 = np.abs(v[i - 1 : i + 2])
    denom = y0 - 2 * y1 + y2
    offset = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
    offset = float(np.clip(offset, -0.5, 0.5))
    peak = y1 - 0.25 * (y0 - y2) * offset
    return float(s[i] + offset * w.grid.h), float(math.copysign(peak, v[i])), i


def centered_spline(w: Profile) -> tuple[CubicSpline, float, float]:
    """Spline of the sign-normalised profile, its centre and (positive) peak."""
    c, peak, _ = peak_location(w)
    sign = 1.0 if peak >= 0 else -1.0
    return CubicSpline(w.grid.nodes, sign * w.values, extrapolate=False), c, abs(peak)


def aligned_distance(w1: Profile, w2: Profile) -> float:
    """L-infinity distance after recentering both at their peaks and fixing sign,
    relative to the peak of w2.  Inversion s -> -s is also tried."""
    f1, c1, _ = centered_spline(w1)
    f2, c2, p2 = centered_spline(w2)
    t = w2.grid.nodes
    a = np.nan_to_num(f2(t + c2))
    best = math.inf
    for sgn in (1.0, -1.0):
        b = np.nan_to_num(f1(sgn * t + c1))
        best = min(best, float(np.max(np.abs(a - b))))
    return best / p2


def diagnostics(w: Profile, coeffs: ODECoefficients, q: float, tol: float = 1e-6) -> ShapeFlags:
    f, c, peak = centered_spline(w)
    if peak == 0:
        return ShapeFlags(False, False, False, True, 0.0, 0.0, math.inf, 0.0)
    s = w.grid.nodes
    # reflect about the interpolated centre on offsets that stay inside the domain
    reach = s[-1] - abs(c)
    t = s[(s >= 0) & (s <= reach)]
    even_err = float(np.max(np.abs(f(c + t) - f(c - t)))) / peak
    signed = w.values * (1.0 if w.values[np.argmax(np.abs(w.values))] >= 0 else -1.0)
    is_pos = bool(np.min(signed) > -tol * peak)
    right = signed[s >= c]
    left = signed[s <= c]
    monotone = bool(np.all(np.diff(right) <= tol * peak) and np.all(np.diff(left) >= -tol * peak))
    sup_ratio = peak ** (q - 2) / (0.5 * q * coeffs.B2)
    return ShapeFlags(
        is_even=even_err < tol,
        is_positive=is_pos,
        is_monotone_halfline=monotone,
        sup_bound_ok=bool(sup_ratio <= 1.0 + tol),
        center=c,
        peak=peak,
        even_error=even_err,
        sup_ratio=sup_ratio,
    )
