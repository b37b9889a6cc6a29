"""Scalar constants of the weighted biharmonic problem.

Everything downstream takes a validated `ProblemParams`, `ODECoefficients` or
`WeightedParams`; validation happens here once and is not repeated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

from rellab.errors import (
    AlphaOutOfRange,
    DimensionTooSmall,
    ExponentOutOfRange,
    LambdaAboveRellich,
    NonPositiveCoefficient,
)

# lambda(q) admits a (gamma_N^2 + 2)^2 reading; only (gamma_N + 2)^2 makes
# lambda(2**) = 0, so that one is used and this note travels with results.
LAMBDA_Q_NOTE = (
    "lambda(q) uses (gamma_N + 2)^2; the (gamma_N^2 + 2)^2 variant "
    "violates lambda(2**) = 0 and fails the PDE residual check"
)


def gamma_N(N: float) -> float:
    return N * (N - 4) / 4.0


def critical_exponent(N: int) -> float:
    """2** = 2N/(N-4)."""
    return 2.0 * N / (N - 4)


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere S^{N-1}."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def _check_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


def _check_dimension(N) -> int:
    if int(N) != N:
        raise DimensionTooSmall(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 5:
        raise DimensionTooSmall(f"N must be >= 5, got {N}")
    return N


@dataclass(frozen=True)
class ODECoefficients:
    """Coefficients of w'''' - 2A w'' + B^2 w = |w|^{q-2} w.

    `c_minus`, `c_plus` are the roots of c^2 - 2Ac + B^2 = 0; they are None in
    the complex regime A < B, where positivity of the ground state is not
    guaranteed.
    """

    A: float
    B: float
    q: Optional[float] = None
    c_minus: Optional[float] = None
    c_plus: Optional[float] = None

    @property
    def B2(self) -> float:
        return self.B * self.B

    @property
    def positivity_guaranteed(self) -> bool:
        return self.A >= self.B

    def _roots(self) -> tuple[complex, complex]:
        disc = cmath.sqrt(self.A * self.A - self.B2)
        return self.A - disc, self.A + disc

    @property
    def decay_rate(self) -> float:
        """Slowest decay rate of linearised solutions, Re sqrt(c_-)."""
        c_lo, _ = self._roots()
        return cmath.sqrt(c_lo).real

    @property
    def growth_rate(self) -> float:
        """Fastest growth rate of linearised solutions, Re sqrt(c_+)."""
        _, c_hi = self._roots()
        return cmath.sqrt(c_hi).real

    def with_q(self, q: float) -> "ODECoefficients":
        if q <= 2:
            raise ExponentOutOfRange(f"q must be > 2, got {q}")
        return ODECoefficients(self.A, self.B, float(q), self.c_minus, self.c_plus)


def char_roots(A: float, B: float, q: Optional[float] = None) -> ODECoefficients:
    if not (A > 0 and B > 0):
        raise NonPositiveCoefficient(f"A and B must be positive, got A={A}, B={B}")
    if q is not None and q <= 2:
        raise ExponentOutOfRange(f"q must be > 2, got {q}")
    A, B = float(A), float(B)
    if A < B:
        return ODECoefficients(A, B, q)
    c_plus = A + math.sqrt(A * A - B * B)
    # product form avoids cancellation in A - sqrt(A^2 - B^2)
    c_minus = B * B / c_plus
    return ODECoefficients(A, B, q, c_minus, c_plus)


@dataclass(frozen=True)
class ProblemParams:
    N: int
    q: float
    lam: float
    gamma_N: float
    beta: float
    A: float
    B2: float
    omega_N: float
    two_star_star: float

    @property
    def B(self) -> float:
        return math.sqrt(self.B2)

    @property
    def is_critical(self) -> bool:
        return self.q == self.two_star_star

    def coefficients(self) -> ODECoefficients:
        """ODE coefficients of the Emden-Fowler transformed radial problem."""
        return char_roots(self.A, self.B, self.q)


def derive_problem(N: int, q: float, lam: float) -> ProblemParams:
    _check_finite(q=q, lam=lam)
    N = _check_dimension(N)
    if q <= 2:
        raise ExponentOutOfRange(f"q must be > 2, got {q}")
    g = gamma_N(N)
    if lam >= g * g:
        raise LambdaAboveRellich(f"lambda must be < gamma_N^2 = {g * g}, got {lam}")
    tss = critical_exponent(N)
    beta = 0.0 if q == tss else N - q * (N - 4) / 2.0
    return ProblemParams(
        N=N,
        q=float(q),
        lam=float(lam),
        gamma_N=g,
        beta=beta,
        A=g + 2.0,
        B2=g * g - lam,
        omega_N=sphere_area(N),
        two_star_star=tss,
    )


def _check_subcritical(N: int, q: float) -> None:
    if not (2 < q <= critical_exponent(N)):
        raise ExponentOutOfRange(f"need 2 < q <= 2** = {critical_exponent(N)}, got q={q}")


def special_lambda(N: int, q: float, printed: bool = False) -> float:
    """lambda(q) at which the radial solution is explicit.

    ``printed=True`` evaluates the alternative reading with (gamma_N^2 + 2)^2; it is
    kept only for the consistency check in the closed-form tests.
    """
    N = _check_dimension(N)
    _check_subcritical(N, q)
    g = gamma_N(N)
    ratio = 4.0 * q / (q * q + 4.0)
    base = g * g + 2.0 if printed else g + 2.0
    return g * g - ratio * ratio * base * base


@dataclass(frozen=True)
class WeightedParams:
    N: int
    alpha: float
    q: float
    gamma_N_alpha: float
    gamma_bar_N_alpha: float
    beta_alpha: float

    def coefficients(self) -> ODECoefficients:
        """ODE coefficients A = gamma_bar, B = |gamma| of the weighted problem."""
        return char_roots(self.gamma_bar_N_alpha, abs(self.gamma_N_alpha), self.q if self.q > 2 else None)


def weighted_params(N: int, alpha: float, q: float) -> WeightedParams:
    _check_finite(alpha=alpha, q=q)
    if int(N) != N or N < 2:
        raise DimensionTooSmall(f"N must be an integer >= 2, got {N!r}")
    N = int(N)
    if not alpha > 4 - N or alpha == N:
        raise AlphaOutOfRange(f"need alpha > 4 - N and alpha != N, got alpha={alpha}, N={N}")
    if q < 2:
        raise ExponentOutOfRange(f"q must be >= 2, got {q}")
    g = (N - 4 + alpha) * (N - alpha) / 4.0
    gbar = ((N - 2) / 2.0) ** 2 + ((alpha - 2) / 2.0) ** 2
    assert gbar >= g
    return WeightedParams(
        N=N,
        alpha=float(alpha),
        q=float(q),
        gamma_N_alpha=g,
        gamma_bar_N_alpha=gbar,
        beta_alpha=N - q * (N - 4 + alpha) / 2.0,
    )


@dataclass(frozen=True)
class BreakingThresholds:
    lambda_basic: float
    lambda_improved: Optional[float]
    q_min_improved: float


def breaking_thresholds(N: int, q: float) -> BreakingThresholds:
    """lambda below which no extremal is radially symmetric.

    `lambda_basic` holds for every admissible q; `lambda_improved` uses X > gamma_N
    and is only available for q_min_improved <= q <= 2**.
    """
    N = _check_dimension(N)
    _check_subcritical(N, q)
    g = gamma_N(N)
    basic = -(q - 1) * (N - 1) ** 2 / (q - 2) ** 2
    q_min = 2.0 + 4.0 * (N - 1) / (N * (N - 4))
    improved = None
    if q_min <= q:
        improved = g * g - (N - 1) * (N - 1 + 2 * g) / (q - 2)
    return BreakingThresholds(basic, improved, q_min)
