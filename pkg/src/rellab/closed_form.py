"""Explicit solutions: the cosh profile, the radial solution at lambda(q), and
the Sobolev extremal.

On the curve A/B = (q^2 + 4)/(4q),

    w(s) = C cosh(nu s)^{-4/(q-2)},
    nu^2 = (q-2)^2 A / (2(q^2+4)),   C^{q-2} = 2q(q+2)(3q-2) A^2 / (q^2+4)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rellab.emden_fowler import RadialFunction
from rellab.errors import DimensionTooSmall, ExponentOutOfRange, NonPositiveCoefficient
from rellab.grid import Grid, Profile
from rellab.params import critical_exponent, gamma_N, special_lambda


@dataclass(frozen=True)
class CoshProfileParams:
    nu: float
    C: float
    q: float
    A: float
    B: float

    @property
    def power(self) -> float:
        return 4.0 / (self.q - 2.0)

    def __call__(self, s):
        # cosh^-p written via exp(-|x|) so it stays finite for large |s|
        x = np.abs(self.nu * np.asarray(s, dtype=float))
        return self.C * (2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))) ** self.power

    def second_derivative_at_zero(self) -> float:
        # cosh(x)^-p = 1 - p x^2/2 + O(x^4)
        return -self.C * self.power * self.nu**2


def cosh_params(A: float, q: float) -> CoshProfileParams:
    if q <= 2:
        raise ExponentOutOfRange(f"q must be > 2, got {q}")
    if not A > 0:
        raise NonPositiveCoefficient(f"A must be positive, got {A}")
    qq = q * q + 4.0
    B = 4.0 * q * A / qq
    nu = math.sqrt((q - 2.0) ** 2 * A / (2.0 * qq))
    C = (2.0 * q * (q + 2.0) * (3.0 * q - 2.0) * A * A / qq**2) ** (1.0 / (q - 2.0))
    return CoshProfileParams(nu=nu, C=C, q=float(q), A=float(A), B=B)


def explicit_profile(A: float, q: float, grid: Grid) -> tuple[CoshProfileParams, Profile]:
    cp = cosh_params(A, q)
    return cp, Profile(grid, cp(grid.nodes))


def explicit_radial_params(N: int, q: float) -> tuple[CoshProfileParams, float]:
    """Cosh parameters at A = gamma_N + 2 and the prefactor C~ = 2^{4/(q-2)} C."""
    if int(N) != N or N < 5:
        raise DimensionTooSmall(f"N must be an integer >= 5, got {N!r}")
    if not 2 < q <= critical_exponent(N):
        raise ExponentOutOfRange(f"need 2 < q <= 2** = {critical_exponent(N)}, got {q}")
    cp = cosh_params(gamma_N(N) + 2.0, q)
    return cp, 2.0 ** cp.power * cp.C


def explicit_radial(N: int, q: float, rmesh) -> RadialFunction:
    """Radial solution of the PDE at lambda = lambda(q):

    u(r) = C~ r^{(4-N)/2 + 4 nu/(q-2)} (1 + r^{2 nu})^{-4/(q-2)}.
    """
    cp, Ct = explicit_radial_params(N, q)
    r = np.asarray(rmesh, dtype=float)
    u = Ct * r ** ((4.0 - N) / 2.0 + cp.power * cp.nu) * (1.0 + r ** (2.0 * cp.nu)) ** (-cp.power)
    return RadialFunction(r, u, int(N), 0.0)


def explicit_lambda(N: int, q: float) -> float:
    return special_lambda(N, q)


def sobolev_extremal(N: int, rmesh) -> RadialFunction:
    """U(r) = (1 + r^2)^{(4-N)/2}."""
    if int(N) != N or N < 5:
        raise DimensionTooSmall(f"N must be an integer >= 5, got {N!r}")
    r = np.asarray(rmesh, dtype=float)
    return RadialFunction(r, (1.0 + r * r) ** ((4.0 - N) / 2.0), int(N), 0.0)


def _d1_log(u: np.ndarray, dt: float) -> np.ndarray:
    # fourth-order centred first derivative; loses two points at each end
    return (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * dt)


def _d2_log(u: np.ndarray, dt: float) -> np.ndarray:
    return (-u[:-4] + 16 * u[1:-3] - 30 * u[2:-2] + 16 * u[3:-1] - u[4:]) / (12 * dt * dt)


def radial_pde_residual(u: RadialFunction, lam: float, q: float) -> float:
    """Relative residual of Lap^2 u = lam |x|^-4 u + |x|^-beta |u|^{q-2} u on a
    log-uniform radial mesh, using fourth-order differences in t = log r.

    Both sides are multiplied by r^{(N+4)/2}, which makes them O(1) functions
    of t; the result is max|lhs - rhs| / max|lhs| over interior nodes.
    """
    N = u.N
    r, v = u.r, u.u
    t = np.log(r)
    dt = (t[-1] - t[0]) / (len(t) - 1)
    if not np.allclose(np.diff(t), dt, rtol=1e-8, atol=0):
        raise ValueError("radial mesh must be log-uniform")

    def lap(r_, f):
        return (_d2_log(f, dt) + (N - 2) * _d1_log(f, dt)) / r_[2:-2] ** 2

    lu = lap(r, v)
    r1 = r[2:-2]
    bilap = lap(r1, lu)
    rr = r1[2:-2]
    uu = v[4:-4]
    beta = N - q * (N - 4) / 2.0
    rhs = lam * uu / rr**4 + np.abs(uu) ** (q - 2) * uu / rr**beta
    scale = rr ** ((N + 4) / 2.0)
    lhs = scale * bilap
    return float(np.max(np.abs(lhs - scale * rhs)) / np.max(np.abs(lhs)))
