"""Emden-Fowler transform between radial functions on R^N and profiles on R.

    u(x) = |x|^{(4-N-alpha)/2} w(-log|x|)

Radial meshes are log-uniform and exactly the image r = exp(-s) of a symmetric
`Grid`, so going back and forth is a relabelling with no interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from rellab.errors import MeshMismatch, ZeroDenominator
from rellab.grid import Grid, Profile, make_grid, quadratic_form, quadrature, write_columns
from rellab.params import ODECoefficients, ProblemParams


@dataclass(frozen=True, eq=False)
class RadialFunction:
    r: np.ndarray
    u: np.ndarray
    N: int
    alpha: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if r.shape != u.shape or r.ndim != 1:
            raise MeshMismatch("r and u must be 1-D arrays of equal length")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise MeshMismatch("radii must be positive and strictly increasing")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)

    @property
    def exponent(self) -> float:
        """Power p with u = r^p w(-log r)."""
        return (4.0 - self.N - self.alpha) / 2.0

    def to_csv(self, path) -> None:
        write_columns(path, ("r", "u"), (self.r, self.u))


def radial_mesh(grid: Grid) -> np.ndarray:
    """Increasing radii r_j = exp(-s) for the nodes of `grid`."""
    return np.exp(-grid.nodes[::-1])


def grid_from_mesh(r: np.ndarray) -> Grid:
    s = -np.log(np.asarray(r, dtype=float))[::-1]
    M = len(s)
    if M < 3 or M % 2 == 0:
        raise MeshMismatch(f"radial mesh needs an odd number >= 3 of points, got {M}")
    h = (s[-1] - s[0]) / (M - 1)
    grid = make_grid(0.5 * (s[-1] - s[0]) + h, M)
    if not np.allclose(grid.nodes, s, rtol=0, atol=1e-9 * max(1.0, grid.L)):
        raise MeshMismatch("radial mesh is not log-uniform and symmetric about r = 1")
    return grid


def ef_forward(u: RadialFunction, grid: Grid | None = None) -> Profile:
    if grid is None:
        grid = grid_from_mesh(u.r)
    elif len(u.r) != grid.M or not np.allclose(u.r, radial_mesh(grid), rtol=1e-12, atol=0):
        raise MeshMismatch("radial mesh does not match exp(-s) on the target grid")
    w = u.r ** (-u.exponent) * u.u
    return Profile(grid, w[::-1])


def ef_inverse(w: Profile, N: int, alpha: float = 0.0) -> RadialFunction:
    r = radial_mesh(w.grid)
    p = (4.0 - N - alpha) / 2.0
    return RadialFunction(r, r**p * w.values[::-1], N, alpha)


def ef_norms(w: Profile, p: ProblemParams, decay_tol: float = 1e-8) -> tuple[float, float, float]:
    """1-D integrals which, times omega_N, give int|Lap u|^2, int|x|^-4 u^2 and
    int|x|^-beta |u|^q for u = ef_inverse(w)."""
    w.check_decay(decay_tol)
    g = p.gamma_N
    dirichlet = quadratic_form(w.grid, g + 2.0, g * g, w.values)
    weighted_l2 = quadrature(w.grid, w.values**2)
    weighted_lq = quadrature(w.grid, np.abs(w.values) ** p.q)
    return dirichlet, weighted_l2, weighted_lq


Coefficients = Union[ProblemParams, ODECoefficients]


def rayleigh_quotient(w: Profile, p: Coefficients, q: float | None = None) -> float:
    """int(|w''|^2 + 2A|w'|^2 + B^2|w|^2) / (int|w|^q)^{2/q} with A, B^2 from `p`."""
    q = p.q if q is None else q
    if q is None:
        raise ValueError("exponent q is required")
    denom = quadrature(w.grid, np.abs(w.values) ** q)
    if not denom > 0:
        raise ZeroDenominator("profile has zero L^q norm")
    return quadratic_form(w.grid, p.A, p.B2, w.values) / denom ** (2.0 / q)
