"""Uniform grid on [-L, L] with clamped finite differences.

Values outside the M interior nodes are taken to be zero (w = w' = 0 at the
ends), which is harmless for profiles that decay like exp(-sqrt(c_-)|s|).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded

from rellab.errors import BadGridSpec, BoundaryDecayViolated, GridMismatch

DEFAULT_M = 4097


@dataclass(frozen=True, eq=False)
class Grid:
    L: float
    M: int
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h = 2.0 * self.L / (self.M + 1)
        nodes = -self.L + h * np.arange(1, self.M + 1)
        # exact symmetry: s_i = -s_{M+1-i}, centre node exactly 0
        nodes = 0.5 * (nodes - nodes[::-1])
        nodes.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)

    @property
    def center(self) -> int:
        return self.M // 2

    def __eq__(self, other):
        return isinstance(other, Grid) and (self.L, self.M) == (other.L, other.M)

    def __hash__(self):
        return hash((self.L, self.M))


def make_grid(L: float, M: int = DEFAULT_M) -> Grid:
    if not (math.isfinite(L) and L > 0):
        raise BadGridSpec(f"L must be positive, got {L}")
    if int(M) != M or M < 3 or M % 2 == 0:
        raise BadGridSpec(f"M must be an odd integer >= 3, got {M}")
    return Grid(float(L), int(M))


def default_half_width(decay_rate: float) -> float:
    """max(30/decay_rate, 20): boundary values below ~1e-12 of the peak."""
    return max(30.0 / decay_rate, 20.0)


@dataclass(frozen=True, eq=False)
class Profile:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.M,):
            raise GridMismatch(f"expected {self.grid.M} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def s(self) -> np.ndarray:
        return self.grid.nodes

    def scaled(self, c: float) -> "Profile":
        return Profile(self.grid, c * self.values)

    def boundary_ratio(self) -> float:
        peak = np.max(np.abs(self.values))
        if peak == 0:
            return 0.0
        return max(abs(self.values[0]), abs(self.values[-1])) / peak

    def check_decay(self, tol: float = 1e-8) -> None:
        r = self.boundary_ratio()
        if r > tol:
            raise BoundaryDecayViolated(f"boundary/peak ratio {r:.3e} exceeds {tol:.1e}; enlarge L")

    def to_csv(self, path) -> None:
        write_columns(path, ("s", "w"), (self.s, self.values))


def _same_grid(grid: Grid, w) -> np.ndarray:
    if isinstance(w, Profile):
        if w.grid != grid:
            raise GridMismatch("profile lives on a different grid")
        return w.values
    w = np.asarray(w)
    if w.shape != (grid.M,):
        raise GridMismatch(f"expected {grid.M} samples, got shape {w.shape}")
    return w


def _pad(w: np.ndarray, k: int) -> np.ndarray:
    return np.pad(w, k)


def d4(grid: Grid, w, dtype=float) -> np.ndarray:
    w = np.asarray(_same_grid(grid, w), dtype=dtype)
    h = dtype(grid.h)
    p = _pad(w, 2)
    return (p[:-4] - 4 * p[1:-3] + 6 * p[2:-2] - 4 * p[3:-1] + p[4:]) / h**4


def d2(grid: Grid, w, dtype=float) -> np.ndarray:
    w = np.asarray(_same_grid(grid, w), dtype=dtype)
    h = dtype(grid.h)
    p = _pad(w, 1)
    return (p[:-2] - 2 * p[1:-1] + p[2:]) / h**2


def apply_L(grid: Grid, A: float, B2: float, w, dtype=float) -> np.ndarray:
    """w'''' - 2A w'' + B^2 w with 5- and 3-point stencils, zero extension."""
    vals = np.asarray(_same_grid(grid, w), dtype=dtype)
    return d4(grid, vals, dtype) - 2 * dtype(A) * d2(grid, vals, dtype) + dtype(B2) * vals


def apply_L_profile(grid: Grid, A: float, B2: float, w: Profile) -> Profile:
    return Profile(grid, apply_L(grid, A, B2, w))


def forward_difference(grid: Grid, w) -> np.ndarray:
    """Dw on the M+1 cells, including the two cells touching the zero boundary."""
    return np.diff(_pad(_same_grid(grid, w), 1)) / grid.h


def second_difference_ext(grid: Grid, w) -> np.ndarray:
    """D^2 w on the M+2 nodes s_0..s_{M+1}; matched so that sum|D^2 w|^2 = w.D4 w."""
    p = _pad(_same_grid(grid, w), 2)
    return (p[:-2] - 2 * p[1:-1] + p[2:]) / grid.h**2


def quadrature(grid: Grid, f) -> float:
    """Trapezoid rule with zero values at s = +-L."""
    return grid.h * float(np.sum(_same_grid(grid, f)))


def quadratic_form(grid: Grid, A: float, B2: float, w) -> float:
    """sum(|D^2w|^2 + 2A|Dw|^2 + B^2|w|^2) h as a sum of squares (no cancellation)."""
    w = _same_grid(grid, w)
    dd = second_difference_ext(grid, w)
    d1 = forward_difference(grid, w)
    return grid.h * float(dd @ dd + 2 * A * (d1 @ d1) + B2 * (w @ w))


class BandedOperator:
    """Cholesky factor of the pentadiagonal matrix of apply_L, for repeated solves."""

    def __init__(self, grid: Grid, A: float, B2: float):
        self.grid, self.A, self.B2 = grid, A, B2
        h, M = grid.h, grid.M
        ab = np.zeros((3, M))
        ab[2] = 6 / h**4 + 4 * A / h**2 + B2
        ab[1, 1:] = -4 / h**4 - 2 * A / h**2
        ab[0, 2:] = 1 / h**4
        self._chol = cholesky_banded(ab)

    def solve(self, rhs: np.ndarray, refine: int = 1) -> np.ndarray:
        # refinement uses an extended-precision residual; the plain solve
        # is limited to cond(L) * eps ~ 1e-9
        z = cho_solve_banded((self._chol, False), rhs)
        for _ in range(refine):
            r = np.asarray(rhs, dtype=np.longdouble) - apply_L(self.grid, self.A, self.B2, z, np.longdouble)
            z = z + cho_solve_banded((self._chol, False), r.astype(float))
        return z


def write_columns(path, header, columns) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([format_float(x) for x in row])


def format_float(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def read_profile_csv(path) -> Profile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    s = data[:, 0]
    h = (s[-1] - s[0]) / (len(s) - 1)
    L = 0.5 * (s[-1] - s[0]) + h
    grid = make_grid(L, data.shape[0])
    if not np.allclose(grid.nodes, data[:, 0], rtol=0, atol=1e-9 * max(1.0, L)):
        raise GridMismatch("CSV nodes do not match a uniform symmetric grid")
    return Profile(grid, data[:, 1])
