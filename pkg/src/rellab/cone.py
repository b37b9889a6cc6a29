"""Hardy and Rellich constants on cones, and a function with finite bi-Laplacian
energy but infinite Dirichlet energy.

A cone is described only through N and lambda_sigma, the bottom Dirichlet
eigenvalue of the Laplace-Beltrami operator on its spherical cross-section.
For u = f(r) phi(sigma) the Hardy quotient reduces to

    int r^{N-3}(|f'|^2 + lambda_sigma f^2/r^2) dr / int r^{N-5} f^2 dr,

which in t = log r, f(r) = g(t), reads int e^{(N-4)t} g'^2 / int e^{(N-4)t} g^2
+ lambda_sigma.  Profiles are therefore given on log-uniform meshes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicSpline

from rellab.errors import (
    ConeConditionViolated,
    DimensionTooSmall,
    MeshMismatch,
    NonIntegrableProfile,
    ParameterOutOfRange,
)
from rellab.grid import write_columns
from rellab.params import gamma_N, sphere_area


class ConeLabel(enum.Enum):
    FULL_SPHERE = "FullSphere"
    HALF_SPHERE = "HalfSphere"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class ConeSpec:
    N: int
    lambda_sigma: float
    label: ConeLabel = ConeLabel.CUSTOM

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise DimensionTooSmall(f"N must be an integer >= 2, got {self.N!r}")
        if not (math.isfinite(self.lambda_sigma) and self.lambda_sigma >= 0):
            raise ParameterOutOfRange(f"lambda_sigma must be finite and >= 0, got {self.lambda_sigma}")

    @classmethod
    def full_sphere(cls, N: int) -> "ConeSpec":
        return cls(N, 0.0, ConeLabel.FULL_SPHERE)

    @classmethod
    def half_sphere(cls, N: int) -> "ConeSpec":
        return cls(N, float(N - 1), ConeLabel.HALF_SPHERE)

    @classmethod
    def custom(cls, N: int, lambda_sigma: float) -> "ConeSpec":
        return cls(N, float(lambda_sigma), ConeLabel.CUSTOM)

    @property
    def rellich_admissible(self) -> bool:
        return gamma_N(self.N) + self.lambda_sigma > 0


def cone_from_label(N: int, label: str, lambda_sigma: float | None = None) -> ConeSpec:
    lab = ConeLabel(label)
    if lab is ConeLabel.FULL_SPHERE:
        return ConeSpec.full_sphere(N)
    if lab is ConeLabel.HALF_SPHERE:
        return ConeSpec.half_sphere(N)
    if lambda_sigma is None:
        raise ParameterOutOfRange("a Custom cone needs lambda_sigma")
    return ConeSpec.custom(N, lambda_sigma)


def hardy_constant(spec: ConeSpec) -> float:
    return ((spec.N - 4) / 2.0) ** 2 + spec.lambda_sigma


def cone_constants(spec: ConeSpec) -> tuple[float, float]:
    """(Hardy, Rellich) constants; Rellich needs gamma_N + lambda_sigma > 0."""
    shift = gamma_N(spec.N) + spec.lambda_sigma
    if not shift > 0:
        raise ConeConditionViolated(f"gamma_N + lambda_sigma = {shift} must be > 0")
    return hardy_constant(spec), shift * shift


# --- Hardy quotient on separable test functions ---------------------------


def _log_mesh(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or len(r) < 5 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise MeshMismatch("radii must be a positive increasing 1-D array with at least 5 points")
    t = np.log(r)
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-8, atol=0):
        raise MeshMismatch("radial mesh must be log-uniform")
    return t


def _as_rf(profile) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(profile, "r"):
        return np.asarray(profile.r, float), np.asarray(getattr(profile, "u", getattr(profile, "f", None)), float)
    r, f = profile
    return np.asarray(r, float), np.asarray(f, float)


def hardy_quotient(spec: ConeSpec, r, f, vanish_tol: float = 1e-6) -> float:
    """Reduced Hardy quotient of f(r) phi(sigma) on the cone."""
    t = _log_mesh(r)
    g = np.asarray(f, dtype=float)
    if g.shape != t.shape:
        raise MeshMismatch("profile and mesh lengths differ")
    k = spec.N - 4.0
    # the weighted integrands must vanish at both ends of the window
    scaled = np.exp(0.5 * k * t) * g
    peak = np.max(np.abs(scaled))
    if not peak > 0:
        raise NonIntegrableProfile("profile is identically zero")
    if max(abs(scaled[0]), abs(scaled[-1])) > vanish_tol * peak:
        raise NonIntegrableProfile("profile does not vanish at the ends of the radial window")
    dg = CubicSpline(t, g)(t, 1)
    wgt = np.exp(k * (t - t[np.argmax(np.abs(scaled))]))  # shift keeps exp() in range
    num = simpson(wgt * dg * dg, x=t)
    den = simpson(wgt * g * g, x=t)
    return float(num / den) + spec.lambda_sigma


def verify_hardy_samples(spec: ConeSpec, radial_profiles: Iterable) -> float:
    """Smallest reduced Hardy quotient over the supplied (r, f) profiles."""
    vals = [hardy_quotient(spec, *_as_rf(p)) for p in radial_profiles]
    if not vals:
        raise ValueError("no profiles supplied")
    return min(vals)


def critical_power_profile(N: int, window: float, n: int = 4001, ramp: float | None = None):
    """r^{(4-N)/2} cut off smoothly outside |log r| < window.

    Returns (r, f).  The excess of the Hardy quotient over the constant is
    about int|cut'|^2 / int cut^2 ~ 1/(ramp * window), so the ramp defaults
    to half the window.
    """
    ramp = 0.5 * window if ramp is None else ramp
    t = np.linspace(-window - ramp, window + ramp, n)
    x = (np.abs(t) - window) / ramp
    cut = np.where(x <= 0, 1.0, np.where(x >= 1, 0.0, 0.5 * (1 + np.cos(np.pi * np.clip(x, 0, 1)))))
    cut = cut**2  # C^2 at the junctions
    return np.exp(t), np.exp(-0.5 * (N - 4) * t) * cut


def random_bump_profile(rng: np.random.Generator, N: int, n: int = 3001, half_window: float = 12.0):
    """Sum of a few Gaussians in log r, with random centres, widths and signs."""
    t = np.linspace(-half_window, half_window, n)
    g = np.zeros_like(t)
    for _ in range(int(rng.integers(1, 5))):
        c = rng.uniform(-3.0, 3.0)
        w = rng.uniform(0.3, 1.5)
        g += rng.uniform(-1.0, 1.0) * np.exp(-(((t - c) / w) ** 2))
    if not np.any(g):
        g = np.exp(-(t**2))
    return np.exp(t), g


# --- counterexample v = (1 + r^2)^{(t-N)/4} --------------------------------


@dataclass(frozen=True)
class CounterexampleRow:
    R: float
    grad_integral: float
    bilap_integral: float


def _grad_density(r, N, p):
    # r^{N-1} |v'|^2 with v' = 2 p r (1+r^2)^{p-1}
    return r ** (N - 1) * (2 * p * r) ** 2 * (1 + r * r) ** (2 * p - 2)


def _lap_density(r, N, p):
    # Lap v = 2p (1+r^2)^{p-2} (N + (N + 2p - 2) r^2)
    lap = 2 * p * (1 + r * r) ** (p - 2) * (N + (N + 2 * p - 2) * r * r)
    return r ** (N - 1) * lap * lap


def counterexample_check(N: int, t: float, R_list: Sequence[float]) -> list[CounterexampleRow]:
    """int_{B_R}|grad v|^2 and int_{B_R}|Lap v|^2 for each R (sorted ascending)."""
    if int(N) != N or N < 5:
        raise DimensionTooSmall(f"N must be an integer >= 5, got {N!r}")
    if not 2 <= t < 4:
        raise ParameterOutOfRange(f"t must lie in [2, 4), got {t}")
    Rs = sorted(float(R) for R in R_list)
    if any(R <= 0 for R in Rs):
        raise ParameterOutOfRange("radii must be positive")
    p = (t - N) / 4.0
    omega = sphere_area(int(N))

    def shell(density, a, b):
        # integrate in log r on [1, b]-type shells, where the densities are power-like
        if a < 1.0 < b:
            return shell(density, a, 1.0) + shell(density, 1.0, b)
        if b <= 1.0:
            val, _ = quad(density, a, b, args=(N, p), epsabs=0, epsrel=1e-12, limit=200)
            return val
        val, _ = quad(
            lambda s: density(math.exp(s), N, p) * math.exp(s),
            math.log(a), math.log(b), epsabs=0, epsrel=1e-12, limit=200,
        )
        return val

    rows = []
    grad = lap = 0.0
    prev = 0.0
    for R in Rs:
        grad += shell(_grad_density, prev, R)
        lap += shell(_lap_density, prev, R)
        prev = R
        rows.append(CounterexampleRow(R, omega * grad, omega * lap))
    return rows


def dyadic_radii(R0: float = 1.0, count: int = 12) -> list[float]:
    return [R0 * 2.0**k for k in range(count)]


def shell_increments(rows: Sequence[CounterexampleRow], attr: str) -> np.ndarray:
    v = np.array([getattr(r, attr) for r in rows])
    return np.diff(v)


def shell_ratios(rows: Sequence[CounterexampleRow], attr: str) -> np.ndarray:
    """Ratios of consecutive shell contributions; -> 2^{t-2} for the gradient
    and 2^{t-4} for the Laplacian on dyadic radii."""
    inc = shell_increments(rows, attr)
    return inc[1:] / inc[:-1]


def write_counterexample_csv(path, rows: Sequence[CounterexampleRow]) -> None:
    write_columns(
        path,
        ("R", "grad_integral", "bilap_integral"),
        ([r.R for r in rows], [r.grad_integral for r in rows], [r.bilap_integral for r in rows]),
    )
