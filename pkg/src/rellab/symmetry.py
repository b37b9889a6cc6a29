"""Second-variation test for symmetry breaking of radial extremals.

For a radial ground state u at (N, q, lambda) let

    X^2 = int|Lap u|^2 / int|x|^{-4} u^2,

which after the Emden-Fowler transform is a 1-D quotient of the profile w.
Perturbing u in the direction of a first spherical harmonic lowers the
energy unless g(X) <= 0 with

    g(t) = (q-2) t^2 - 2(N-1) t - ((N-1)^2 + lambda (q-2)),

so g(X) > 0 certifies that the radial minimiser is not a global one.
"""

from __future__ import annotations

import csv
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from rellab.errors import RellabError, ZeroDenominator
from rellab.grid import DEFAULT_M, format_float, quadratic_form, quadrature
from rellab.ground_state import GroundState, SolveOptions, solve_radial
from rellab.params import BreakingThresholds, ProblemParams, breaking_thresholds, derive_problem

THREADS_ENV = "REL_LAB_THREADS"
SWEEP_HEADER = ("lambda", "I", "X", "g_of_X", "certified_breaking")


@dataclass(frozen=True)
class SymmetryVerdict:
    X: float
    g_of_X: float
    certified_breaking: bool
    lam: float
    thresholds: BreakingThresholds


@dataclass(frozen=True)
class SweepRecord:
    lam: float
    I_value: float
    X: float
    g_of_X: float
    certified_breaking: Optional[bool]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def rellich_quotient_sq(gs: GroundState, p: ProblemParams) -> float:
    """X^2 in profile form.  The numerator carries gamma_N^2, not gamma_N^2 - lambda:
    X is the pure Rellich quotient of u, whatever lambda produced u."""
    w = gs.profile
    g = p.gamma_N
    den = quadrature(w.grid, w.values**2)
    if not den > 0:
        raise ZeroDenominator("profile has zero L^2 norm")
    return quadratic_form(w.grid, g + 2.0, g * g, w.values) / den


def compute_X(gs: GroundState, p: ProblemParams) -> float:
    return math.sqrt(rellich_quotient_sq(gs, p))


def certificate_polynomial(t: float, N: int, q: float, lam: float) -> float:
    return (q - 2.0) * t * t - 2.0 * (N - 1) * t - ((N - 1) ** 2 + lam * (q - 2.0))


def second_variation_certificate(gs: GroundState, p: ProblemParams) -> SymmetryVerdict:
    X = compute_X(gs, p)
    g = certificate_polynomial(X, p.N, p.q, p.lam)
    return SymmetryVerdict(X, g, bool(g > 0), p.lam, breaking_thresholds(p.N, p.q))


def _sweep_row(args) -> SweepRecord:
    N, q, lam, M, L, opts = args
    try:
        p = derive_problem(N, q, lam)
        with warnings.catch_warnings():
            # the positivity caveat is reported once per sweep by the caller
            warnings.simplefilter("ignore", RuntimeWarning)
            gs, _ = solve_radial(p, M, L, opts)
        v = second_variation_certificate(gs, p)
        return SweepRecord(lam, gs.I_value, v.X, v.g_of_X, v.certified_breaking)
    except RellabError as exc:
        return SweepRecord(lam, math.nan, math.nan, math.nan, None, f"{type(exc).__name__}: {exc}")


def worker_count(n_tasks: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, min(n, n_tasks))


def sweep_lambda(
    N: int,
    q: float,
    lambdas: Iterable[float],
    M: int = DEFAULT_M,
    L: float | None = None,
    opts: SolveOptions = SolveOptions(),
    workers: int | None = None,
) -> list[SweepRecord]:
    """One certificate per lambda, sorted by lambda.  Failed solves are kept as
    rows with `error` set instead of aborting the sweep."""
    lams = sorted(float(x) for x in lambdas)
    tasks = [(N, q, lam, M, L, opts) for lam in lams]
    if not tasks:
        return []
    n = worker_count(len(tasks)) if workers is None else max(1, workers)
    if n == 1:
        return [_sweep_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_sweep_row, tasks))


def lambda_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps <= 0:
        return np.empty(0)
    if steps == 1:
        return np.array([float(lo)])
    return np.linspace(lo, hi, steps)


def _row_values(r: SweepRecord) -> list:
    return [r.lam, r.I_value, r.X, r.g_of_X, r.certified_breaking]


def write_sweep_csv(path, records: Sequence[SweepRecord]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(SWEEP_HEADER)
        for r in records:
            out.writerow(["" if v is None else format_float(v) for v in _row_values(r)])


def sweep_record_dict(r: SweepRecord) -> dict:
    d = dict(zip(SWEEP_HEADER, _row_values(r)))
    d = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}
    if r.error is not None:
        d["error"] = r.error
    return d


def write_sweep_jsonl(path, records: Sequence[SweepRecord]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(sweep_record_dict(r)) + "\n")


def verdict_dict(v: SymmetryVerdict) -> dict:
    d = asdict(v)
    d["lambda"] = d.pop("lam")
    return d
