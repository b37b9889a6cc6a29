"""Sweep lambda at fixed (N, q) and record the symmetry-breaking certificate.

Rows go to CSV with columns lambda, I, X, g_of_X, certified_breaking.  The
printed summary marks the first lambda (from above) at which breaking is
certified, next to the analytic thresholds.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from rellab.params import breaking_thresholds
from rellab.symmetry import lambda_grid, sweep_lambda, write_sweep_csv


@dataclass
class SweepConfig:
    N: int = 5
    q: float = 3.0
    lambda_min: float = -64.0
    lambda_max: float = 0.0
    steps: int = 33
    M: int = 4097
    workers: int | None = None
    out: str = "sweep.csv"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(SweepConfig()).items():
        kind = int if name in ("N", "steps", "M", "workers") else str if name == "out" else float
        ap.add_argument(f"--{name.replace('_', '-')}", type=kind, default=default)
    cfg = SweepConfig(**vars(ap.parse_args()))
    rows = sweep_lambda(cfg.N, cfg.q, lambda_grid(cfg.lambda_min, cfg.lambda_max, cfg.steps), cfg.M, workers=cfg.workers)
    write_sweep_csv(cfg.out, rows)
    th = breaking_thresholds(cfg.N, cfg.q)
    certified = [r.lam for r in rows if r.certified_breaking]
    print(f"N={cfg.N} q={cfg.q}: lambda_basic={th.lambda_basic:.6g} lambda_improved={th.lambda_improved}")
    print(f"largest certified lambda on this grid: {max(certified) if certified else 'none'}")
    failed = [r for r in rows if not r.ok]
    if failed:
        print(f"{len(failed)} rows failed, for example: {failed[0].error}")
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    main()
