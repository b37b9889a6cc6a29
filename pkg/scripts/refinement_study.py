"""Grid-refinement study for the cosh profile and the gradient-flow solver.

For each M the script records the closed-form ODE residual, its Hamiltonian
deviation, and the distance between the numerical minimizer and the closed
form.  Output is a CSV ready for plotting against h.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from rellab.closed_form import explicit_profile
from rellab.grid import make_grid, write_columns
from rellab.ground_state import aligned_distance, hamiltonian_deviation, minimize_quotient, residual
from rellab.params import char_roots


@dataclass
class RefinementConfig:
    A: float = 13.0
    q: float = 3.0
    L: float = 20.0
    M_list: list[int] = field(default_factory=lambda: [513, 1025, 2049, 4097, 8193, 16385])
    out: str = "refinement.csv"


def run(cfg: RefinementConfig) -> list[tuple]:
    rows = []
    for M in cfg.M_list:
        grid = make_grid(cfg.L, M)
        cp, w = explicit_profile(cfg.A, cfg.q, grid)
        c = char_roots(cfg.A, cp.B, cfg.q)
        gs, _ = minimize_quotient(c, grid)
        rows.append((M, grid.h, residual(c, cfg.q, w), hamiltonian_deviation(w, c, cfg.q), aligned_distance(gs.profile, w)))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--A", type=float, default=RefinementConfig.A)
    ap.add_argument("--q", type=float, default=RefinementConfig.q)
    ap.add_argument("--L", type=float, default=RefinementConfig.L)
    ap.add_argument("--M-list", type=int, nargs="+", default=None)
    ap.add_argument("--out", default=RefinementConfig.out)
    a = ap.parse_args()
    cfg = RefinementConfig(a.A, a.q, a.L, a.M_list or RefinementConfig().M_list, a.out)
    rows = run(cfg)
    write_columns(cfg.out, ("M", "h", "residual", "hamiltonian_dev", "solver_distance"), list(zip(*rows)))
    prev = None
    for M, h, res, ham, dist in rows:
        ratio = "" if prev is None else f"  ratio {prev / res:.3f}"
        print(f"M={M:6d} h={h:.3e} residual={res:.3e} H-dev={ham:.3e} solver-dist={dist:.2e}{ratio}")
        prev = res
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    main()
