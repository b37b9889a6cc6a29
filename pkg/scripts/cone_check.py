"""Cone constants, the Hardy quotient on random profiles, and the
counterexample energies on dyadic balls, for a range of dimensions.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from rellab.cone import (
    ConeSpec,
    cone_constants,
    counterexample_check,
    critical_power_profile,
    dyadic_radii,
    random_bump_profile,
    shell_ratios,
    verify_hardy_samples,
    write_counterexample_csv,
)


@dataclass
class ConeConfig:
    N_min: int = 5
    N_max: int = 8
    t: float = 2.0
    shells: int = 16
    samples: int = 100
    seed: int = 0
    out_prefix: str = "counterexample"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(ConeConfig()).items():
        kind = type(default)
        ap.add_argument(f"--{name.replace('_', '-')}", type=kind, default=default)
    cfg = ConeConfig(**vars(ap.parse_args()))
    rng = np.random.default_rng(cfg.seed)
    for N in range(cfg.N_min, cfg.N_max + 1):
        for spec in (ConeSpec.full_sphere(N), ConeSpec.half_sphere(N)):
            hardy, rellich = cone_constants(spec)
            qmin = verify_hardy_samples(spec, [random_bump_profile(rng, N) for _ in range(cfg.samples)])
            qcrit = verify_hardy_samples(spec, [critical_power_profile(N, 40.0, 8001)])
            print(
                f"N={N} {spec.label.value:10s} hardy={hardy:.4f} rellich={rellich:.4f} "
                f"min random quotient={qmin:.4f} critical-power quotient={qcrit:.4f}"
            )
        rows = counterexample_check(N, cfg.t, dyadic_radii(1.0, cfg.shells))
        g = shell_ratios(rows, "grad_integral")[-1]
        b = shell_ratios(rows, "bilap_integral")[-1]
        path = f"{cfg.out_prefix}_N{N}.csv"
        write_counterexample_csv(path, rows)
        print(f"  t={cfg.t}: shell ratios gradient {g:.5f} (2^(t-2)={2 ** (cfg.t - 2):.5f}), "
              f"bilaplacian {b:.5f} (2^(t-4)={2 ** (cfg.t - 4):.5f}); wrote {path}")


if __name__ == "__main__":
    main()
