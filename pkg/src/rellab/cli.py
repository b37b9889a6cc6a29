"""Command-line front end.

    rellab constants --N 5 --q 3
    rellab solve --N 8 --q 3 --lambda 0
    rellab solve --A 6 --B 5 --q 4 --shoot
    rellab verify-explicit --A 13 --q 3 --N 5
    rellab sweep --N 5 --q 3 --lambdas -64 -32 0 1 --format csv
    rellab cone --N 5 --cone HalfSphere --t 2
    rellab selftest

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict
from datetime import datetime, timezone

import numpy as np

from rellab import __version__
from rellab.closed_form import explicit_profile, explicit_radial, radial_pde_residual
from rellab.cone import (
    ConeLabel,
    cone_constants,
    cone_from_label,
    counterexample_check,
    critical_power_profile,
    dyadic_radii,
    hardy_constant,
    random_bump_profile,
    shell_ratios,
    verify_hardy_samples,
)
from rellab.errors import NumericalError, ValidationError
from rellab.grid import DEFAULT_M, format_float, make_grid
from rellab.ground_state import (
    POSITIVITY_WARNING,
    Init,
    SolveOptions,
    aligned_distance,
    default_grid,
    diagnostics,
    hamiltonian_deviation,
    minimize_quotient,
    residual,
)
from rellab.params import (
    LAMBDA_Q_NOTE,
    breaking_thresholds,
    char_roots,
    critical_exponent,
    derive_problem,
    special_lambda,
    weighted_params,
)
from rellab.selftest import all_passed, run_selftest
from rellab.shooting import shoot
from rellab.symmetry import (
    SWEEP_HEADER,
    lambda_grid,
    second_variation_certificate,
    sweep_lambda,
    sweep_record_dict,
)

OVERRIDE_WARNING = "raw (A, B) given: they override the coefficients derived from N and lambda"


class UsageError(ValidationError):
    """Malformed command line."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for numerical failures here
    def error(self, message):
        raise UsageError(message)


class Result:
    """Payload plus the tabular form used by --format csv."""

    def __init__(self, payload, header=None, rows=None, records=None, ok=True):
        self.payload = payload
        self.header = header
        self.rows = rows
        self.records = records  # one JSONL line each; defaults to the envelope
        self.ok = ok


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if hasattr(x, "value") and hasattr(x, "name"):  # enums
        return x.value
    return x


# --- subcommands -----------------------------------------------------------


def cmd_constants(args, notes: list[str]) -> Result:
    N, q = args.N, args.q
    p = derive_problem(N, q, args.lam)
    out = {
        "N": p.N,
        "q": p.q,
        "lambda": p.lam,
        "gamma_N": p.gamma_N,
        "gamma_N_sq": p.gamma_N**2,
        "beta": p.beta,
        "two_star_star": p.two_star_star,
        "omega_N": p.omega_N,
        "A": p.A,
        "B_sq": p.B2,
    }
    if 2 < q <= critical_exponent(N):
        th = breaking_thresholds(N, q)
        out.update(
            lambda_q=special_lambda(N, q),
            lambda_q_printed=special_lambda(N, q, printed=True),
            lambda_basic=th.lambda_basic,
            lambda_improved=th.lambda_improved,
            q_min_improved=th.q_min_improved,
        )
        notes.append(LAMBDA_Q_NOTE)
    if args.alpha is not None:
        wp = weighted_params(N, args.alpha, q)
        out.update(
            alpha=wp.alpha,
            gamma_N_alpha=wp.gamma_N_alpha,
            gamma_bar_N_alpha=wp.gamma_bar_N_alpha,
            beta_alpha=wp.beta_alpha,
        )
    return Result(out, ("name", "value"), [(k, v) for k, v in out.items()])


def _solver_options(args) -> SolveOptions:
    return SolveOptions(max_iters=args.max_iters, grad_tol=args.grad_tol, init=Init(args.init), seed=args.seed)


def _resolve_coefficients(args, notes: list[str]):
    if (args.A is None) != (args.B is None):
        raise UsageError("--A and --B must be given together")
    if args.A is not None:
        if args.N is not None or args.lam is not None or args.alpha is not None:
            notes.append(OVERRIDE_WARNING)
        return char_roots(args.A, args.B, args.q), None
    if args.N is None:
        raise UsageError("give either --N (with --lambda or --alpha) or --A and --B")
    if args.alpha is not None:
        return weighted_params(args.N, args.alpha, args.q).coefficients(), None
    p = derive_problem(args.N, args.q, 0.0 if args.lam is None else args.lam)
    return p.coefficients(), p


def cmd_solve(args, notes: list[str]) -> Result:
    coeffs, p = _resolve_coefficients(args, notes)
    grid = default_grid(coeffs, args.M, args.L)
    gs, rep = minimize_quotient(coeffs, grid, _solver_options(args))
    out = gs.to_dict()
    out.update(iterations=rep.iterations, final_grad_norm=rep.final_grad_norm)
    if p is not None:
        v = second_variation_certificate(gs, p)
        out.update(N=p.N, **{"lambda": p.lam}, X=v.X, g_of_X=v.g_of_X, certified_breaking=v.certified_breaking)
    if args.shoot:
        out["shooting_distance"] = aligned_distance(shoot(coeffs, grid=grid), gs.profile)
    notes.extend(gs.warnings)
    if args.profile_out:
        gs.profile.to_csv(args.profile_out)
        out["profile_csv"] = args.profile_out
    return Result(out, ("s", "w"), list(zip(gs.profile.s, gs.profile.values)))


def cmd_verify_explicit(args, notes: list[str]) -> Result:
    A, q = args.A, args.q
    table = []
    prev = None
    for M in args.M_list:
        grid = make_grid(args.L, M)
        cp, w = explicit_profile(A, q, grid)
        c = char_roots(A, cp.B, q)
        res = residual(c, q, w)
        table.append((M, grid.h, res, math.nan if prev is None else prev / res))
        prev = res
    flags = diagnostics(w, c, q)
    out = {
        "A": A,
        "B": cp.B,
        "q": q,
        "nu": cp.nu,
        "C": cp.C,
        "second_derivative_at_zero": cp.second_derivative_at_zero(),
        "refinement": [dict(zip(("M", "h", "residual", "ratio"), row)) for row in table],
        "hamiltonian_dev": hamiltonian_deviation(w, c, q),
        "shape": asdict(flags),
    }
    if args.N is not None:
        r = np.exp(np.linspace(-args.radial_window, args.radial_window, args.radial_points))
        u = explicit_radial(args.N, q, r)
        out["radial"] = {
            "N": args.N,
            "lambda_q": special_lambda(args.N, q),
            "pde_residual": radial_pde_residual(u, special_lambda(args.N, q), q),
            "pde_residual_printed_lambda": radial_pde_residual(u, special_lambda(args.N, q, printed=True), q),
        }
        notes.append(LAMBDA_Q_NOTE)
    return Result(out, ("M", "h", "residual", "ratio"), table)


def cmd_sweep(args, notes: list[str]) -> Result:
    if args.lambdas is not None:
        lams = args.lambdas
    elif args.lambda_min is not None and args.lambda_max is not None:
        lams = lambda_grid(args.lambda_min, args.lambda_max, args.steps)
    else:
        raise UsageError("give --lambdas or both --lambda-min and --lambda-max")
    derive_problem(args.N, args.q, 0.0)  # validate N, q before launching workers
    if any(not derive_problem(args.N, args.q, lam).coefficients().positivity_guaranteed for lam in lams):
        notes.append(POSITIVITY_WARNING)
    recs = sweep_lambda(args.N, args.q, lams, args.M, args.L, _solver_options(args), args.workers)
    rows = [sweep_record_dict(r) for r in recs]
    failed = [r for r in recs if not r.ok]
    if failed:
        notes.append(f"{len(failed)} of {len(recs)} rows failed; see their error field")
    th = breaking_thresholds(args.N, args.q)
    return Result(
        {"thresholds": asdict(th), "rows": rows},
        SWEEP_HEADER,
        [[d[k] for k in SWEEP_HEADER] for d in rows],
        records=rows,
    )


def cmd_cone(args, notes: list[str]) -> Result:
    spec = cone_from_label(args.N, args.cone, args.lambda_sigma)
    hardy, rellich = cone_constants(spec)
    rng = np.random.default_rng(args.seed)
    samples = [random_bump_profile(rng, args.N) for _ in range(args.samples)]
    qmin = verify_hardy_samples(spec, samples)
    near = verify_hardy_samples(spec, [critical_power_profile(args.N, args.window, 8001)])
    rows = counterexample_check(args.N, args.t, dyadic_radii(1.0, args.shells))
    out = {
        "N": spec.N,
        "label": spec.label.value,
        "lambda_sigma": spec.lambda_sigma,
        "hardy": hardy,
        "rellich": rellich,
        "hardy_min_quotient_random": qmin,
        "hardy_quotient_critical_power": near,
        "hardy_holds": bool(qmin >= hardy_constant(spec) - 1e-8),
        "t": args.t,
        "counterexample": [asdict(r) for r in rows],
        "grad_shell_ratios": shell_ratios(rows, "grad_integral"),
        "bilap_shell_ratios": shell_ratios(rows, "bilap_integral"),
    }
    return Result(
        out,
        ("R", "grad_integral", "bilap_integral"),
        [(r.R, r.grad_integral, r.bilap_integral) for r in rows],
        records=[asdict(r) for r in rows],
    )


def cmd_selftest(args, notes: list[str]) -> Result:
    results = run_selftest()
    rows = [(name, bool(ok), detail) for name, ok, detail in results]
    payload = [{"check": n, "passed": ok, "detail": d} for n, ok, d in rows]
    return Result(payload, ("check", "passed", "detail"), rows, records=payload, ok=all_passed(results))


# --- parser ------------------------------------------------------------------


def _add_output(p):
    p.add_argument("--format", choices=("json", "jsonl", "csv"), default="json")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _add_solver(p):
    p.add_argument("--M", type=int, default=DEFAULT_M, help="grid points (odd)")
    p.add_argument("--L", type=float, default=None, help="half-width of the s-domain")
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--grad-tol", type=float, default=1e-10)
    p.add_argument("--init", choices=[i.value for i in Init], default=Init.CLOSED_FORM.value)
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rellab", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"rellab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="derived constants for (N, q, lambda)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=None)
    _add_output(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("solve", help="ground state at (N, q, lambda), (N, alpha, q) or raw (A, B, q)")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--B", type=float, default=None)
    p.add_argument("--shoot", action="store_true", help="also solve by shooting and report the distance")
    p.add_argument("--profile-out", default=None, help="write the profile (s, w) to this CSV")
    _add_solver(p)
    _add_output(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify-explicit", help="residuals of the closed-form solutions")
    p.add_argument("--A", type=float, default=13.0)
    p.add_argument("--q", type=float, default=3.0)
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--M-list", type=int, nargs="+", default=[1025, 2049, 4097, 8193])
    p.add_argument("--N", type=int, default=None, help="also check the radial PDE solution in dimension N")
    p.add_argument("--radial-window", type=float, default=20.0)
    p.add_argument("--radial-points", type=int, default=4001)
    _add_output(p)
    p.set_defaults(func=cmd_verify_explicit)

    p = sub.add_parser("sweep", help="symmetry certificates over a range of lambda")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--lambdas", type=float, nargs="*", default=None)
    p.add_argument("--lambda-min", type=float, default=None)
    p.add_argument("--lambda-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=9)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: REL_LAB_THREADS or CPU count)")
    _add_solver(p)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cone", help="Hardy/Rellich constants on a cone and the counterexample")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--cone", choices=[c.value for c in ConeLabel], default=ConeLabel.FULL_SPHERE.value)
    p.add_argument("--lambda-sigma", type=float, default=None)
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--shells", type=int, default=12, help="dyadic radii 1, 2, ..., 2^(shells-1)")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--window", type=float, default=40.0)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("selftest", help="fast end-to-end checks")
    _add_output(p)
    p.set_defaults(func=cmd_selftest)
    return ap


# --- output ------------------------------------------------------------------


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    if "lam" in cfg:
        cfg["lambda"] = cfg.pop("lam")
    return cfg


def _render(args, res: Result, notes: list[str]) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(res.header)
        for row in res.rows:
            out.writerow(["" if v is None else v if isinstance(v, str) else format_float(v) for v in row])
        return buf.getvalue()
    envelope = {
        "tool": "rellab",
        "version": __version__,
        "command": args.command,
        "config": _config(args),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "payload": res.payload,
        "warnings": notes,
    }
    if args.format == "jsonl":
        if res.records is None:
            return json.dumps(_jsonable(envelope), allow_nan=False) + "\n"
        return "".join(json.dumps(_jsonable(r), allow_nan=False) + "\n" for r in res.records)
    return json.dumps(_jsonable(envelope), indent=2, allow_nan=False) + "\n"


def run(argv=None) -> int:
    notes: list[str] = []
    try:
        args = build_parser().parse_args(argv)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = args.func(args, notes)
        notes.extend(str(w.message) for w in caught if issubclass(w.category, RuntimeWarning))
        notes = list(dict.fromkeys(notes))
        text = _render(args, res, notes)
    except (ValidationError, ValueError) as exc:
        print(f"rellab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"rellab: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for n in notes:
        print(f"rellab: warning: {n}", file=sys.stderr)
    return 0 if res.ok else 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
