"""Command-line entry point.

Subcommands: solve, check, project, spectrum, profile. Exit codes:
0 success, 2 solve hit the iteration cap, 64 malformed configuration or
invalid model, 74 file I/O failure, 1 diagnostics failures.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import RunConfig, parse_config
from .diagnostics import run_suite
from .errors import ConfigError, DiracgsError, ModelValidationError
from .field import lambda_table
from .io import (read_field, write_field, write_profile, write_report,
                 write_summary, write_trace)
from .model import validate_model
from .nehari import InnerOptions, fiber_point_field, inner_maximize, nehari_residual
from .solver import minimize_ground_state

EX_OK = 0
EX_MAXITER = 2
EX_CONFIG = 64
EX_IO = 74


def _load(config_path: str, force: bool) -> tuple[RunConfig, object]:
    cfg = parse_config(config_path)
    model = cfg.build_model()
    if not force:
        validate_model(model)
    return cfg, model


def _cmd_solve(args: argparse.Namespace) -> int:
    cfg, model = _load(args.config, args.force)
    result = minimize_ground_state(model, cfg.build_options())
    out = cfg.output_dir
    try:
        write_field(out / "field.bin", result.u_star, model.a)
        write_summary(out / "summary.json", result, cfg.raw)
        write_trace(out / "trace.csv", result.trace)
        write_profile(out / "profile.csv", result.u_star)
    except OSError as exc:
        print(f"error: writing outputs failed: {exc}", file=sys.stderr)
        return EX_IO
    status = "converged" if result.converged else "hit max_outer"
    print(f"{status}: c={result.c:.10e} residual_full={result.residual_full:.3e} "
          f"iterations={result.iterations} t_check={result.t_check:.6f}")
    print(f"outputs in {out}")
    return EX_OK if result.converged else EX_MAXITER


def _cmd_check(args: argparse.Namespace) -> int:
    cfg, model = _load(args.config, True)
    report = run_suite(model, seed=cfg.seed)
    try:
        write_report(cfg.output_dir / "report.json", report.to_json())
    except OSError as exc:
        print(f"error: writing report failed: {exc}", file=sys.stderr)
        return EX_IO
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} "
              f"(margin {c.margin:.3e}, tol {c.tolerance:.3e})")
    print(f"report in {cfg.output_dir / 'report.json'}")
    return EX_OK if report.all_pass else 1


def _cmd_project(args: argparse.Namespace) -> int:
    cfg, model = _load(args.config, True)
    try:
        u, a_stored = read_field(args.field)
    except (OSError, ValueError) as exc:
        print(f"error: reading field failed: {exc}", file=sys.stderr)
        return EX_IO
    if u.grid != model.grid:
        print(f"error: field grid n={u.grid.n}, L={u.grid.L} does not match "
              f"config grid n={model.grid.n}, L={model.grid.L}", file=sys.stderr)
        return EX_CONFIG
    if a_stored != model.a:
        print(f"warning: field stored with a={a_stored}, config a={model.a}",
              file=sys.stderr)
    opts = InnerOptions(tol_inner=cfg.tol_inner, starts=2,
                        unique_tol=cfg.unique_tol, seed=cfg.seed)
    point, value, iters = inner_maximize(u, model, opts)
    res = nehari_residual(fiber_point_field(u, point, model), model)
    print(f"t_star={point.t:.10f} value={value:.10e} "
          f"r_self={res.r_self:.3e} r_minus={res.r_minus:.3e} "
          f"inner_iters={iters}")
    return EX_OK


def _cmd_spectrum(args: argparse.Namespace) -> int:
    cfg, model = _load(args.config, True)
    lam = lambda_table(model.grid, model.a)
    k_nyq = np.pi * (model.grid.n // 2) / model.grid.L
    print(f"lambda_min={float(np.min(lam)):.10e}")
    print(f"lambda_max={float(np.max(lam)):.10e}")
    print(f"lambda_nyquist_corner={np.sqrt(model.a ** 2 + 3 * k_nyq ** 2):.10e}")
    print(f"modes={model.grid.n ** 3}")
    print(f"modes_below_2a={int(np.sum(lam < 2 * model.a))}")
    return EX_OK


def _cmd_profile(args: argparse.Namespace) -> int:
    try:
        u, _ = read_field(args.field)
    except (OSError, ValueError) as exc:
        print(f"error: reading field failed: {exc}", file=sys.stderr)
        return EX_IO
    from .io import radial_profile

    print("r,mean_abs_u,max_abs_u")
    for r, mean_v, max_v in radial_profile(u):
        print(f"{r:.6e},{mean_v:.8e},{max_v:.8e}")
    return EX_OK


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diracgs",
                                 description="Ground states of a nonlinear "
                                 "Dirac equation on a periodic box")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimize and write outputs")
    p.add_argument("config")
    p.add_argument("--force", action="store_true",
                   help="skip model validation")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("check", help="run the diagnostics suite")
    p.add_argument("config")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("project", help="fiber-maximize a stored field")
    p.add_argument("config")
    p.add_argument("field")
    p.set_defaults(fn=_cmd_project)

    p = sub.add_parser("spectrum", help="print operator spectrum facts")
    p.add_argument("config")
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("profile", help="radial profile of a stored field")
    p.add_argument("field")
    p.set_defaults(fn=_cmd_profile)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ModelValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_IO
    except DiracgsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
