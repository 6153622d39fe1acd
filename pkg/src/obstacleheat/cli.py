"""Command-line front end.

Subcommands: ``geometry`` (inspect the shell layout), ``solve`` (one case,
with snapshot dump), ``sweep`` (strength sweep with CSV/JSON reports),
``verify`` (run the built-in verification suite), ``fit`` (refit an existing
sweep table).  Every flag overrides the matching config-file key.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bounds
from . import config as config_mod
from .backend import backend_name
from .discretize import grid_for_domain
from .geometry import constant_a, shell_family
from .harness import (
    SweepConfig,
    case_from_config,
    fit_from_csv,
    run_case,
    run_sweep,
    write_case_json,
)
from .observables import region_series


def _load_cfg(args) -> dict:
    if getattr(args, "config", None):
        cfg = config_mod.load_config(args.config)
    else:
        cfg = config_mod.reference_config(getattr(args, "dim", 2) or 2)
    overrides = {
        "grid.cells": getattr(args, "cells", None),
        "solve.theta": getattr(args, "theta", None),
        "solve.dt": getattr(args, "dt", None),
        "solve.horizon": getattr(args, "horizon", None),
        "solve.cg_rel_tol": getattr(args, "cg_tol", None),
        "solve.dense_until": getattr(args, "dense_until", None),
        "initial.ramp_width": getattr(args, "ramp_width", None),
        "initial.amplitude": getattr(args, "amplitude", None),
        "bounds.nu": getattr(args, "nu", None),
        "bounds.gamma": getattr(args, "gamma", None),
        "bounds.mv_gamma": getattr(args, "mv_gamma", None),
        "case.lam": getattr(args, "lam", None),
        "case.label": getattr(args, "label", None),
        "sweep.out_dir": getattr(args, "out_dir", None),
    }
    if getattr(args, "lambdas", None):
        overrides["sweep.lambdas"] = [
            float(tok) for tok in args.lambdas.split(",") if tok.strip()
        ]
    return config_mod.apply_overrides(cfg, overrides)


def _add_common(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--dim", type=int, choices=(2, 3),
                   help="reference geometry dimension when no config is given")
    p.add_argument("--cells", type=int, help="cells per axis")
    p.add_argument("--lam", type=float, help="absorption strength")
    p.add_argument("--theta", type=float, help="scheme parameter in [1/2, 1]")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--horizon", type=float, help="final time")
    p.add_argument("--cg-tol", type=float, dest="cg_tol",
                   help="relative CG residual tolerance")
    p.add_argument("--dense-until", type=float, dest="dense_until",
                   help="record every step up to this time")
    p.add_argument("--ramp-width", type=float, dest="ramp_width",
                   help="initial-data ramp width")
    p.add_argument("--amplitude", type=float, help="initial-data plateau value")
    p.add_argument("--nu", type=float, help="shell-count exponent in (0, 1/2)")
    p.add_argument("--gamma", type=float, help="shell budget fraction in (0, 1)")
    p.add_argument("--mv-gamma", type=float, dest="mv_gamma",
                   help="mean-value shrink fraction in (0, 1/2)")
    p.add_argument("--label", help="name used for output files")
    p.add_argument("--out-dir", dest="out_dir", help="output directory")
    if sweep:
        p.add_argument("--lambdas",
                       help="comma-separated strength grid (overrides config)")


def _cmd_geometry(args) -> int:
    cfg = _load_cfg(args)
    case = case_from_config(cfg)
    grid = grid_for_domain(case.domain, case.cells)
    a = constant_a(case.domain, grid)
    dom = case.domain
    print(f"grid: {'x'.join(str(c) for c in grid.cells)}  "
          f"h={max(grid.spacing):.6g}")
    print(f"obstacle: {type(dom.obstacle).__name__}  "
          f"reach_in={dom.obstacle.reach_inward:.6g} "
          f"reach_out={dom.obstacle.reach_outward:.6g}")
    print(f"subdomain: {type(dom.subdomain).__name__}  "
          f"reach_in={dom.subdomain.reach_inward:.6g} "
          f"reach_out={dom.subdomain.reach_outward:.6g}")
    print(f"wall gap: {dom.wall_gap():.6g}")
    print(f"a (shell budget) = {a:.6g}")
    n = args.shells or bounds.shell_count(case.lam, case.nu)
    gamma = case.gamma
    shells = shell_family(dom, gamma, n, grid, a=a)
    print(f"shell table (gamma={gamma:g}, n={n}, gap={gamma * a / n:.6g}):")
    print(f"{'region':>8} {'offset':>12} {'cells':>10} {'measure':>14}")
    for j, mask in enumerate(shells):
        rho = float("nan") if j == 0 else gamma * a * (1.0 - j / n)
        off = "-" if j == 0 else f"{rho:.6g}"
        print(f"{mask.label:>8} {off:>12} {mask.cell_count:>10} "
              f"{mask.measure:>14.8g}")
    return 0


def _cmd_solve(args) -> int:
    cfg = _load_cfg(args)
    case = case_from_config(cfg)
    case.keep_store = True
    case.restrict_snapshots = bool(args.restrict)
    print(f"backend: {backend_name()}")
    result = run_case(case)
    for rep in result.reports:
        print(rep.line())
    out_dir = cfg.get("sweep", {}).get("out_dir", "out")
    case_dir = os.path.join(out_dir, result.label)
    os.makedirs(case_dir, exist_ok=True)
    store = result.store
    if args.snapshots:
        store.save(os.path.join(case_dir, "snapshots"))
    from .geometry import offset_region

    grid = store.grid
    absorber = offset_region(case.domain.obstacle, 0.0, grid, "absorber")
    inner = offset_region(case.domain.subdomain, 0.0, grid, "inner")
    region_series(store, absorber, label="l2_sq[absorber]").to_csv(
        os.path.join(case_dir, "series_absorber.csv")
    )
    region_series(store, inner, label="l2_sq[inner]").to_csv(
        os.path.join(case_dir, "series_inner.csv")
    )
    json_path = write_case_json(result, case_dir)
    print(f"wrote {json_path}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_cfg(args)
    case = case_from_config(cfg)
    sweep_cfg = cfg.get("sweep", {})
    sweep = SweepConfig(
        case=case,
        lambdas=[float(x) for x in sweep_cfg.get("lambdas", [])],
        out_dir=str(sweep_cfg.get("out_dir", "out")),
    )
    print(f"backend: {backend_name()}")
    result = run_sweep(sweep)
    print(f"wrote {result.csv_path}")
    return 0


def _cmd_verify(args) -> int:
    from . import acceptance

    return acceptance.run_all(only=args.only)


def _cmd_fit(args) -> int:
    fits = fit_from_csv(args.csv, nu=args.nu)
    for fit in fits.values():
        print(fit.line())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obstacleheat",
        description=(
            "Simulate heat flow with a strongly absorbing obstacle and check "
            "the measured decay against its certified ceilings."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_geo = sub.add_parser("geometry", help="print the shell layout")
    _add_common(p_geo)
    p_geo.add_argument("--shells", type=int,
                       help="number of shells in the table")
    p_geo.set_defaults(func=_cmd_geometry)

    p_solve = sub.add_parser("solve", help="run a single case")
    _add_common(p_solve)
    p_solve.add_argument("--snapshots", action="store_true",
                         help="dump binary snapshots")
    p_solve.add_argument("--restrict", action="store_true",
                         help="store snapshots only on the absorber")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a strength sweep")
    _add_common(p_sweep, sweep=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--only", type=int, action="append",
                          help="run only this criterion (repeatable)")
    p_verify.set_defaults(func=_cmd_verify)

    p_fit = sub.add_parser("fit", help="refit decay laws from a sweep CSV")
    p_fit.add_argument("csv", help="path to a sweep table")
    p_fit.add_argument("--nu", type=float, help="subexp model exponent")
    p_fit.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
