"""Command-line surface: spectrum, groundstate, sweep, evolve, verify, rearrange.

Configuration precedence is flags > config file > built-in defaults.  The
config file is flat key=value text; keys are the flag names with dashes
replaced by underscores.  All outputs are CSV and deterministic for a
fixed config and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .grid import make_grid, read_field, write_field, Field
from .energy import Exponent, report
from .groundstate import SolveConfig, solve
from .oscillator import build_basis
from .rearrange import (rearrange_field, trap_moment_check,
                        norm_preservation_check, kinetic_check,
                        fixed_point_defect)
from .dynamics import EvolveConfig, evolve
from .sweep import run_sweep
from .verify import verify_all
from .tables import render_csv, fmt

DEFAULTS = {
    "p": 3.0,
    "r": 0.1,
    "chi": 4.0,
    "grid": "32,32,64",
    "box": "16,16,32",
    "dt": 1e-2,
    "tol": 1e-8,
    "max_iter": 20000,
    "init": "gaussian",
    "seed": 0,
    "jobs": 1,
    "cutoff": 0,            # 0 = auto
    "r_list": "0.05,0.1,0.2,0.4",
    "t_final": 20.0,
    "evolve_dt": 2e-3,
    "perturb": 0.0,
    "sample_every": 0.25,
    "stability_horizon": 5.0,
    "corpus_size": 200,
}


def _parse_triple(text, cast=float):
    parts = [cast(x) for x in str(text).split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated values, got {text!r}")
    return parts


def _load_config_file(path: str) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _effective(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        file_vals = _load_config_file(args.config)
        for key, val in file_vals.items():
            if key not in cfg:
                raise ValueError(f"unknown config key {key!r}")
            cfg[key] = type(DEFAULTS[key])(val) if not isinstance(DEFAULTS[key], str) else val
    for key in cfg:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            cfg[key] = flag_val
    cfg["seed"] = int(cfg["seed"])
    cfg["jobs"] = int(cfg["jobs"])
    cfg["max_iter"] = int(cfg["max_iter"])
    cfg["corpus_size"] = int(cfg["corpus_size"])
    cfg["cutoff"] = int(cfg["cutoff"])
    return cfg


def _grid_from(cfg: dict):
    n1, n2, n3 = _parse_triple(cfg["grid"], int)
    L1, L2, L3 = _parse_triple(cfg["box"], float)
    return make_grid(n1, n2, n3, L1, L2, L3)


def _emit(args, cfg, name: str, text: str) -> None:
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    else:
        sys.stdout.write(text)


def _report_csv(rep) -> str:
    header = ["l2_sq", "kinetic", "trap", "doth_sq", "lp1", "energy",
              "lambda", "pohozaev", "p"]
    row = [rep.l2_sq, rep.kinetic, rep.trap, rep.doth_sq, rep.lp1,
           rep.energy, rep.lambda_, rep.pohozaev, rep.p]
    return render_csv(header, [row])


def cmd_spectrum(args, cfg) -> int:
    grid = _grid_from(cfg)
    basis = build_basis(grid, cfg["cutoff"] or None)
    rows = [[j, basis.eigenvalues[j]] for j in range(basis.cutoff)]
    _emit(args, cfg, "spectrum.csv", render_csv(["j", "lambda_j"], rows))
    return 0


def cmd_groundstate(args, cfg) -> int:
    grid = _grid_from(cfg)
    sc = SolveConfig(p=Exponent(cfg["p"]), r=cfg["r"], chi=cfg["chi"],
                     dt=cfg["dt"], tol=cfg["tol"], max_iter=cfg["max_iter"],
                     init=cfg["init"], seed=cfg["seed"],
                     init_file=getattr(args, "in_file", None))
    res = solve(grid, sc)
    if args.out:
        write_field(args.out, res.u)
    text = _report_csv(res.report)
    text += render_csv(["status", "residual", "iters", "boundary_mass"],
                       [[res.status, res.residual, res.iters, res.boundary_mass]])
    _emit(args, cfg, "groundstate.csv", text)
    return 0 if res.status in ("interior", "boundary-suspect") else 1


def cmd_sweep(args, cfg) -> int:
    grid = _grid_from(cfg)
    r_list = [float(x) for x in cfg["r_list"].split(",")]
    table = run_sweep(grid, cfg["p"], cfg["chi"], r_list, jobs=cfg["jobs"],
                      seed=cfg["seed"], tol=cfg["tol"],
                      max_iter=cfg["max_iter"])
    _emit(args, cfg, "sweep.csv", table.to_csv())
    return 0


def cmd_evolve(args, cfg) -> int:
    u0 = read_field(args.in_file)
    ec = EvolveConfig(p=Exponent(cfg["p"]), dt=cfg["evolve_dt"],
                      t_final=cfg["t_final"], sample_every=cfg["sample_every"],
                      perturb_eps=cfg["perturb"], seed=cfg["seed"])
    traj = evolve(u0, ec)
    rows = [[t, m, e, d, a] for t, m, e, d, a in
            zip(traj.t, traj.mass, traj.energy, traj.dist, traj.maxamp)]
    text = render_csv(["t", "mass", "energy", "d", "maxamp"], rows)
    text += render_csv(["mass_drift", "energy_drift", "collapsed"],
                       [[traj.mass_drift, traj.energy_drift, traj.collapsed]])
    _emit(args, cfg, "trajectory.csv", text)
    return 1 if traj.collapsed else 0


def cmd_rearrange(args, cfg) -> int:
    u = read_field(args.in_file)
    ru = rearrange_field(u)
    if args.out:
        write_field(args.out, ru)
    tm = trap_moment_check(u)
    l2b, l2a, norm_ok = norm_preservation_check(u, cfg["p"])
    kc = kinetic_check(u)
    rows = [
        ["trap-moment", tm.before, tm.after, tm.ok],
        ["norm-preservation", l2b, l2a, norm_ok],
        ["kinetic", kc.before, kc.after, "skipped" if kc.skipped else kc.ok],
        ["fixed-point-defect", fixed_point_defect(u), 1e-4, None],
    ]
    _emit(args, cfg, "rearrange.csv",
          render_csv(["check", "before", "after", "pass"], rows))
    return 0 if (tm.ok and norm_ok and (kc.skipped or kc.ok)) else 1


def cmd_verify(args, cfg) -> int:
    grid = _grid_from(cfg)
    field = read_field(args.in_file) if args.in_file else None
    rep = verify_all(grid, cfg["p"], cfg["chi"], cfg["r"], field=field,
                     seed=cfg["seed"], corpus_size=cfg["corpus_size"],
                     stability_horizon=cfg["stability_horizon"],
                     tol=cfg["tol"], max_iter=cfg["max_iter"])
    _emit(args, cfg, "verify.csv", rep.to_csv())
    return 0 if rep.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nlstrap",
        description="Ground states and dynamics for NLS with a partial trap")
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--out-dir", help="write CSV outputs here instead of stdout")
    ap.add_argument("--jobs", type=int, help="worker processes for sweeps")
    ap.add_argument("--seed", type=int, help="RNG seed")
    ap.add_argument("--print-config", action="store_true",
                    help="print the effective configuration and exit")
    sub = ap.add_subparsers(dest="command")

    def add(name, func, **extra):
        sp = sub.add_parser(name)
        sp.set_defaults(func=func)
        sp.add_argument("--p", type=float)
        sp.add_argument("--grid")
        sp.add_argument("--box")
        for key, kw in extra.items():
            sp.add_argument(f"--{key.replace('_', '-')}", **kw)
        return sp

    add("spectrum", cmd_spectrum, cutoff=dict(type=int))

    gs = add("groundstate", cmd_groundstate, r=dict(type=float),
             chi=dict(type=float), dt=dict(type=float), tol=dict(type=float),
             max_iter=dict(type=int), init=dict())
    gs.add_argument("--out", help="write the converged field here")
    gs.add_argument("--in", dest="in_file", help="initial field file (init=file)")

    add("sweep", cmd_sweep, r_list=dict(), chi=dict(type=float),
        tol=dict(type=float), max_iter=dict(type=int))

    ev = add("evolve", cmd_evolve, evolve_dt=dict(type=float),
             t_final=dict(type=float), perturb=dict(type=float),
             sample_every=dict(type=float))
    ev.add_argument("--in", dest="in_file", required=True)

    re = add("rearrange", cmd_rearrange)
    re.add_argument("--in", dest="in_file", required=True)
    re.add_argument("--out", help="write the rearranged field here")

    vf = add("verify", cmd_verify, r=dict(type=float), chi=dict(type=float),
             tol=dict(type=float), max_iter=dict(type=int),
             corpus_size=dict(type=int), stability_horizon=dict(type=float))
    vf.add_argument("--in", dest="in_file", help="verify this field instead of solving")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _effective(args)
        if args.print_config:
            for key in sorted(cfg):
                sys.stdout.write(f"{key}={fmt(cfg[key])}\n")
            return 0
        if not getattr(args, "func", None):
            ap.print_help()
            return 2
        return args.func(args, cfg)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
