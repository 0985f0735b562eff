"""Mass sweeps: per-r ground states with profile diagnostics and rate fits."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid3
from .energy import Exponent, as_exponent
from .groundstate import (SolveConfig, GroundStateResult, solve,
                          profile_error, STATUS_INTERIOR)
from .oscillator import OscillatorBasis, build_basis, mode_masses, LAMBDA0
from .tables import render_csv


@dataclass(frozen=True)
class SweepRow:
    r: float
    J: float
    lambda_: float | None
    doth: float
    residual: float
    status: str
    profile_err: float
    mode_tail: float
    pohozaev: float


@dataclass(frozen=True)
class FitResult:
    quantity: str
    target: float
    slope: float | None
    intercept: float | None
    stderr: float | None
    n: int

    @property
    def insufficient(self) -> bool:
        return self.slope is None


@dataclass(frozen=True)
class SweepTable:
    p: float
    chi: float
    rows: list[SweepRow]
    fits: list[FitResult]
    results: dict[float, GroundStateResult]

    def to_csv(self) -> str:
        header = ["r", "J", "lambda", "doth", "residual", "status",
                  "profile_err", "mode_tail", "pohozaev"]
        body = [[w.r, w.J, w.lambda_, w.doth, w.residual, w.status,
                 w.profile_err, w.mode_tail, w.pohozaev] for w in self.rows]
        for f in self.fits:
            body.append(["fit:" + f.quantity, f.slope, f.target, f.stderr,
                         f.n, "insufficient-data" if f.insufficient else "ok",
                         None, None, None])
        return render_csv(header, body)


def fit_loglog(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope/intercept of log y vs log x, with slope stderr."""
    lx, ly = np.log(x), np.log(y)
    n = lx.size
    A = np.vstack([lx, np.ones(n)]).T
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    if n > 2:
        rss = float(res[0]) if res.size else float(np.sum((ly - A @ coef) ** 2))
        sxx = float(np.sum((lx - lx.mean()) ** 2))
        stderr = np.sqrt(rss / (n - 2) / sxx)
    else:
        stderr = 0.0
    return slope, intercept, float(stderr)


def _solve_one(args):
    grid, cfg = args
    return cfg.r, solve(grid, cfg)


def run_sweep(grid: Grid3, p, chi: float, r_list, basis: OscillatorBasis | None = None,
              jobs: int = 1, seed: int = 0, **solve_kwargs) -> SweepTable:
    """Solve the ground state for each r and fit the small-mass rates.

    r_list must be strictly increasing.  Fits use only interior rows;
    non-interior rows are kept in the table but excluded from the fits.
    """
    pe = as_exponent(p)
    r_list = [float(r) for r in r_list]
    if any(b <= a for a, b in zip(r_list, r_list[1:])):
        raise ValueError("r list must be strictly increasing")
    if basis is None:
        basis = build_basis(grid)

    cfgs = [SolveConfig(p=pe, r=r, chi=chi, seed=seed, **solve_kwargs)
            for r in r_list]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_solve_one, [(grid, c) for c in cfgs]))
    else:
        results = dict(_solve_one((grid, c)) for c in cfgs)

    rows = []
    for r in r_list:
        res = results[r]
        err, err_over_r = profile_error(res.u, r, basis)
        tail = mode_masses(res.u, basis).tail
        rows.append(SweepRow(r, res.J, res.lambda_, res.doth, res.residual,
                             res.status, err, tail, res.report.pohozaev))

    interior = [w for w in rows if w.status == STATUS_INTERIOR]
    fits = []
    pv = pe.value
    specs = [
        ("gap_to_lambda0", pv - 1.0,
         [(w.r, LAMBDA0 - w.lambda_) for w in interior if w.lambda_ is not None]),
        ("profile_err_over_r", (pv - 1.0) / 2.0,
         [(w.r, w.profile_err / w.r) for w in interior]),
        ("mode_tail_fraction", pv - 1.0,
         [(w.r, w.mode_tail / w.r ** 2) for w in interior]),
    ]
    for name, target, pts in specs:
        pts = [(x, y) for x, y in pts if y > 0]
        if len(pts) < 2:
            fits.append(FitResult(name, target, None, None, None, len(pts)))
            continue
        x = np.array([q[0] for q in pts])
        y = np.array([q[1] for q in pts])
        slope, intercept, stderr = fit_loglog(x, y)
        fits.append(FitResult(name, target, slope, intercept, stderr, len(pts)))
    return SweepTable(pv, chi, rows, fits, results)
