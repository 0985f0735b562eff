"""Constrained ground-state solver and structure checks on the minimizers.

The localized problem is: minimize E over the mass sphere ||u||_L2 = r
inside the ball ||u||_Hdot <= chi.  The solver runs a preconditioned
projected gradient flow with exact mass rescaling after every step:

    g  = -lap(u) + (x1^2+x2^2) u - |u|^{p-1} u - lambda(u) u
    u <- normalize(u - tau * P g),   P = B C B

with B = (I + dt_P V / 2)^{-1} applied in physical space and
C = (I + dt_P |k|^2)^{-1} applied diagonally in Fourier space.  P is
symmetric positive definite, so the true Euler-Lagrange states are exactly
the fixed points (lambda(u) makes g orthogonal to u, and P g parallel to u
then forces g = 0), and -P g is a strict descent direction.  The
preconditioner timescale dt_P is fixed while the step tau adapts: energy
monotonicity is enforced by step-halving backtracking and tau regrows
after accepted steps up to the stability edge near 2 dt_P.  The Hdot ball
is monitored, not projected: crossing it flags the run as escaped, which
signals the large-mass regime rather than a numerical failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import minimize_scalar

from .grid import (Grid3, Field, l2_sq_values, gradient_sq_values,
                   trap_moment_values, hdot_sq_values, laplacian_values,
                   boundary_mass, gaussian_field, random_smooth_field,
                   read_field)
from .energy import Exponent, as_exponent, EnergyReport, report_values, lp1_values
from .oscillator import OscillatorBasis, project_all, LAMBDA0

BOUNDARY_MASS_FLAG = 1e-8

STATUS_INTERIOR = "interior"
STATUS_BOUNDARY = "boundary-suspect"
STATUS_ESCAPED = "escaped"
STATUS_VANISHED = "vanished"
STATUS_MAXITER = "maxiter"


@dataclass(frozen=True)
class SolveConfig:
    p: Exponent
    r: float
    chi: float
    dt: float = 1e-2            # initial step tau
    tol: float = 1e-8
    max_iter: int = 20000
    init: str = "gaussian"
    init_file: str | None = None
    seed: int = 0
    dt_max: float = 5.0
    dt_precond: float = 0.5     # fixed preconditioner timescale
    recenter: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", as_exponent(self.p))
        if not (self.r > 0 and self.chi > 0 and self.dt > 0 and self.tol > 0
                and self.dt_precond > 0):
            raise ValueError("r, chi, dt, tol, dt_precond must all be positive")
        if self.init not in ("gaussian", "gaussian-complex-phase",
                             "random-smooth", "file"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == "file" and not self.init_file:
            raise ValueError("init='file' needs init_file")


@dataclass(frozen=True)
class GroundStateResult:
    u: Field
    J: float
    lambda_: float | None
    residual: float
    iters: int
    doth: float                   # ||u||_Hdot (norm, not squared)
    status: str
    report: EnergyReport
    boundary_mass: float
    boundary_flag: bool
    mass_error: float             # worst |mass - r^2|/r^2 over accepted steps
    energy_history: np.ndarray = dc_field(repr=False)

    @property
    def interior(self) -> bool:
        return self.status == STATUS_INTERIOR


def _initial_values(grid: Grid3, cfg: SolveConfig) -> np.ndarray:
    if cfg.init == "file":
        f = read_field(cfg.init_file)
        if f.grid != grid:
            raise ValueError("init file grid does not match solver grid")
        vals = f.copy_values()
    elif cfg.init == "random-smooth":
        rng = np.random.default_rng(cfg.seed)
        vals = random_smooth_field(grid, rng).copy_values()
    else:
        vals = gaussian_field(grid).copy_values()
        if cfg.init == "gaussian-complex-phase":
            vals *= np.exp(1j * np.sin(grid.x3))[None, None, :]
    nrm = np.sqrt(l2_sq_values(grid, vals))
    return vals * (cfg.r / nrm)


def _precondition(grid: Grid3, vals: np.ndarray, dt: float) -> np.ndarray:
    out = vals / (1.0 + 0.5 * dt * grid.trap)
    out = np.fft.ifftn(np.fft.fftn(out) / (1.0 + dt * grid.ksq))
    return out / (1.0 + 0.5 * dt * grid.trap)


def _power_pm1(vals: np.ndarray, p: float) -> np.ndarray:
    """|u|^{p-1}, with a cheap path for the cubic case."""
    if p == 3.0:
        return vals.real ** 2 + vals.imag ** 2
    return np.abs(vals) ** (p - 1.0)


def flow_gradient(grid: Grid3, vals: np.ndarray, p: float):
    """Unprojected L2 energy gradient pieces: returns (Hu - nl(u), report terms)."""
    vhat = np.fft.fftn(vals)
    kinetic = float(np.sum(grid.ksq * (vhat.real ** 2 + vhat.imag ** 2))
                    * grid.cellvol / grid.size)
    lap = np.fft.ifftn(-grid.ksq * vhat)
    raw = -lap + grid.trap * vals - _power_pm1(vals, p) * vals
    return raw, kinetic


def _energy_of(grid: Grid3, vals: np.ndarray, p: float) -> float:
    doth = hdot_sq_values(grid, vals)
    return 0.5 * doth - lp1_values(grid, vals, p) / (p + 1.0)


def solve(grid: Grid3, cfg: SolveConfig) -> GroundStateResult:
    p = cfg.p.value
    r = cfg.r
    r2 = r * r
    v = _initial_values(grid, cfg)
    dtp = cfg.dt_precond
    tau = cfg.dt
    tau_max = min(cfg.dt_max, 1.9 * dtp)

    prec_b = 1.0 / (1.0 + 0.5 * dtp * grid.trap)
    prec_c = 1.0 / (1.0 + dtp * grid.ksq)
    kin_weight = grid.ksq * (grid.cellvol / grid.size)

    energy_hist: list[float] = []
    residual_hist: list[float] = []
    status = STATUS_MAXITER
    residual = np.inf
    lam = None
    iters = 0
    worst_mass_err = 0.0
    lp1_floor = 2.0 * r ** (p + 1.0) / grid.volume ** ((p - 1.0) / 2.0)

    vhat = np.fft.fftn(v)
    for iters in range(cfg.max_iter):
        kinetic = float(np.sum(kin_weight * (vhat.real ** 2 + vhat.imag ** 2)))
        lap = np.fft.ifftn(-grid.ksq * vhat)
        dens = v.real ** 2 + v.imag ** 2
        trap_m = float(np.sum(grid.trap * dens)) * grid.cellvol
        doth = kinetic + trap_m
        if p == 3.0:
            pm1 = dens
            lp1 = float(np.sum(dens * dens)) * grid.cellvol
        else:
            amp = np.sqrt(dens)
            pm1 = amp ** (p - 1.0)
            lp1 = float(np.sum(amp ** (p + 1.0))) * grid.cellvol
        energy = 0.5 * doth - lp1 / (p + 1.0)
        lam = (doth - lp1) / r2
        g = -lap + (grid.trap - pm1 - lam) * v
        residual = np.sqrt(l2_sq_values(grid, g)) / r

        energy_hist.append(energy)
        residual_hist.append(residual)

        if np.sqrt(doth) > cfg.chi:
            status = STATUS_ESCAPED
            break
        if residual <= cfg.tol:
            status = STATUS_INTERIOR if np.sqrt(doth) <= cfg.chi * r * (1.0 + 1e-3) \
                else STATUS_BOUNDARY
            break
        if (lp1 <= lp1_floor and len(residual_hist) > 200
                and residual > 0.999 * residual_hist[-200]):
            status = STATUS_VANISHED
            break

        # preconditioned step with energy backtracking
        pg = prec_b * np.fft.ifftn(prec_c * np.fft.fftn(prec_b * g))
        accepted = False
        while tau > 1e-14:
            trial = v - tau * pg
            scale = r / np.sqrt(l2_sq_values(grid, trial))
            trial *= scale
            that = np.fft.fftn(trial)
            kin_t = float(np.sum(kin_weight * (that.real ** 2 + that.imag ** 2)))
            e_trial = (0.5 * (kin_t + trap_moment_values(grid, trial))
                       - lp1_values(grid, trial, p) / (p + 1.0))
            if e_trial <= energy + 1e-15 * max(1.0, abs(energy)):
                worst_mass_err = max(worst_mass_err,
                                     abs(l2_sq_values(grid, trial) - r2) / r2)
                v, vhat = trial, that
                tau = min(tau * 1.25, tau_max)
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            break  # step underflow: report whatever residual we reached

    if cfg.recenter and status in (STATUS_INTERIOR, STATUS_BOUNDARY):
        slice_mass = np.sum(np.abs(v) ** 2, axis=(0, 1))
        v = np.roll(v, grid.n3 // 2 - int(np.argmax(slice_mass)), axis=2)

    u = Field(grid, v)
    rep = report_values(grid, v, cfg.p)
    bmass = boundary_mass(grid, v)
    return GroundStateResult(
        u=u, J=rep.energy, lambda_=rep.lambda_, residual=residual,
        iters=iters + 1, doth=float(np.sqrt(rep.doth_sq)), status=status,
        report=rep, boundary_mass=bmass, boundary_flag=bmass > BOUNDARY_MASS_FLAG,
        mass_error=max(worst_mass_err, abs(rep.l2_sq - r2) / r2),
        energy_history=np.asarray(energy_hist))


def el_gradient(u: Field, p, lam: float) -> Field:
    """Euler-Lagrange residual field -lap(u) + V u - |u|^{p-1} u - lam u."""
    pv = as_exponent(p).value
    vals = u.values
    lap = laplacian_values(u.grid, vals)
    amp = np.abs(vals)
    return Field(u.grid, -lap + u.grid.trap * vals - amp ** (pv - 1.0) * vals
                 - lam * vals)


def el_residual(u: Field, p, lam: float) -> float:
    """Relative L2 residual of the Euler-Lagrange equation at multiplier lam."""
    mass = np.sqrt(l2_sq_values(u.grid, u.values))
    if mass == 0.0:
        raise ValueError("el_residual of the zero field")
    res = el_gradient(u, p, lam)
    return float(np.sqrt(l2_sq_values(u.grid, res.values)) / mass)


def geometry_gap(r: float, chi: float, c_hat: float, p) -> tuple[float, float, bool]:
    """Local-minima geometry test from the calibrated interpolation constant.

    With eps = (5-p)/2 and delta = (3p-7)/2,
        f_r(s) = s^2/2 - (c_hat/(p+1)) r^eps s^{2+delta}
    lower-bounds the energy on the mass sphere at ||u||_Hdot = s, while
    g_r(s) = s^2/2 is an upper bound at radius s.  The gap condition
    g_r(chi r / 2) < inf_{s in (chi r, chi)} f_r(s) separates an inner well
    from the outer shell.
    """
    pv = as_exponent(p).value
    eps = (5.0 - pv) / 2.0
    delta = (3.0 * pv - 7.0) / 2.0
    coeff = c_hat / (pv + 1.0) * r ** eps

    lhs = 0.5 * (chi * r / 2.0) ** 2

    def f(s: float) -> float:
        return 0.5 * s * s - coeff * s ** (2.0 + delta)

    lo, hi = chi * r, chi
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    rhs = min(float(res.fun), f(lo), f(hi))
    return lhs, rhs, lhs < rhs


def subadditivity_check(results: dict[float, GroundStateResult]):
    """Strict scaled subadditivity r^2 J_s < s^2 J_r for every pair r < s."""
    for r, res in results.items():
        if not res.interior:
            raise ValueError(f"subadditivity check needs interior solves; "
                             f"r={r} has status {res.status}")
    rows = []
    keys = sorted(results)
    for i, r in enumerate(keys):
        for s in keys[i + 1:]:
            lhs = r * r * results[s].J
            rhs = s * s * results[r].J
            rows.append((r, s, lhs, rhs, lhs < rhs))
    return rows


def profile_error(u: Field, r: float, basis: OscillatorBasis) -> tuple[float, float]:
    """Hdot distance from the ground-mode product state, and its ratio to r.

    err^2 = sum_{j>=1} (||d_x3 phi_j||^2 + lambda_j ||phi_j||^2) plus the
    Hdot content beyond the basis cutoff; the j = 0 axial-derivative term
    is excluded, matching the definition of the transverse defect.
    """
    g = u.grid
    phis = project_all(u, basis)
    h3 = g.h3
    dphis = np.fft.ifft(1j * g.k3[None, :] * np.fft.fft(phis, axis=1), axis=1)
    err_sq = 0.0
    for j in range(1, basis.cutoff):
        err_sq += (np.sum(np.abs(dphis[j]) ** 2) * h3
                   + basis.eigenvalues[j] * np.sum(np.abs(phis[j]) ** 2) * h3)
    # content beyond the cutoff
    recon = np.einsum("jab,jc->abc", basis.modes, phis)
    err_sq += hdot_sq_values(g, u.values - recon)
    err = float(np.sqrt(max(err_sq, 0.0)))
    return err, err / r


def profile_error_direct(u: Field, basis: OscillatorBasis) -> float:
    """Independent route: ||u - phi0 Psi0||_Hdot assembled in physical space."""
    phi0 = project_all(u, basis)[0]
    prod = basis.modes[0][:, :, None] * phi0[None, None, :]
    return float(np.sqrt(hdot_sq_values(u.grid, u.values - prod)))


@dataclass(frozen=True)
class SymmetryReport:
    """Relative symmetry defects of |u| (all should vanish for minimizers).

    angular / evenness are L2-relative; radial_mono / x3_mono are relative
    to the peak amplitude resp. peak slice norm.
    """

    angular: float
    radial_mono: float
    evenness: float
    x3_mono: float
    center_index: int

    @property
    def max_defect(self) -> float:
        return max(self.angular, self.radial_mono, self.evenness, self.x3_mono)


def _ring_ids(grid: Grid3) -> tuple[np.ndarray, np.ndarray]:
    rsq = grid.x1[:, None] ** 2 + grid.x2[None, :] ** 2
    keys = np.round(rsq, 10).ravel()
    radii, ids = np.unique(keys, return_inverse=True)
    return radii, ids


def symmetry_check(u: Field) -> SymmetryReport:
    g = u.grid
    amp = np.abs(u.values)
    l2 = np.sqrt(l2_sq_values(g, amp.astype(np.complex128)))
    peak = float(np.max(amp))
    if peak == 0.0:
        return SymmetryReport(0.0, 0.0, 0.0, 0.0, g.n3 // 2)

    # (a) angular variance over rings, (b) radial monotonicity of ring means
    radii, ids = _ring_ids(g)
    nrings = radii.size
    flat = amp.reshape(g.n1 * g.n2, g.n3)
    counts = np.bincount(ids, minlength=nrings).astype(float)
    ang_sq = 0.0
    radial_defect = 0.0
    for s in range(g.n3):
        col = flat[:, s]
        means = np.bincount(ids, weights=col, minlength=nrings) / counts
        dev = col - means[ids]
        ang_sq += float(np.sum(dev * dev))
        inc = np.diff(means)
        if inc.size:
            radial_defect = max(radial_defect, float(np.max(inc, initial=0.0)))
    angular = np.sqrt(ang_sq * g.cellvol) / l2

    # (c) evenness about the argmax-mass slice
    slice_mass = np.sum(flat * flat, axis=0)
    k = int(np.argmax(slice_mass))
    c = g.n3 // 2
    rolled = np.roll(amp, c - k, axis=2)
    idx = (2 * c - np.arange(g.n3)) % g.n3
    mirrored = rolled[:, :, idx]
    even_sq = float(np.sum((rolled - mirrored) ** 2)) * g.cellvol
    evenness = np.sqrt(even_sq) / l2

    # (d) monotone decay of slice norms away from the center
    s_norm = np.sqrt(np.sum(np.roll(flat, c - k, axis=1) ** 2, axis=0))
    smax = float(np.max(s_norm))
    right = s_norm[c:]
    left = s_norm[:c + 1][::-1]
    x3_defect = 0.0
    for side in (right, left):
        inc = np.diff(side)
        if inc.size:
            x3_defect = max(x3_defect, float(np.max(inc, initial=0.0)))
    return SymmetryReport(float(angular), radial_defect / peak,
                          float(evenness), x3_defect / smax, k)


@dataclass(frozen=True)
class Certificate:
    ok: bool
    pohozaev_rel: float
    identity_lower: float
    linear_bound: float


def ground_state_certificate(u: Field, p, chi: float, r: float) -> Certificate:
    """Numerical shadow of the least-energy property.

    Requires strictly supercritical p.  Checks that the dilation functional
    nearly vanishes and that the identity-implied coercive lower bound
    (3p-7)/(6(p-1)) ||u||_Hdot^2 stays below the linear level r^2 Lambda0/2.
    """
    pe = as_exponent(p)
    if not pe.supercritical_strict:
        raise ValueError("certificate requires p > 1 + 4/3 strictly")
    pv = pe.value
    rep = report_values(u.grid, u.values, pe)
    poh_rel = abs(rep.pohozaev) / rep.doth_sq
    lower = (3.0 * pv - 7.0) / (6.0 * (pv - 1.0)) * rep.doth_sq
    bound = r * r * LAMBDA0 / 2.0
    return Certificate(poh_rel <= 1e-2 and lower < bound, poh_rel, lower, bound)


def estimate_r0(grid: Grid3, p, chi: float, r_lo: float, r_hi: float,
                bisections: int = 6, **solve_kwargs) -> float:
    """Empirical threshold between interior and escaped outcomes (bisection)."""
    def escaped(r: float) -> bool:
        cfg = SolveConfig(p=as_exponent(p), r=r, chi=chi, **solve_kwargs)
        return solve(grid, cfg).status == STATUS_ESCAPED

    if escaped(r_lo):
        return r_lo
    if not escaped(r_hi):
        return r_hi
    for _ in range(bisections):
        mid = 0.5 * (r_lo + r_hi)
        if escaped(mid):
            r_hi = mid
        else:
            r_lo = mid
    return 0.5 * (r_lo + r_hi)
