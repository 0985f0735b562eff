"""Scalar functionals of a field: energy, norms, multiplier, dilation checks.

Everything here is a pure function of an immutable Field.  Gradient terms
are computed spectrally; the interpolation-inequality constant is never
assumed, only calibrated empirically from a random corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (Grid3, Field, l2_sq_values, gradient_sq_values,
                   trap_moment_values, spectral_tail_fraction,
                   random_smooth_field)

P_LOWER = 1.0 + 4.0 / 3.0
P_UPPER = 5.0


@dataclass(frozen=True)
class Exponent:
    """Nonlinearity exponent p.

    The core range is 1 + 4/3 <= p < 5; extended=True relaxes the lower end
    to 1 < p < 5 for the diagnostics that only need that much.
    """

    value: float
    extended: bool = False

    def __post_init__(self) -> None:
        p = float(self.value)
        lo = 1.0 if self.extended else P_LOWER
        if not (p < P_UPPER and (p > lo if self.extended else p >= lo - 1e-12)):
            raise ValueError(f"exponent p={p} outside admissible range "
                             f"[{lo}, {P_UPPER})")
        object.__setattr__(self, "value", p)

    @property
    def supercritical_strict(self) -> bool:
        return self.value > P_LOWER


def as_exponent(p) -> Exponent:
    return p if isinstance(p, Exponent) else Exponent(float(p))


@dataclass(frozen=True)
class EnergyReport:
    """All scalar functionals of one field at one exponent.

    Invariants (re-checked on construction):
        doth_sq = kinetic + trap
        energy  = doth_sq/2 - lp1/(p+1)
        lambda_ = (doth_sq - lp1) / l2_sq        (None for the zero field)
        pohozaev = kinetic - trap - 3(p-1)/(2(p+1)) * lp1
        2*l2_sq <= doth_sq  (up to 1e-8 relative)
    """

    p: float
    l2_sq: float
    kinetic: float
    trap: float
    doth_sq: float
    lp1: float
    energy: float
    lambda_: float | None
    pohozaev: float

    def __post_init__(self) -> None:
        assert abs(self.doth_sq - (self.kinetic + self.trap)) <= 1e-10 * max(1.0, self.doth_sq)
        assert abs(self.energy - (0.5 * self.doth_sq - self.lp1 / (self.p + 1.0))) \
            <= 1e-10 * max(1.0, abs(self.energy))
        if self.lambda_ is not None:
            assert abs(self.lambda_ * self.l2_sq - (self.doth_sq - self.lp1)) \
                <= 1e-10 * max(1.0, self.doth_sq)
        coeff = 3.0 * (self.p - 1.0) / (2.0 * (self.p + 1.0))
        assert abs(self.pohozaev - (self.kinetic - self.trap - coeff * self.lp1)) \
            <= 1e-10 * max(1.0, abs(self.pohozaev))
        if self.l2_sq > 0:
            assert 2.0 * self.l2_sq <= self.doth_sq * (1.0 + 1e-8), \
                "confinement lower bound violated"


def lp1_values(grid: Grid3, values: np.ndarray, p: float) -> float:
    amp = np.abs(values)
    return float(np.sum(amp ** (p + 1.0)) * grid.cellvol)


def report_values(grid: Grid3, values: np.ndarray, p: Exponent) -> EnergyReport:
    pv = p.value
    l2 = l2_sq_values(grid, values)
    kin = gradient_sq_values(grid, values)
    trp = trap_moment_values(grid, values)
    doth = kin + trp
    lp1 = lp1_values(grid, values, pv)
    energy = 0.5 * doth - lp1 / (pv + 1.0)
    lam = (doth - lp1) / l2 if l2 > 0 else None
    coeff = 3.0 * (pv - 1.0) / (2.0 * (pv + 1.0))
    poh = kin - trp - coeff * lp1
    return EnergyReport(pv, l2, kin, trp, doth, lp1, energy, lam, poh)


def report(u: Field, p) -> EnergyReport:
    """Full scalar report; lambda_ is None (flagged) for the zero field."""
    return report_values(u.grid, u.values, as_exponent(p))


def gn_ratio(u: Field, p) -> float:
    """Interpolation ratio lp1 / (l2^{(5-p)/4} doth^{(3p-3)/4}).

    Scale-invariant: homogeneity degrees match since
    (p+1) = (5-p)/2 + (3p-3)/2.
    """
    pv = as_exponent(p).value
    rep = report(u, pv if pv >= P_LOWER else Exponent(pv, extended=True))
    if rep.l2_sq == 0 or rep.doth_sq == 0:
        raise ValueError("gn_ratio of the zero field")
    return rep.lp1 / (rep.l2_sq ** ((5.0 - pv) / 4.0)
                      * rep.doth_sq ** ((3.0 * pv - 3.0) / 4.0))


def calibrate_gn_constant(grid: Grid3, p, n_fields: int = 1000,
                          seed: int = 0) -> float:
    """Empirical interpolation constant: corpus maximum of gn_ratio."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(n_fields):
        f = random_smooth_field(grid, rng)
        best = max(best, gn_ratio(f, p))
    return best


def confinement_lower_bound_check(u: Field) -> tuple[float, float, bool]:
    """2 * l2_sq <= doth_sq must hold for every field (divergence identity)."""
    l2 = l2_sq_values(u.grid, u.values)
    doth = gradient_sq_values(u.grid, u.values) + trap_moment_values(u.grid, u.values)
    return l2, doth, bool(2.0 * l2 <= doth * (1.0 + 1e-8))


# ---------------------------------------------------------------------------
# mass-preserving dilation sweep psi_lambda(x) = lambda^{3/2} psi(lambda x)

@dataclass(frozen=True)
class ScalingRow:
    lam: float
    energy_resampled: float | None
    energy_analytic: float
    tail: float
    flagged: bool


def _resample_dilated(grid: Grid3, values: np.ndarray, lam: float) -> np.ndarray:
    """Evaluate the Fourier interpolant of u at lambda*x, times lambda^{3/2}."""
    vhat = np.fft.fftn(values) / grid.size
    out = vhat
    for axis, (k, x) in enumerate(((grid.k1, grid.x1), (grid.k2, grid.x2),
                                   (grid.k3, grid.x3))):
        M = np.exp(1j * np.outer(lam * x, k))
        out = np.moveaxis(np.tensordot(M, out, axes=(1, axis)), 0, axis)
    return lam ** 1.5 * out


def scaling_sweep(psi: Field, p, lambdas) -> list[ScalingRow]:
    """Energy along the dilation ray, by resampling and by the exact identity.

    The analytic column evaluates
        E(psi_lambda) = lam^2 K/2 - lam^{3(p-1)/2} lp1/(p+1) + lam^{-2} T/2
    from a single report of psi.  Resampled rows whose spectral tail exceeds
    1e-6 of the norm are flagged (and the resampled energy withheld).
    """
    pe = as_exponent(p)
    rep = report(psi, pe)
    rows = []
    for lam in lambdas:
        lam = float(lam)
        if lam < 1.0:
            raise ValueError("dilation factors must be >= 1")
        analytic = (lam ** 2 * rep.kinetic / 2.0
                    - lam ** (1.5 * (pe.value - 1.0)) * rep.lp1 / (pe.value + 1.0)
                    + rep.trap / (2.0 * lam ** 2))
        vals = _resample_dilated(psi.grid, psi.values, lam)
        tail = spectral_tail_fraction(psi.grid, vals)
        flagged = tail > 1e-6
        if flagged:
            rows.append(ScalingRow(lam, None, analytic, tail, True))
        else:
            e_res = report_values(psi.grid, vals, pe).energy
            rows.append(ScalingRow(lam, e_res, analytic, tail, False))
    return rows
