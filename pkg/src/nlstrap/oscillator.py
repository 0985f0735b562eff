"""2D quantum harmonic oscillator spectral basis on the transverse grid.

Eigenpairs of -d^2/dx1^2 - d^2/dx2^2 + x1^2 + x2^2 built from tensor
products of 1D Hermite functions.  1D eigenvalues are the odd integers,
so the 2D eigenvalue for the index pair (m, n) is 2(m + n) + 2 and the
bottom of the spectrum is exactly 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid3, Field, hdot_sq_values, l2_sq_values

LAMBDA0 = 2.0

# aim for mode pairs up to total degree 9 (eigenvalues up to 20) by default,
# backing down to what the grid actually resolves
DEFAULT_DEGREE = 9
DEFAULT_CUTOFF = (DEFAULT_DEGREE + 1) * (DEFAULT_DEGREE + 2) // 2
RESOLUTION_TOL = 1e-6


def hermite_functions(x: np.ndarray, nmax: int) -> np.ndarray:
    """First nmax+1 L2-normalized Hermite functions sampled at x.

    Stable three-term recurrence:
        h_0 = pi^{-1/4} exp(-x^2/2)
        h_1 = sqrt(2) x h_0
        h_{m+1} = sqrt(2/(m+1)) x h_m - sqrt(m/(m+1)) h_{m-1}
    """
    out = np.empty((nmax + 1, x.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for m in range(1, nmax):
        out[m + 1] = (np.sqrt(2.0 / (m + 1)) * x * out[m]
                      - np.sqrt(m / (m + 1.0)) * out[m - 1])
    return out


@dataclass(frozen=True)
class OscillatorBasis:
    """Retained 2D eigenmodes, quadrature-orthonormal on the (x1,x2) slice.

    eigenvalues[j] is exact (integer-valued float); modes[j] has shape
    (n1, n2); pairs[j] is the (m, n) Hermite index pair.
    """

    grid: Grid3
    cutoff: int
    eigenvalues: np.ndarray
    modes: np.ndarray
    pairs: tuple[tuple[int, int], ...]

    @property
    def psi0(self) -> np.ndarray:
        return self.modes[0]


def default_cutoff(grid: Grid3) -> int:
    """Mode count for the largest degree <= 9 the grid resolves."""
    degree = 0
    for d in range(1, DEFAULT_DEGREE + 1):
        h1 = hermite_functions(np.asarray(grid.x1), d)
        h2 = hermite_functions(np.asarray(grid.x2), d)
        dev = max(np.max(np.abs(np.sum(h1 * h1, axis=1) * grid.h1 - 1.0)),
                  np.max(np.abs(np.sum(h2 * h2, axis=1) * grid.h2 - 1.0)))
        if dev > RESOLUTION_TOL:
            break
        degree = d
    return (degree + 1) * (degree + 2) // 2


def build_basis(grid: Grid3, cutoff: int | None = None) -> OscillatorBasis:
    """Build the first `cutoff` 2D oscillator modes on the grid's slice.

    With cutoff=None, retains modes up to the largest fully resolved total
    degree (at most 9).  Raises ValueError when a requested mode is not
    resolved by the grid (quadrature norm off unity by more than 1e-6
    before renormalization).
    """
    if cutoff is None:
        cutoff = default_cutoff(grid)
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")

    # enumerate (m, n) by increasing eigenvalue, lexicographic tie-break
    pairs = []
    degree = 0
    while len(pairs) < cutoff:
        pairs.extend((m, degree - m) for m in range(degree + 1))
        degree += 1
    pairs.sort(key=lambda mn: (mn[0] + mn[1], mn[0]))
    pairs = pairs[:cutoff]
    nmax = max(max(m, n) for m, n in pairs)

    h1 = hermite_functions(np.asarray(grid.x1), nmax)
    h2 = hermite_functions(np.asarray(grid.x2), nmax)
    for axis, (h, w) in enumerate(((h1, grid.h1), (h2, grid.h2)), start=1):
        norms = np.sum(h * h, axis=1) * w
        worst = np.max(np.abs(norms - 1.0))
        if worst > RESOLUTION_TOL:
            raise ValueError(
                f"oscillator mode unresolved on axis {axis}: "
                f"quadrature norm deviates from 1 by {worst:.3e}")
        h /= np.sqrt(norms)[:, None]

    modes = np.empty((cutoff, grid.n1, grid.n2))
    eigenvalues = np.empty(cutoff)
    for j, (m, n) in enumerate(pairs):
        modes[j] = np.outer(h1[m], h2[n])
        eigenvalues[j] = float(2 * (m + n) + 2)

    modes.setflags(write=False)
    eigenvalues.setflags(write=False)
    return OscillatorBasis(grid, cutoff, eigenvalues, modes, tuple(pairs))


def project_mode(u: Field, basis: OscillatorBasis, j: int) -> np.ndarray:
    """phi_j(x3) = <Psi_j, u(.,.,x3)> per x3 slice (slice quadrature)."""
    if u.grid != basis.grid:
        raise ValueError("basis built on a different grid")
    w = basis.grid.h1 * basis.grid.h2
    return np.einsum("ab,abc->c", basis.modes[j], u.values) * w


def project_phi0(u: Field, basis: OscillatorBasis) -> np.ndarray:
    return project_mode(u, basis, 0)


def project_all(u: Field, basis: OscillatorBasis) -> np.ndarray:
    """All mode profiles at once, shape (cutoff, n3)."""
    if u.grid != basis.grid:
        raise ValueError("basis built on a different grid")
    w = basis.grid.h1 * basis.grid.h2
    return np.einsum("jab,abc->jc", basis.modes, u.values) * w


@dataclass(frozen=True)
class ModeMasses:
    masses: np.ndarray          # m_j = int |phi_j|^2 dx3
    remainder: float            # ||u||^2 - sum(masses), beyond-cutoff content
    total: float                # ||u||^2

    @property
    def ground_fraction(self) -> float:
        return self.masses[0] / self.total if self.total > 0 else 0.0

    @property
    def tail(self) -> float:
        """Mass outside the ground transverse mode."""
        return self.total - self.masses[0]


def mode_masses(u: Field, basis: OscillatorBasis) -> ModeMasses:
    phis = project_all(u, basis)
    masses = np.sum(np.abs(phis) ** 2, axis=1) * basis.grid.h3
    total = l2_sq_values(u.grid, u.values)
    return ModeMasses(masses, total - float(np.sum(masses)), total)


def rayleigh_quotient(u: Field) -> float:
    """||u||_Hdot^2 / ||u||_L2^2; bottom of the spectrum is 2."""
    mass = l2_sq_values(u.grid, u.values)
    if mass == 0.0:
        raise ValueError("rayleigh_quotient of the zero field")
    return hdot_sq_values(u.grid, u.values) / mass
