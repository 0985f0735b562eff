"""Pseudospectral lab for NLS ground states with partial harmonic confinement."""

from .grid import (Grid3, Field, make_grid, laplacian, inner, l2_norm_sq,
                   h_norm_sq, shift_x3, gaussian_field, random_smooth_field,
                   read_field, write_field)
from .oscillator import (OscillatorBasis, build_basis, project_phi0,
                         mode_masses, rayleigh_quotient, LAMBDA0)
from .energy import (Exponent, EnergyReport, report, gn_ratio,
                     calibrate_gn_constant, confinement_lower_bound_check,
                     scaling_sweep)

__all__ = [
    "Grid3", "Field", "make_grid", "laplacian", "inner", "l2_norm_sq",
    "h_norm_sq", "shift_x3", "gaussian_field", "random_smooth_field",
    "read_field", "write_field",
    "OscillatorBasis", "build_basis", "project_phi0", "mode_masses",
    "rayleigh_quotient", "LAMBDA0",
    "Exponent", "EnergyReport", "report", "gn_ratio",
    "calibrate_gn_constant", "confinement_lower_bound_check", "scaling_sweep",
]

__version__ = "0.1.0"
