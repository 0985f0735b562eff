"""Periodic 3D spectral grid, field container, FFT calculus and quadrature.

The computational box is [-L1/2, L1/2) x [-L2/2, L2/2) x [-L3/2, L3/2) with
uniform spacing and periodic boundary conditions.  Arrays are laid out with
axis order (x1, x2, x3), x3 fastest (C order).  The trap x1^2 + x2^2 is
sampled on the box without periodization.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field as dc_field

import numpy as np

FIELD_MAGIC = b"NLS3"
FIELD_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Grid3:
    """Uniform periodic grid with precomputed wavenumbers and trap samples.

    n1, n2, n3 : cell counts per axis (>= 8 each; powers of two recommended)
    L1, L2, L3 : box side lengths, trap frequency = 1 units
    """

    n1: int
    n2: int
    n3: int
    L1: float
    L2: float
    L3: float

    def __post_init__(self) -> None:
        for n in (self.n1, self.n2, self.n3):
            if int(n) < 8:
                raise ValueError(f"grid needs at least 8 cells per axis, got {n}")
        for L in (self.L1, self.L2, self.L3):
            if not L > 0:
                raise ValueError(f"box lengths must be positive, got {L}")

        h1 = self.L1 / self.n1
        h2 = self.L2 / self.n2
        h3 = self.L3 / self.n3
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "h3", h3)
        object.__setattr__(self, "cellvol", h1 * h2 * h3)

        # node coordinates, x = -L/2 + h*j so x = 0 sits at index n//2
        for name, n, h, L in (("x1", self.n1, h1, self.L1),
                              ("x2", self.n2, h2, self.L2),
                              ("x3", self.n3, h3, self.L3)):
            object.__setattr__(self, name, -L / 2.0 + h * np.arange(n))

        # standard periodic wavenumber ordering [0, 1, ..., n/2-1, -n/2, ..., -1]
        object.__setattr__(self, "k1", 2.0 * np.pi * np.fft.fftfreq(self.n1, d=h1))
        object.__setattr__(self, "k2", 2.0 * np.pi * np.fft.fftfreq(self.n2, d=h2))
        object.__setattr__(self, "k3", 2.0 * np.pi * np.fft.fftfreq(self.n3, d=h3))

        ksq = (self.k1[:, None, None] ** 2
               + self.k2[None, :, None] ** 2
               + self.k3[None, None, :] ** 2)
        object.__setattr__(self, "ksq", ksq)

        trap = self.x1[:, None] ** 2 + self.x2[None, :] ** 2
        object.__setattr__(self, "trap2d", trap)
        object.__setattr__(self, "trap", trap[:, :, None])

        for arr in (self.x1, self.x2, self.x3, self.k1, self.k2, self.k3,
                    self.ksq, self.trap2d, self.trap):
            arr.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    @property
    def size(self) -> int:
        return self.n1 * self.n2 * self.n3

    @property
    def volume(self) -> float:
        return self.L1 * self.L2 * self.L3

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid3):
            return NotImplemented
        return (self.shape == other.shape
                and (self.L1, self.L2, self.L3) == (other.L1, other.L2, other.L3))

    def __hash__(self) -> int:
        return hash((self.shape, self.L1, self.L2, self.L3))


def make_grid(n1: int, n2: int, n3: int, L1: float, L2: float, L3: float) -> Grid3:
    """Build a Grid3, rejecting undersized or non-positive geometry."""
    return Grid3(int(n1), int(n2), int(n3), float(L1), float(L2), float(L3))


@dataclass(frozen=True)
class Field:
    """Complex state on a Grid3; values are read-only once constructed."""

    grid: Grid3
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.complex128, order="C")
        if vals.shape != self.grid.shape:
            raise ValueError(f"field shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise ValueError("field contains non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def copy_values(self) -> np.ndarray:
        return np.array(self.values)


def field_from_values(grid: Grid3, values: np.ndarray) -> Field:
    return Field(grid, values)


def zero_field(grid: Grid3) -> Field:
    return Field(grid, np.zeros(grid.shape, dtype=np.complex128))


# ---------------------------------------------------------------------------
# spectral calculus on raw arrays (used by the solvers) and Field wrappers

def laplacian_values(grid: Grid3, values: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(-grid.ksq * np.fft.fftn(values))

def gradient_sq_values(grid: Grid3, values: np.ndarray) -> float:
    """Kinetic term int |grad u|^2 via Parseval."""
    vhat = np.fft.fftn(values)
    return float(np.sum(grid.ksq * (vhat.real ** 2 + vhat.imag ** 2))
                 * grid.cellvol / grid.size)

def trap_moment_values(grid: Grid3, values: np.ndarray) -> float:
    """int (x1^2 + x2^2) |u|^2 on the box."""
    return float(np.sum(grid.trap * (values.real ** 2 + values.imag ** 2)) * grid.cellvol)

def hdot_sq_values(grid: Grid3, values: np.ndarray) -> float:
    return gradient_sq_values(grid, values) + trap_moment_values(grid, values)

def l2_sq_values(grid: Grid3, values: np.ndarray) -> float:
    return float(np.sum(values.real ** 2 + values.imag ** 2) * grid.cellvol)


def laplacian(f: Field) -> Field:
    """Spectral Laplacian; exact on resolved Fourier modes."""
    return Field(f.grid, laplacian_values(f.grid, f.values))


def inner(f: Field, g: Field) -> complex:
    """L^2 inner product <f, g> = int conj(f) g dx (rectangle quadrature)."""
    if f.grid != g.grid:
        raise ValueError("inner: fields live on different grids")
    return complex(np.vdot(f.values, g.values) * f.grid.cellvol)


def l2_norm_sq(f: Field) -> float:
    return l2_sq_values(f.grid, f.values)


def h_norm_sq(f: Field) -> float:
    """Full H norm squared: |grad u|^2 + trap moment + L2 mass."""
    return hdot_sq_values(f.grid, f.values) + l2_sq_values(f.grid, f.values)


def shift_x3_values(grid: Grid3, values: np.ndarray, k: float) -> np.ndarray:
    vhat = np.fft.fft(values, axis=2)
    vhat *= np.exp(-1j * grid.k3 * k)[None, None, :]
    return np.fft.ifft(vhat, axis=2)


def shift_x3(f: Field, k: float) -> Field:
    """Periodic translation u(x1,x2,x3-k) via the Fourier shift theorem."""
    return Field(f.grid, shift_x3_values(f.grid, f.values, float(k)))


def spectral_tail_fraction(grid: Grid3, values: np.ndarray) -> float:
    """Fraction of spectral mass with |k_i| >= (2/3) k_max on any axis.

    Used as the resolution diagnostic: smooth, resolved fields have a tail
    below 1e-6.
    """
    vhat = np.fft.fftn(values)
    power = vhat.real ** 2 + vhat.imag ** 2
    total = float(np.sum(power))
    if total == 0.0:
        return 0.0
    masks = []
    for k in (grid.k1, grid.k2, grid.k3):
        kmax = np.max(np.abs(k))
        masks.append(np.abs(k) >= (2.0 / 3.0) * kmax)
    shell = (masks[0][:, None, None] | masks[1][None, :, None]
             | masks[2][None, None, :])
    return float(np.sum(power[shell])) / total


def boundary_mass(grid: Grid3, values: np.ndarray) -> float:
    """Mass on the outermost cell layer of the box (validity diagnostic)."""
    dens = (values.real ** 2 + values.imag ** 2) * grid.cellvol
    shell = np.zeros(grid.shape, dtype=bool)
    shell[0, :, :] = shell[-1, :, :] = True
    shell[:, 0, :] = shell[:, -1, :] = True
    shell[:, :, 0] = shell[:, :, -1] = True
    return float(np.sum(dens[shell]))


def random_smooth_field(grid: Grid3, rng: np.random.Generator,
                        kc_frac: float = 0.25, localized: bool = True,
                        norm: float = 1.0) -> Field:
    """Random band-limited field, optionally with a spatial Gaussian envelope.

    kc_frac sets the spectral decay scale as a fraction of k_max, keeping the
    high-wavenumber tail far below the smoothness threshold.
    """
    coeffs = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    kmax = min(np.max(np.abs(grid.k1)), np.max(np.abs(grid.k2)), np.max(np.abs(grid.k3)))
    kc = kc_frac * kmax
    coeffs *= np.exp(-grid.ksq / (2.0 * kc * kc))
    vals = np.fft.ifftn(coeffs)
    if localized:
        w1, w2, w3 = grid.L1 / 6.0, grid.L2 / 6.0, grid.L3 / 6.0
        env = np.exp(-(grid.x1[:, None, None] ** 2) / (2 * w1 ** 2)
                     - (grid.x2[None, :, None] ** 2) / (2 * w2 ** 2)
                     - (grid.x3[None, None, :] ** 2) / (2 * w3 ** 2))
        vals = vals * env
    nrm = np.sqrt(l2_sq_values(grid, vals))
    if nrm == 0.0:
        raise ValueError("degenerate random field")
    return Field(grid, vals * (norm / nrm))


def gaussian_field(grid: Grid3, mass_norm: float = 1.0,
                   widths: tuple[float, float, float] = (1.0, 1.0, 1.0)) -> Field:
    """Separable Gaussian exp(-sum x_i^2 / (2 w_i^2)) scaled to L2 norm mass_norm."""
    w1, w2, w3 = widths
    vals = np.exp(-(grid.x1[:, None, None] ** 2) / (2 * w1 ** 2)
                  - (grid.x2[None, :, None] ** 2) / (2 * w2 ** 2)
                  - (grid.x3[None, None, :] ** 2) / (2 * w3 ** 2)).astype(np.complex128)
    nrm = np.sqrt(l2_sq_values(grid, vals))
    return Field(grid, vals * (mass_norm / nrm))


# ---------------------------------------------------------------------------
# field file format: magic "NLS3", u32 version, u32 n1 n2 n3,
# f64 L1 L2 L3, then n1*n2*n3 interleaved (re, im) f64, little-endian,
# x3 fastest.

_HEADER = struct.Struct("<4sIIIIddd")


def write_field(path, f: Field) -> None:
    g = f.grid
    header = _HEADER.pack(FIELD_MAGIC, FIELD_FORMAT_VERSION,
                          g.n1, g.n2, g.n3, g.L1, g.L2, g.L3)
    data = np.empty((g.size, 2), dtype="<f8")
    flat = f.values.reshape(-1)
    data[:, 0] = flat.real
    data[:, 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError(f"{path}: truncated field file header")
        magic, version, n1, n2, n3, L1, L2, L3 = _HEADER.unpack(raw)
        if magic != FIELD_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {FIELD_MAGIC!r}")
        if version != FIELD_FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        grid = make_grid(n1, n2, n3, L1, L2, L3)
        payload = fh.read(16 * grid.size)
        if len(payload) != 16 * grid.size:
            raise ValueError(f"{path}: truncated field payload")
    data = np.frombuffer(payload, dtype="<f8").reshape(grid.size, 2)
    vals = (data[:, 0] + 1j * data[:, 1]).reshape(grid.shape)
    return Field(grid, vals)
