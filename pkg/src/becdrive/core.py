"""Dimensionless unit system, Bogoliubov dispersion and thermal occupations.

Units: hbar = m = k_B = 1, energies in units of the baseline chemical
potential mu0 = U0 * n = 1, wavenumbers in units of the inverse healing
length 1/xi with xi = hbar / sqrt(m * mu0).  With this convention the
kinetic energy of mode k is simply k^2 / 2 and temperatures read as
multiples of mu0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedRegimeError

#: Unit convention, restated in output metadata by the CLI.
UNIT_CONVENTIONS = {
    "hbar": 1.0,
    "mass": 1.0,
    "k_B": 1.0,
    "mu0": 1.0,
    "healing_length": 1.0,
}


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless physical configuration of the homogeneous gas.

    ``u0 * density_n == 1`` is the unit convention mu0 = U0 n = 1 and is
    asserted at construction.  ``mode_grid`` holds the simulated k > 0
    shells; k = 0 is the condensate mode and is never simulated.
    """

    density_n: float
    atom_number_N: int
    u0: float
    temperature_T: float
    mode_grid: tuple = field(default=())

    def __post_init__(self):
        if self.u0 <= 0 or self.density_n <= 0:
            raise ValueError("u0 and density_n must be positive")
        if abs(self.u0 * self.density_n - 1.0) > 1e-12:
            raise ValueError(
                f"unit convention violated: u0*n = {self.u0 * self.density_n!r}, expected 1"
            )
        if self.atom_number_N < 1:
            raise ValueError("atom_number_N must be >= 1")
        if self.temperature_T < 0:
            raise ValueError("temperature_T must be >= 0")
        grid = tuple(float(k) for k in self.mode_grid)
        if any(k <= 0 for k in grid):
            raise ValueError("mode_grid wavenumbers must be strictly positive (k=0 excluded)")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("mode_grid must be strictly increasing")
        object.__setattr__(self, "mode_grid", grid)

    @property
    def box_volume(self) -> float:
        """Quantisation volume V = N / n implied by the atom number."""
        return self.atom_number_N / self.density_n


def dispersion(k: float, U: float, params: SystemParams) -> float:
    """Bogoliubov energy e_k = sqrt(e_kin (e_kin + 2 U n)), e_kin = k^2/2."""
    if k <= 0:
        raise ValueError(f"wavenumber must be positive, got {k!r}")
    if U < 0:
        raise UnsupportedRegimeError(
            "attractive interaction U < 0 makes the dispersion dynamically unstable"
        )
    e_kin = 0.5 * k * k
    return math.sqrt(e_kin * (e_kin + 2.0 * U * params.density_n))


def bogoliubov_uv(k: float, U: float, params: SystemParams) -> tuple[float, float]:
    """Real transformation coefficients (u_k, v_k) with u^2 - v^2 = 1.

    u, v = (1/2) sqrt(e_kin/e_k) +/- (1/2) sqrt(e_k/e_kin); u >= 1 and
    v <= 0 for repulsive interactions, v = 0 only at U = 0.
    """
    e_k = dispersion(k, U, params)
    e_kin = 0.5 * k * k
    ratio = math.sqrt(e_kin / e_k)
    u = 0.5 * (ratio + 1.0 / ratio)
    v = 0.5 * (ratio - 1.0 / ratio)
    return u, v


@dataclass(frozen=True)
class ModePhysics:
    """Per-mode static quantities at a given interaction strength."""

    k: float
    e_kin: float
    e_k: float
    u_k: float
    v_k: float

    @property
    def omega(self) -> float:
        # hbar = 1: the Bogoliubov energy is also the angular frequency
        return self.e_k


def mode_physics(k: float, U: float, params: SystemParams) -> ModePhysics:
    """Bundle dispersion and transformation coefficients for one mode."""
    u, v = bogoliubov_uv(k, U, params)
    return ModePhysics(k=k, e_kin=0.5 * k * k, e_k=dispersion(k, U, params), u_k=u, v_k=v)


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation 1/(exp(omega/T) - 1); 0 at T = 0."""
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    if T < 0:
        raise ValueError("temperature must be >= 0")
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(omega / T)


def classical_thermal_occupation(omega: float, T: float) -> float:
    """Rayleigh-Jeans equipartition occupation T/omega of the classical field."""
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    if T < 0:
        raise ValueError("temperature must be >= 0")
    return T / omega


def shell_weights(params: SystemParams, box_mode: str = "3d-shells") -> np.ndarray:
    """Degeneracy weight of each mode_grid shell for depletion sums.

    ``3d-shells`` counts the points of the discrete momentum lattice
    (2 pi / L) * Z^3 (origin excluded) whose radius falls in the bin
    around each grid k (bin edges midway between neighbours).  ``1d``
    is a plain per-mode sum with unit weight, for quick runs.
    """
    ks = np.asarray(params.mode_grid, dtype=float)
    if ks.size == 0:
        return np.zeros(0)
    if box_mode == "1d":
        return np.ones_like(ks)
    if box_mode != "3d-shells":
        raise ValueError(f"unknown box_mode {box_mode!r}")

    dk = 2.0 * math.pi / params.box_volume ** (1.0 / 3.0)
    edges = np.empty(ks.size + 1)
    edges[1:-1] = 0.5 * (ks[:-1] + ks[1:])
    first_gap = edges[1] - ks[0] if ks.size > 1 else 0.5 * ks[0]
    edges[0] = max(ks[0] - first_gap, 0.5 * dk)
    edges[-1] = ks[-1] + (ks[-1] - edges[-2] if ks.size > 1 else 0.5 * ks[0])

    n_max = int(math.ceil(edges[-1] / dk))
    axis = np.arange(-n_max, n_max + 1)
    ii, jj, ll = np.meshgrid(axis, axis, axis, indexing="ij", sparse=True)
    radii = dk * np.sqrt((ii * ii + jj * jj + ll * ll).astype(float))
    radii = radii[radii > 0.0]
    counts, _ = np.histogram(radii, bins=edges)
    return counts.astype(float)
