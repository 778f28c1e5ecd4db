"""Frequency grids and unit conventions.

All internal quantities use a single unit system:

    angular frequency  rad/fs
    time / delay       fs
    length             mm

so the vacuum speed of light is ``C_NM_PER_FS`` nanometres per femtosecond and
``omega = 2*pi*C_NM_PER_FS / wavelength_nm``.

Grids are uniform, even-length, and laid out FFT-style around the degenerate
frequency ``omega_0``::

    omega[k] = omega_0 + (k - n//2) * step

The sample at index ``n//2`` lands exactly on ``omega_0``, and the conjugate
frequency ``2*omega_0 - omega[k]`` is the exact sample ``omega[n - k]`` for all
``k >= 1``.  The single unpaired sample at ``k = 0`` is excluded from paired
quadrature; every integrand used here carries a spectral weight that is far
below round-off at the grid edge, so the omission is harmless.  Keeping the
flip exact (instead of interpolating ``2*omega_0 - omega``) is what lets the
harmonic-decomposition identities hold to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Vacuum speed of light in nm/fs (equivalently, um/ps or m/us).
C_NM_PER_FS = 299.792458


def omega_from_wavelength(wavelength_nm: float) -> float:
    """Angular frequency in rad/fs for a vacuum wavelength in nm."""
    if wavelength_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm} nm")
    return 2.0 * np.pi * C_NM_PER_FS / wavelength_nm


def wavelength_from_omega(omega: float) -> float:
    """Vacuum wavelength in nm for an angular frequency in rad/fs."""
    if omega <= 0:
        raise ValueError(f"angular frequency must be positive, got {omega} rad/fs")
    return 2.0 * np.pi * C_NM_PER_FS / omega


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency grid centred on the degenerate frequency.

    Attributes:
        omega_0: degenerate (centre) frequency, rad/fs.  Half the pump.
        omega_step: sample spacing, rad/fs.
        n_points: number of samples; must be even.
    """

    omega_0: float
    omega_step: float
    n_points: int

    def __post_init__(self) -> None:
        if self.n_points < 4 or self.n_points % 2 != 0:
            raise ValueError(
                f"n_points must be even and >= 4, got {self.n_points}"
            )
        if self.omega_step <= 0:
            raise ValueError(f"omega_step must be positive, got {self.omega_step}")
        if self.omega_0 <= 0:
            raise ValueError(f"omega_0 must be positive, got {self.omega_0}")

    @property
    def center_index(self) -> int:
        """Index of the sample that sits exactly on omega_0."""
        return self.n_points // 2

    @property
    def omega_min(self) -> float:
        return self.omega_0 - self.center_index * self.omega_step

    @property
    def omega_max(self) -> float:
        return self.omega_0 + (self.n_points - 1 - self.center_index) * self.omega_step

    @property
    def span(self) -> float:
        return (self.n_points - 1) * self.omega_step

    def omegas(self) -> np.ndarray:
        """Sample frequencies.  Built from integer offsets so that
        ``omegas()[k] - omega_0`` is exactly ``(k - n//2) * omega_step``."""
        k = np.arange(self.n_points) - self.center_index
        return self.omega_0 + k * self.omega_step

    def detunings(self) -> np.ndarray:
        """``omega - omega_0`` per sample, exact in floating point."""
        k = np.arange(self.n_points) - self.center_index
        return k * self.omega_step

    def conjugate_indices(self) -> np.ndarray:
        """Index map ``i -> j`` with ``omega[i] + omega[j] = 2*omega_0``.

        Exact involution on indices ``1..n-1``; index 0 has no partner on the
        grid and is mapped to itself (it never enters paired quadrature).
        """
        n = self.n_points
        idx = (n - np.arange(n)) % n
        idx[0] = 0
        return idx

    def quadrature_weights(self) -> np.ndarray:
        """Trapezoid weights over the conjugate-closed subrange ``1..n-1``.

        The weight of index 0 is zero, so ``(w * f).sum()`` integrates f over
        the symmetric part of the grid.  The weights are invariant under the
        conjugate flip, which keeps paired integrals exactly symmetric.
        """
        w = np.full(self.n_points, self.omega_step)
        w[0] = 0.0
        w[1] = 0.5 * self.omega_step
        w[-1] = 0.5 * self.omega_step
        return w

    def index_of(self, omega: float, tol: float = 1e-9) -> int:
        """Index of the sample nearest ``omega``; raises if off-grid."""
        pos = (omega - self.omega_min) / self.omega_step
        idx = int(round(pos))
        if idx < 0 or idx >= self.n_points:
            raise ValueError(
                f"omega={omega} rad/fs lies outside the grid "
                f"[{self.omega_min}, {self.omega_max}]"
            )
        if abs(pos - idx) * self.omega_step > tol:
            raise ValueError(
                f"omega={omega} rad/fs is {abs(pos - idx) * self.omega_step:.3e} "
                "rad/fs away from the nearest grid sample"
            )
        return idx


def make_grid(omega_0: float, span: float, n_points: int = 4096) -> FrequencyGrid:
    """Grid of ``n_points`` samples covering ``span`` rad/fs around ``omega_0``.

    The step is ``span / (n_points - 1)`` and the window is placed so one
    sample lands exactly on ``omega_0`` (see module docstring for the layout).
    """
    if span <= 0:
        raise ValueError(f"span must be positive, got {span}")
    if n_points % 2 != 0:
        raise ValueError(f"n_points must be even, got {n_points}")
    return FrequencyGrid(
        omega_0=omega_0, omega_step=span / (n_points - 1), n_points=n_points
    )
