"""Single-photon marginal spectra on a frequency grid.

The spectral density S(omega) lives on a :class:`~epmzi.grid.FrequencyGrid`
and is normalized so its trapezoid integral over the grid is 1.  The source is
degenerate: S is expected (not enforced) to be symmetric about ``omega_0``,
which is what the anti-correlated pair state implies for the marginal.

Spectra constructed here evaluate their profile on the exact integer
detunings of the grid, so symmetric profiles are bit-exactly symmetric under
the conjugate index flip.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import C_NM_PER_FS, FrequencyGrid


@dataclass(frozen=True)
class Spectrum:
    """Normalized spectral density sampled on ``grid`` (units 1/(rad/fs))."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.n_points} points)"
            )
        if np.any(values < 0):
            raise ValueError("spectral density must be non-negative")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        """Trapezoid integral of the density over the full grid."""
        return float(np.trapezoid(self.values, dx=self.grid.omega_step))

    def normalized(self) -> "Spectrum":
        total = self.integral()
        if total <= 0:
            raise ValueError("cannot normalize a spectrum with zero integral")
        return Spectrum(self.grid, self.values / total)


def _checked_fwhm(grid: FrequencyGrid, fwhm_omega: float) -> None:
    if fwhm_omega <= 0:
        raise ValueError(f"fwhm must be positive, got {fwhm_omega} rad/fs")
    if grid.span < 4.0 * fwhm_omega:
        warnings.warn(
            f"grid span {grid.span:.4g} rad/fs is below 4x the spectral FWHM "
            f"({fwhm_omega:.4g} rad/fs); edge truncation will bias rates",
            stacklevel=3,
        )


def gaussian_spectrum(grid: FrequencyGrid, fwhm_omega: float) -> Spectrum:
    """Gaussian density exp(-(omega-omega_0)^2/alpha^2) with
    ``alpha = fwhm / (2*sqrt(ln 2))``, normalized on the grid."""
    _checked_fwhm(grid, fwhm_omega)
    alpha = fwhm_omega / (2.0 * np.sqrt(np.log(2.0)))
    values = np.exp(-((grid.detunings() / alpha) ** 2)) / (
        np.sqrt(np.pi) * alpha
    )
    return Spectrum(grid, values).normalized()


def super_gaussian_spectrum(
    grid: FrequencyGrid, fwhm_omega: float, order: int
) -> Spectrum:
    """Flat-topped density exp(-((omega-omega_0)^2/a^2)^order).

    ``a`` is chosen so the half-maximum points sit at ``omega_0 +- fwhm/2``
    for any order; order 1 reduces to :func:`gaussian_spectrum`.
    """
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise ValueError(f"order must be an integer >= 1, got {order!r}")
    _checked_fwhm(grid, fwhm_omega)
    a = fwhm_omega / (2.0 * np.log(2.0) ** (1.0 / (2.0 * order)))
    values = np.exp(-(((grid.detunings() / a) ** 2) ** order))
    return Spectrum(grid, values).normalized()


def load_spectrum(path: str, grid: FrequencyGrid) -> Spectrum:
    """Load a measured spectrum from a two-column CSV onto the grid.

    The file must have a header row ``wavelength_nm,counts``.  Counts are
    converted to a spectral density in omega (Jacobian lambda^2/(2 pi c)),
    linearly resampled onto the grid, clamped at zero, and normalized.
    Negative counts are clamped with a warning; a file whose wavelength range
    does not cover the grid is an error.
    """
    wavelengths = []
    counts = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty spectrum file")
        header = [h.strip().lower() for h in header]
        if header[:2] != ["wavelength_nm", "counts"]:
            raise ValueError(
                f"{path}: expected header 'wavelength_nm,counts', got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                wavelengths.append(float(row[0]))
                counts.append(float(row[1]))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row}") from exc
    if len(wavelengths) < 2:
        raise ValueError(f"{path}: need at least two samples, got {len(wavelengths)}")

    lam = np.asarray(wavelengths)
    cts = np.asarray(counts)
    if np.any(lam <= 0):
        raise ValueError(f"{path}: wavelengths must be positive")
    if np.any(cts < 0):
        warnings.warn(
            f"{path}: {int(np.sum(cts < 0))} negative count value(s) clamped to 0",
            stacklevel=2,
        )
        cts = np.clip(cts, 0.0, None)

    # Convert to an omega-axis density: S_omega = S_lambda * lambda^2/(2 pi c).
    omega = 2.0 * np.pi * C_NM_PER_FS / lam
    density = cts * lam**2 / (2.0 * np.pi * C_NM_PER_FS)
    order = np.argsort(omega)
    omega = omega[order]
    density = density[order]

    lo, hi = grid.omega_min, grid.omega_max
    if omega[0] > lo or omega[-1] < hi:
        raise ValueError(
            f"{path}: file covers [{omega[0]:.6g}, {omega[-1]:.6g}] rad/fs but the "
            f"grid needs [{lo:.6g}, {hi:.6g}] rad/fs"
        )
    resampled = np.interp(grid.omegas(), omega, density)
    return Spectrum(grid, np.clip(resampled, 0.0, None)).normalized()
