"""Sample transfer functions: slabs, notch filters, Kramers-Kronig phase.

A sample is a passive linear filter eta(omega) applied to one interferometer
arm, with |eta| <= 1.  Fields are written with the exp(-i*omega*t) sign
convention (the delay arm carries exp(+i*omega*tau) for a positive delay), so
a causal impulse response corresponds to eta analytic in the upper half of the
complex omega plane.  For a minimum-phase filter that means

    ln eta = ln|eta| + i*phi   with   phi = H[ln|eta|],

where H is the analytic-signal Hilbert transform (H[cos] = sin).  The same
convention makes a Lorentzian absorption line

    ln|eta| = -A*g^2/((w-wc)^2+g^2)  ->  phi = -A*g*(w-wc)/((w-wc)^2+g^2),

the familiar Lorentz-oscillator dispersion shape.  The discrete transform is
evaluated on a constant-padded copy of the grid so the periodic wrap of the
FFT happens far from the band of interest.

Note on slabs: ``eta_slab`` keeps only the Taylor terms beyond the constant
group delay of the bulk medium.  With ``alpha = 0`` the response is a chirp
centred at t = 0 and is *not* causal as written; that is the usual
"re-balanced interferometer" idealization, not a physics bug.  Causality
checks should use a slab whose ``alpha * length`` exceeds its dispersive
spread.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .grid import FrequencyGrid


@dataclass(frozen=True)
class TransferFunction:
    """Complex sample response eta(omega) on ``grid``, |eta| <= 1."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.n_points} points)"
            )
        mags = np.abs(values)
        if np.any(mags > 1.0 + 1e-12):
            raise ValueError(
                f"|eta| exceeds 1 (max {mags.max():.12f}); passive samples only"
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SlabParams:
    """Taylor coefficients of a transparent slab's phase, per mm.

    ``arg eta = (alpha*d + beta*d^2 + gamma*d^3) * length`` with
    ``d = omega - omega_0``.  ``beta`` is half the group-velocity dispersion
    k'' (fs^2/mm); ``alpha`` is the residual inverse group velocity after the
    bulk delay has been balanced out (fs/mm).
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    length: float = 1.0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError(f"slab length must be >= 0 mm, got {self.length}")


@dataclass(frozen=True)
class NotchParams:
    """Arctan band-stop magnitude parameters.

    ``|eta| = 1/2 + arctan(steepness*((omega-omega_n)^2 - width^2))/pi``:
    a dip of half-width ``width`` (rad/fs) centred at ``omega_n`` whose edges
    sharpen as ``steepness`` (fs^2/rad^2) grows, approaching an ideal
    rectangular notch.
    """

    omega_n: float
    width: float
    steepness: float

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError(f"notch width must be positive, got {self.width}")
        if self.steepness <= 0:
            raise ValueError(
                f"notch steepness must be positive, got {self.steepness}"
            )


def eta_identity(grid: FrequencyGrid) -> TransferFunction:
    """No sample: eta = 1 everywhere."""
    return TransferFunction(grid, np.ones(grid.n_points, dtype=complex))


def eta_slab(grid: FrequencyGrid, params: SlabParams) -> TransferFunction:
    """Transparent dispersive slab, |eta| = 1."""
    d = grid.detunings()
    phase = (
        params.alpha * d + params.beta * d**2 + params.gamma * d**3
    ) * params.length
    return TransferFunction(grid, np.exp(1j * phase))


def notch_magnitude(grid: FrequencyGrid, params: NotchParams) -> np.ndarray:
    """Band-stop magnitude profile, clipped to [0, 1]."""
    d = grid.omegas() - params.omega_n
    mag = 0.5 + np.arctan(params.steepness * (d**2 - params.width**2)) / np.pi
    return np.clip(mag, 0.0, 1.0)


def _padded(values: np.ndarray, pad_factor: int) -> tuple[np.ndarray, slice]:
    """Constant-edge padding to ``pad_factor`` times the original length."""
    n = values.size
    extra = (pad_factor - 1) * n
    left = extra // 2
    right = extra - left
    return np.pad(values, (left, right), mode="edge"), slice(left, left + n)


def kramers_kronig_phase(
    magnitude: np.ndarray,
    grid: FrequencyGrid,
    pad_factor: int = 4,
    floor: float = 1e-6,
) -> np.ndarray:
    """Minimum phase implied by a magnitude profile.

    The magnitude is floored at ``floor``, log-transformed, constant-padded to
    ``pad_factor`` times the grid, and Hilbert-transformed; the sign is the
    causal branch for this package's field convention (see module docstring).
    """
    magnitude = np.asarray(magnitude, dtype=float)
    if magnitude.shape != (grid.n_points,):
        raise ValueError(
            f"magnitude shape {magnitude.shape} does not match grid "
            f"({grid.n_points} points)"
        )
    if grid.n_points < 64:
        raise ValueError(
            f"grid too small for a stable phase transform "
            f"({grid.n_points} points, need >= 64)"
        )
    if np.any(magnitude < 0):
        raise ValueError("magnitude must be non-negative")
    if not np.any(magnitude > 0):
        raise ValueError("magnitude is zero everywhere")
    if pad_factor < 1:
        raise ValueError(f"pad_factor must be >= 1, got {pad_factor}")
    log_mag = np.log(np.maximum(magnitude, floor))
    padded, core = _padded(log_mag, pad_factor)
    phase = np.imag(hilbert(padded))
    return phase[core]


def eta_notch(
    grid: FrequencyGrid,
    params: NotchParams,
    pad_factor: int = 4,
    floor: float = 1e-6,
) -> TransferFunction:
    """Notch filter with Kramers-Kronig (minimum) phase."""
    mag = notch_magnitude(grid, params)
    phase = kramers_kronig_phase(mag, grid, pad_factor=pad_factor, floor=floor)
    return TransferFunction(grid, mag * np.exp(1j * phase))


def anticausal_energy_fraction(
    eta: TransferFunction, pad_factor: int = 4
) -> float:
    """Fraction of impulse-response energy at strictly negative times.

    ``eta`` is constant-padded to ``pad_factor`` times the grid (the same
    edge extension the phase transform uses) and transformed to the time
    domain; with the upper-half-plane analyticity convention of this module
    that is ``np.fft.fft``, whose bins past the midpoint hold t < 0.  A
    correctly signed minimum-phase filter scores well below 1e-3; flipping
    the phase sign moves the scattered energy to negative times.

    The constant extension suits filters that settle to a flat background at
    the band edges.  A transparent slab never settles (|eta| = 1 chirping
    everywhere), so constant pads would park three quarters of the energy in
    blocks at t = 0; evaluate slabs with ``pad_factor=1``, where the periodic
    grid is its own natural extension.
    """
    if pad_factor < 1:
        raise ValueError(f"pad_factor must be >= 1, got {pad_factor}")
    padded, _ = _padded(eta.values, pad_factor)
    impulse = np.fft.fft(padded)
    total = float(np.sum(np.abs(impulse) ** 2))
    if total == 0.0:
        return 0.0
    negative = impulse[impulse.size // 2 + 1 :]
    return float(np.sum(np.abs(negative) ** 2) / total)
