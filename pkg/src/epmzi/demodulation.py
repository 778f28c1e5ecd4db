"""Phase modulation, lock-in extraction, and down-sampled interferograms.

The arm-phase difference is swept linearly in lab time, dphi(t) = 2 pi nu21 t,
and the coincidence rate at each delay step is demodulated at harmonics m = 1, 2
of the sweep against a reference that is offset by the delay-dependent phase
m * omega_r * tau of an optical reference at omega_r.  The in-phase/quadrature
pair at harmonic m assembles into

    Z_mf(tau) = X + iY = A_mf * exp(-i*(m*(w0 - w_r)*tau + theta_mf)),

a complex interferogram whose carrier is the *down-sampled* frequency
m*(w0 - w_r) instead of m*w0, so a coarse delay grid (tens of optical periods
per step) still samples it well.  The closed quadrature forms are

    Z_1f(tau) = Integral eta(w) {1 + |eta(2w0-w)|^2} e^{-i(w-w_r)tau} S(w) dw
    Z_2f(tau) = (1/2) e^{-2i(w0-w_r)tau} Integral eta(w) eta(2w0-w) S(w) dw

with amplitudes exactly half their fully-sampled counterparts.

The reference phase handed to the lock-in is the *true* instantaneous phase:
physically the reference beam co-propagates through the interferometer, so
slow phase jitter is common to signal and reference and largely cancels in the
demodulation, while the same jitter destroys a fully-sampled scan.  Noise is
reproducible: every delay step draws from its own generator seeded by
(seed, step_index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import omega_from_wavelength
from .interferometer import (
    ComplexInterferogram,
    Interferogram,
    MziConfig,
    rate_0f,
    rate_1f_integrand,
    rate_2f_integrand,
    rate_full,
)
from .media import TransferFunction
from .spectra import Spectrum

_OMEGA_R_DEFAULT = omega_from_wavelength(633.0)


@dataclass(frozen=True)
class ModulationConfig:
    """Phase-sweep and lock-in sampling parameters.

    ``omega_r`` is the optical reference frequency (rad/fs) subtracted from
    the carrier by the demodulation.  ``nu21_khz * dwell_time_ms`` must be a
    whole number of modulation periods; averaging over fractional periods
    would alias harmonics into each other.
    """

    omega_r: float = _OMEGA_R_DEFAULT
    nu21_khz: float = 20.0
    samples_per_period: int = 256
    dwell_time_ms: float = 1.0

    def __post_init__(self) -> None:
        if self.omega_r <= 0:
            raise ValueError(f"omega_r must be positive, got {self.omega_r}")
        if self.nu21_khz <= 0:
            raise ValueError(f"nu21_khz must be positive, got {self.nu21_khz}")
        if self.samples_per_period < 8:
            raise ValueError(
                f"samples_per_period must be >= 8, got {self.samples_per_period}"
            )
        periods = self.nu21_khz * self.dwell_time_ms
        if periods < 1.0 - 1e-9 or abs(periods - round(periods)) > 1e-9:
            raise ValueError(
                f"dwell_time_ms * nu21_khz = {periods} must be a whole number "
                "of modulation periods >= 1"
            )

    @property
    def n_periods(self) -> int:
        return int(round(self.nu21_khz * self.dwell_time_ms))

    @property
    def n_samples(self) -> int:
        return self.n_periods * self.samples_per_period

    def ideal_phases(self) -> np.ndarray:
        """Jitter-free phase track 2 pi nu21 t over the dwell."""
        return 2.0 * np.pi * np.arange(self.n_samples) / self.samples_per_period


@dataclass(frozen=True)
class NoiseConfig:
    """Poisson counting noise and interferometer phase jitter.

    ``mean_counts_per_sample`` is the Poisson mean for one lock-in sample at
    unit normalized rate; a delay step therefore collects about
    ``rate * mean_counts_per_sample * n_samples`` counts.
    ``phase_jitter_sigma`` is the per-sample standard deviation (rad) of a
    Gaussian random walk added to the swept phase.
    """

    poisson_enabled: bool = False
    mean_counts_per_sample: float = 1000.0
    phase_jitter_sigma: float = 0.0
    seed: int = 12345

    def __post_init__(self) -> None:
        if self.poisson_enabled and self.mean_counts_per_sample <= 0:
            raise ValueError(
                "mean_counts_per_sample must be positive when Poisson noise is on"
            )
        if self.phase_jitter_sigma < 0:
            raise ValueError(
                f"phase_jitter_sigma must be >= 0, got {self.phase_jitter_sigma}"
            )


@dataclass(frozen=True)
class SweepSamples:
    """One delay step's sampled rates and the true phase at each sample."""

    rates: np.ndarray
    delta_phi: np.ndarray


@dataclass(frozen=True)
class LockinOutput:
    """In-phase/quadrature pair of one demodulation, phase = atan2(y, x)."""

    x: float
    y: float
    amplitude: float
    phase: float


def _step_rng(noise: NoiseConfig, step_index: int) -> np.random.Generator:
    return np.random.default_rng((noise.seed, step_index))


def _harmonic_series(
    r0: float, i1: complex, c2: complex, phases: np.ndarray
) -> np.ndarray:
    """Rate at each swept phase via the exact harmonic regrouping."""
    return (
        r0
        + 2.0 * np.real(np.exp(1j * phases) * i1)
        + np.real(np.exp(2j * phases) * c2)
    )


def _apply_noise(
    rates: np.ndarray,
    phases: np.ndarray,
    noise: NoiseConfig | None,
    rng: np.random.Generator | None,
    rebuild,
) -> SweepSamples:
    if noise is None or (
        not noise.poisson_enabled and noise.phase_jitter_sigma == 0.0
    ):
        return SweepSamples(rates, phases)
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    if noise.phase_jitter_sigma > 0.0:
        walk = np.cumsum(rng.normal(0.0, noise.phase_jitter_sigma, phases.size))
        phases = phases + walk
        rates = rebuild(phases)
    if noise.poisson_enabled:
        lam = np.clip(rates, 0.0, None) * noise.mean_counts_per_sample
        rates = rng.poisson(lam) / noise.mean_counts_per_sample
    return SweepSamples(rates, phases)


def synthesize_timeseries(
    tau: float,
    eta: TransferFunction,
    spectrum: Spectrum,
    cfg: MziConfig,
    mod: ModulationConfig,
    noise: NoiseConfig | None = None,
    rng: np.random.Generator | None = None,
) -> SweepSamples:
    """Coincidence-rate samples over one dwell at delay ``tau``.

    With noise off the samples equal the full rate evaluated at the swept
    phases.  Jitter perturbs the phase track (and the rates follow it);
    Poisson noise replaces each sample by a scaled count draw.  ``rng``
    overrides the generator (used by sweeps to give each step its own stream).
    """
    r0 = rate_0f(tau, eta, spectrum, cfg)
    i1 = rate_1f_integrand(tau, eta, spectrum, cfg)
    c2 = rate_2f_integrand(eta, spectrum, cfg) * np.exp(
        -2j * eta.grid.omega_0 * tau
    )
    phases = mod.ideal_phases()
    rates = _harmonic_series(r0, i1, c2, phases)
    return _apply_noise(
        rates, phases, noise, rng, lambda p: _harmonic_series(r0, i1, c2, p)
    )


def lockin_extract(
    series: np.ndarray,
    harmonic: int,
    tau: float,
    cfg: MziConfig,
    mod: ModulationConfig,
    reference_phase: np.ndarray | None = None,
) -> LockinOutput:
    """Demodulate a rate series at ``harmonic`` in {0, 1, 2}.

    Harmonic 0 is the plain mean.  ``reference_phase`` is the phase track the
    reference channel saw; default is the ideal sweep.  The series must cover
    a whole number of modulation periods.
    """
    series = np.asarray(series, dtype=float)
    if harmonic not in (0, 1, 2):
        raise ValueError(f"harmonic must be 0, 1 or 2, got {harmonic}")
    if series.ndim != 1 or series.size == 0:
        raise ValueError("series must be a non-empty 1-D array")
    if series.size % mod.samples_per_period != 0:
        raise ValueError(
            f"series length {series.size} does not cover whole modulation "
            f"periods of {mod.samples_per_period} samples"
        )
    if harmonic == 0:
        mean = float(series.mean())
        return LockinOutput(x=mean, y=0.0, amplitude=abs(mean), phase=0.0)
    if reference_phase is None:
        reference_phase = (
            2.0 * np.pi * np.arange(series.size) / mod.samples_per_period
        )
    else:
        reference_phase = np.asarray(reference_phase, dtype=float)
        if reference_phase.shape != series.shape:
            raise ValueError("reference_phase must match the series length")
    arg = harmonic * (reference_phase - mod.omega_r * tau)
    x = float(np.mean(series * np.cos(arg)))
    y = -float(np.mean(series * np.sin(arg)))
    return LockinOutput(
        x=x, y=y, amplitude=float(np.hypot(x, y)), phase=float(np.arctan2(y, x))
    )


def downsampled_z1f(
    tau_axis: np.ndarray,
    eta: TransferFunction,
    spectrum: Spectrum,
    cfg: MziConfig,
    mod: ModulationConfig,
) -> ComplexInterferogram:
    """Analytic down-sampled 1f interferogram (no lock-in simulation)."""
    tau_axis = np.asarray(tau_axis, dtype=float)
    i1 = rate_1f_integrand(tau_axis, eta, spectrum, cfg)
    values = np.exp(1j * mod.omega_r * tau_axis) * i1
    return ComplexInterferogram(tau_axis, values, harmonic=1)


def downsampled_z2f(
    tau_axis: np.ndarray,
    eta: TransferFunction,
    spectrum: Spectrum,
    cfg: MziConfig,
    mod: ModulationConfig,
) -> ComplexInterferogram:
    """Analytic down-sampled 2f interferogram (no lock-in simulation)."""
    tau_axis = np.asarray(tau_axis, dtype=float)
    i2 = rate_2f_integrand(eta, spectrum, cfg)
    carrier = np.exp(-2j * (eta.grid.omega_0 - mod.omega_r) * tau_axis)
    return ComplexInterferogram(tau_axis, 0.5 * carrier * i2, harmonic=2)


def downsampled_a0f(
    tau_axis: np.ndarray,
    eta: TransferFunction,
    spectrum: Spectrum,
    cfg: MziConfig,
) -> Interferogram:
    """Analytic 0f (phase-averaged) interferogram."""
    tau_axis = np.asarray(tau_axis, dtype=float)
    return Interferogram(tau_axis, rate_0f(tau_axis, eta, spectrum, cfg), kind="comp_0f")


def lockin_sweep(
    tau_axis: np.ndarray,
    eta: TransferFunction,
    spectrum: Spectrum,
    cfg: MziConfig,
    mod: ModulationConfig,
    noise: NoiseConfig | None = None,
) -> tuple[Interferogram, ComplexInterferogram, ComplexInterferogram]:
    """Simulated lock-in scan: (A_0f, Z_1f, Z_2f) over a delay axis.

    Runs the synthesize/demodulate chain at every delay step.  Noise-free it
    reproduces the analytic down-sampled forms to round-off; with noise each
    step draws from its own generator seeded by (seed, step index), so a scan
    is reproducible step by step.
    """
    tau_axis = np.asarray(tau_axis, dtype=float)
    r0_all = rate_0f(tau_axis, eta, spectrum, cfg)
    i1_all = rate_1f_integrand(tau_axis, eta, spectrum, cfg)
    i2 = rate_2f_integrand(eta, spectrum, cfg)
    phases = mod.ideal_phases()
    a0 = np.empty(tau_axis.size)
    z1 = np.empty(tau_axis.size, dtype=complex)
    z2 = np.empty(tau_axis.size, dtype=complex)
    for k, tau in enumerate(tau_axis):
        c2 = i2 * np.exp(-2j * eta.grid.omega_0 * tau)
        rates = _harmonic_series(r0_all[k], i1_all[k], c2, phases)
        rng = _step_rng(noise, k) if noise is not None else None
        samples = _apply_noise(
            rates,
            phases,
            noise,
            rng,
            lambda p, r0=r0_all[k], i1=i1_all[k], c2=c2: _harmonic_series(
                r0, i1, c2, p
            ),
        )
        a0[k] = lockin_extract(samples.rates, 0, tau, cfg, mod).x
        out1 = lockin_extract(samples.rates, 1, tau, cfg, mod, samples.delta_phi)
        out2 = lockin_extract(samples.rates, 2, tau, cfg, mod, samples.delta_phi)
        z1[k] = out1.x + 1j * out1.y
        z2[k] = out2.x + 1j * out2.y
    return (
        Interferogram(tau_axis, a0, kind="comp_0f"),
        ComplexInterferogram(tau_axis, z1, harmonic=1),
        ComplexInterferogram(tau_axis, z2, harmonic=2),
    )


def fully_sampled_scan(
    tau_axis: np.ndarray,
    eta: TransferFunction,
    spectrum: Spectrum,
    cfg: MziConfig,
    delta_phi: float = 0.0,
    noise: NoiseConfig | None = None,
) -> Interferogram:
    """Unmodulated scan: one rate sample per delay step at a static phase.

    Phase jitter accumulates per step (there is no reference to demodulate
    against), which is what scrambles the optical-frequency fringes of a
    fully-sampled scan; Poisson noise draws one count per step with mean
    ``rate * mean_counts_per_sample``.
    """
    tau_axis = np.asarray(tau_axis, dtype=float)
    if noise is None or (
        not noise.poisson_enabled and noise.phase_jitter_sigma == 0.0
    ):
        values = rate_full(tau_axis, delta_phi, eta, spectrum, cfg)
        return Interferogram(tau_axis, values, kind="fully_sampled")
    phase = delta_phi
    values = np.empty(tau_axis.size)
    for k, tau in enumerate(tau_axis):
        rng = _step_rng(noise, k)
        if noise.phase_jitter_sigma > 0.0:
            phase += rng.normal(0.0, noise.phase_jitter_sigma)
        rate = rate_full(float(tau), phase, eta, spectrum, cfg)
        if noise.poisson_enabled:
            lam = max(rate, 0.0) * noise.mean_counts_per_sample
            rate = rng.poisson(lam) / noise.mean_counts_per_sample
        values[k] = rate
    return Interferogram(tau_axis, values, kind="fully_sampled")
