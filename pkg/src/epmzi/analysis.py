"""Spectral analysis of interferograms: FFT, phase fits, response recovery.

The delay-domain transform used throughout is

    Z(W) = dtau * sum_n z(tau_n) * exp(+i W tau_n),

which maps the down-sampled kernel exp(-i(w - w_r)tau) back to a peak at
W = w - w_r; adding m*omega_r to the axis restores absolute frequency for a
harmonic-m interferogram (the interferogram itself does not know the
reference, so ``omega_r`` is an explicit argument).  Phases are only
meaningful where there is signal, so every recovered spectrum carries a valid
mask (5% of peak magnitude) and phase unwrapping runs independently inside
each contiguous valid run.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .demodulation import _OMEGA_R_DEFAULT
from .interferometer import ComplexInterferogram, Interferogram

VALID_MASK_FRACTION = 0.05


@dataclass(frozen=True)
class RecoveredSpectrum:
    """Magnitude/phase spectrum on an absolute frequency axis.

    ``magnitude`` is normalized to a maximum of 1; ``peak_value`` holds the
    absolute scale so ``magnitude * peak_value`` restores raw units.  ``phase``
    is unwrapped within each contiguous valid run and raw (wrapped) elsewhere.
    """

    omega_axis: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray
    valid_mask: np.ndarray
    peak_value: float

    def __post_init__(self) -> None:
        arrays = {}
        for name, dtype in (
            ("omega_axis", float),
            ("magnitude", float),
            ("phase", float),
            ("valid_mask", bool),
        ):
            arr = np.asarray(getattr(self, name), dtype=dtype).copy()
            arr.setflags(write=False)
            arrays[name] = arr
        n = arrays["omega_axis"].size
        if any(a.shape != (n,) for a in arrays.values()):
            raise ValueError("all RecoveredSpectrum arrays must share one length")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class GvdFit:
    """Quadratic spectral-phase fit: gvd = 2*c2/length, fs^2/mm."""

    gvd: float
    uncertainty: float
    coefficients: tuple[float, float, float]
    residual_rms: float
    n_points: int


@dataclass(frozen=True)
class FringeFit:
    """Fit of a*cos^4(w0 tau/2) + b; visibility = a/(a + 2b)."""

    amplitude: float
    offset: float
    visibility: float
    residual_rms: float


@dataclass(frozen=True)
class PeakMetrics:
    """Interpolated peak position/height/width against an outer baseline."""

    center_fs: float
    fwhm_fs: float
    peak_value: float
    baseline: float
    peak_to_baseline: float


def unwrap_masked(phase: np.ndarray, valid_mask: np.ndarray) -> np.ndarray:
    """Unwrap phase inside each contiguous valid run; leave the rest wrapped."""
    phase = np.asarray(phase, dtype=float)
    valid_mask = np.asarray(valid_mask, dtype=bool)
    if phase.shape != valid_mask.shape:
        raise ValueError("phase and valid_mask must have the same shape")
    out = phase.copy()
    padded = np.concatenate(([False], valid_mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(int)))
    for lo, hi in zip(edges[0::2], edges[1::2]):
        out[lo:hi] = np.unwrap(phase[lo:hi])
    return out


def _window(n: int, kind: str) -> np.ndarray:
    if kind == "none":
        return np.ones(n)
    if kind == "hann":
        return np.hanning(n)
    raise ValueError(f"window must be 'none' or 'hann', got {kind!r}")


def _dft(values: np.ndarray, tau_axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Z(W_k) = dtau * sum z_n exp(i W_k tau_n), on the fftshifted bin axis."""
    n = values.size
    dtau = tau_axis[1] - tau_axis[0]
    bins = np.fft.fftshift(np.fft.ifft(values)) * n
    freqs = np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(n, d=dtau))
    spectrum = dtau * np.exp(1j * freqs * tau_axis[0]) * bins
    return freqs, spectrum


def _package(omega_axis: np.ndarray, spectrum: np.ndarray) -> RecoveredSpectrum:
    magnitude = np.abs(spectrum)
    peak = float(magnitude.max())
    if peak <= 0.0:
        raise ValueError("interferogram transforms to an all-zero spectrum")
    magnitude = magnitude / peak
    mask = magnitude >= VALID_MASK_FRACTION
    phase = unwrap_masked(np.angle(spectrum), mask)
    return RecoveredSpectrum(
        omega_axis=omega_axis,
        magnitude=magnitude,
        phase=phase,
        valid_mask=mask,
        peak_value=peak,
    )


def fft_interferogram(
    interferogram: Interferogram | ComplexInterferogram,
    window: str = "none",
    omega_r: float = _OMEGA_R_DEFAULT,
) -> RecoveredSpectrum:
    """Transform a delay scan to a magnitude/phase spectrum.

    For a :class:`ComplexInterferogram` at harmonic m, the axis is restored to
    absolute frequency by adding ``m * omega_r``.  Real interferograms are
    returned on their non-negative frequency axis unshifted (their carriers
    are already absolute).  ``window`` is ``"none"`` or ``"hann"``.
    """
    values = np.asarray(interferogram.values)
    taper = _window(values.size, window)
    freqs, spectrum = _dft(values * taper, interferogram.tau_axis)
    if isinstance(interferogram, ComplexInterferogram):
        axis = freqs + interferogram.harmonic * omega_r
        return _package(axis, spectrum)
    keep = freqs >= 0.0
    return _package(freqs[keep], spectrum[keep])


def remove_linear_phase(
    interferogram: ComplexInterferogram,
) -> tuple[ComplexInterferogram, float]:
    """Centre the envelope: shift tau so the |z|^2 centroid sits at 0.

    Returns the re-labelled interferogram and the shift (the group delay of
    the dominant linear spectral phase).  A flat envelope has no usable
    centroid; that case warns and returns a zero shift.
    """
    power = np.abs(interferogram.values) ** 2
    total = power.sum()
    if total <= 0.0:
        warnings.warn("all-zero interferogram; no linear phase to remove", stacklevel=2)
        return interferogram, 0.0
    if power.max() < 2.0 * power.mean():
        warnings.warn(
            "envelope has no clear peak; skipping linear-phase removal",
            stacklevel=2,
        )
        return interferogram, 0.0
    shift = float(np.sum(interferogram.tau_axis * power) / total)
    shifted = ComplexInterferogram(
        interferogram.tau_axis - shift,
        interferogram.values,
        harmonic=interferogram.harmonic,
    )
    return shifted, shift


def _largest_valid_run(mask: np.ndarray) -> slice:
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(int)))
    if edges.size == 0:
        raise ValueError("no valid samples above the magnitude mask")
    lengths = edges[1::2] - edges[0::2]
    i = int(np.argmax(lengths))
    return slice(int(edges[0::2][i]), int(edges[1::2][i]))


def fit_gvd(
    spectrum: RecoveredSpectrum, length_mm: float, omega_0: float
) -> GvdFit:
    """Weighted quadratic fit of spectral phase; reports k'' = 2*c2/length.

    Fits ``c0 + c1*(w-w0) + c2*(w-w0)^2`` over the largest contiguous valid
    run, weighting by magnitude^2.  The uncertainty is the standard error of
    c2 propagated through the factor 2/length.
    """
    if length_mm <= 0:
        raise ValueError(f"length must be positive, got {length_mm} mm")
    run = _largest_valid_run(spectrum.valid_mask)
    x = spectrum.omega_axis[run] - omega_0
    y = spectrum.phase[run]
    w = spectrum.magnitude[run] ** 2
    if x.size < 10:
        raise ValueError(
            f"only {x.size} valid samples in the largest run; need >= 10"
        )
    design = np.column_stack([np.ones_like(x), x, x * x])
    sw = np.sqrt(w)
    coeffs, *_ = np.linalg.lstsq(design * sw[:, None], y * sw, rcond=None)
    residuals = y - design @ coeffs
    dof = x.size - 3
    scale = float(np.sum(w * residuals**2) / dof) if dof > 0 else 0.0
    covariance = np.linalg.inv((design * w[:, None]).T @ design) * scale
    c2_err = float(np.sqrt(max(covariance[2, 2], 0.0)))
    return GvdFit(
        gvd=2.0 * float(coeffs[2]) / length_mm,
        uncertainty=2.0 * c2_err / length_mm,
        coefficients=(float(coeffs[0]), float(coeffs[1]), float(coeffs[2])),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        n_points=int(x.size),
    )


def fit_balanced_fringes(
    interferogram: Interferogram, omega_0: float
) -> FringeFit:
    """Fit a*cos^4(w0 tau/2) + b to a balanced (no-sample) scan.

    The ideal lossless interferometer gives (a, b) = (8, 0), i.e. visibility
    a/(a+2b) = 1.  Requires at least 4 samples per fringe period.
    """
    if omega_0 <= 0:
        raise ValueError(f"omega_0 must be positive, got {omega_0}")
    period = 2.0 * np.pi / omega_0
    if interferogram.tau_step > period / 4.0:
        raise ValueError(
            f"tau step {interferogram.tau_step:.4g} fs is too coarse for "
            f"fringes of period {period:.4g} fs"
        )
    basis = np.cos(omega_0 * interferogram.tau_axis / 2.0) ** 4
    design = np.column_stack([basis, np.ones_like(basis)])
    coeffs, *_ = np.linalg.lstsq(design, interferogram.values, rcond=None)
    a, b = float(coeffs[0]), float(coeffs[1])
    residuals = interferogram.values - design @ coeffs
    denom = a + 2.0 * b
    visibility = a / denom if denom != 0.0 else 0.0
    return FringeFit(
        amplitude=a,
        offset=b,
        visibility=visibility,
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
    )


def recover_sample_response(
    sample: RecoveredSpectrum, reference: RecoveredSpectrum
) -> RecoveredSpectrum:
    """Complex ratio sample/reference on the joint valid mask.

    For matched scans this yields the modified sample response
    eta(w)*(1+|eta(2w0-w)|^2)/2 in magnitude (absolute scale via
    ``magnitude * peak_value``) and arg eta(w) in phase.  Frequencies where
    either input is below its mask are zeroed and flagged invalid.
    """
    if sample.omega_axis.shape != reference.omega_axis.shape or not np.allclose(
        sample.omega_axis, reference.omega_axis, rtol=1e-12, atol=1e-12
    ):
        raise ValueError("sample and reference spectra must share one frequency axis")
    joint = sample.valid_mask & reference.valid_mask
    if not np.any(joint):
        raise ValueError("no overlap between sample and reference valid masks")
    ratio = np.zeros(sample.omega_axis.size)
    ratio[joint] = (sample.magnitude[joint] * sample.peak_value) / (
        reference.magnitude[joint] * reference.peak_value
    )
    wrapped = np.angle(np.exp(1j * (sample.phase - reference.phase)))
    phase = unwrap_masked(wrapped, joint)
    peak = float(ratio.max())
    return RecoveredSpectrum(
        omega_axis=sample.omega_axis,
        magnitude=ratio / peak,
        phase=phase,
        valid_mask=joint,
        peak_value=peak,
    )


def peak_metrics(interferogram: Interferogram) -> PeakMetrics:
    """Locate the dominant peak of a real scan against its outer baseline.

    The baseline is the mean of the outer 5% of samples on each side.  The
    centre comes from a 3-point parabola through the maximum; the width from
    linear interpolation of the half-maximum crossings above baseline.
    """
    tau = interferogram.tau_axis
    vals = interferogram.values
    n = vals.size
    edge = max(2, n // 20)
    outer = np.concatenate([vals[:edge], vals[-edge:]])
    baseline = float(outer.mean())
    i = int(np.argmax(vals))
    if i == 0 or i == n - 1:
        raise ValueError("maximum sits on the scan edge; no interior peak")
    height = vals[i] - baseline
    if height <= 3.0 * float(outer.std()) + 1e-12 * abs(baseline):
        raise ValueError("no peak above the baseline noise")
    # Parabola through the three samples around the maximum.
    y0, y1, y2 = vals[i - 1], vals[i], vals[i + 1]
    denom = y0 - 2.0 * y1 + y2
    offset = 0.5 * (y0 - y2) / denom if denom != 0.0 else 0.0
    center = float(tau[i] + offset * interferogram.tau_step)
    peak_value = float(y1 - 0.25 * (y0 - y2) * offset)

    half = baseline + 0.5 * (peak_value - baseline)
    left = np.flatnonzero(vals[:i] < half)
    right = np.flatnonzero(vals[i:] < half)
    if left.size == 0 or right.size == 0:
        raise ValueError("peak does not fall to half maximum inside the scan")
    l = int(left[-1])
    tau_l = tau[l] + (half - vals[l]) / (vals[l + 1] - vals[l]) * interferogram.tau_step
    r = i + int(right[0])
    tau_r = tau[r - 1] + (half - vals[r - 1]) / (vals[r] - vals[r - 1]) * interferogram.tau_step
    if baseline <= 0:
        raise ValueError(f"baseline {baseline:.4g} is not positive; ratio undefined")
    return PeakMetrics(
        center_fs=center,
        fwhm_fs=float(tau_r - tau_l),
        peak_value=peak_value,
        baseline=baseline,
        peak_to_baseline=peak_value / baseline,
    )
