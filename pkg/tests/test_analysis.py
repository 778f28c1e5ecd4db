import numpy as np
import pytest

from epmzi.analysis import (
    RecoveredSpectrum,
    VALID_MASK_FRACTION,
    fft_interferogram,
    fit_balanced_fringes,
    fit_gvd,
    peak_metrics,
    recover_sample_response,
    remove_linear_phase,
    unwrap_masked,
)
from epmzi.grid import omega_from_wavelength
from epmzi.interferometer import ComplexInterferogram, Interferogram

W532 = omega_from_wavelength(532.0)
W633 = omega_from_wavelength(633.0)


def _reconstruct(spec: RecoveredSpectrum) -> np.ndarray:
    # phase is stored unwrapped inside the mask, but e^{i phase} is exact
    return spec.magnitude * spec.peak_value * np.exp(1j * spec.phase)


def test_transform_matches_direct_sum():
    rng = np.random.default_rng(42)
    n, dtau, tau0 = 32, 0.7, -3.1
    tau = tau0 + dtau * np.arange(n)
    values = rng.normal(size=n) + 1j * rng.normal(size=n)
    spec = fft_interferogram(ComplexInterferogram(tau, values), omega_r=0.0)
    freqs = 2.0 * np.pi * (np.arange(n) - n // 2) / (n * dtau)
    direct = dtau * np.array(
        [np.sum(values * np.exp(1j * w * tau)) for w in freqs]
    )
    np.testing.assert_allclose(spec.omega_axis, freqs, atol=1e-12)
    np.testing.assert_allclose(_reconstruct(spec), direct, atol=1e-12)


def test_real_scan_keeps_nonnegative_frequencies():
    tau = np.linspace(-40.0, 40.0, 1601)
    values = 2.0 + np.exp(-((tau / 8.0) ** 2)) * np.cos(W532 * tau)
    spec = fft_interferogram(Interferogram(tau, values))
    assert np.all(spec.omega_axis >= 0.0)
    # ignore the DC bin: the carrier peak sits at the optical frequency
    away_from_dc = spec.omega_axis > 1.0
    peak = spec.omega_axis[away_from_dc][
        np.argmax(spec.magnitude[away_from_dc])
    ]
    bin_width = 2.0 * np.pi / (tau[-1] - tau[0])
    assert abs(peak - W532) < bin_width


def test_frame_restoration_recovers_absolute_carriers():
    tau = np.linspace(-40.0, 40.0, 161)
    env = np.exp(-((tau / 15.0) ** 2))
    bin_width = 2.0 * np.pi / (tau[-1] - tau[0])
    z1 = ComplexInterferogram(tau, env * np.exp(-1j * (W532 - W633) * tau), harmonic=1)
    s1 = fft_interferogram(z1, omega_r=W633)
    assert abs(s1.omega_axis[np.argmax(s1.magnitude)] - W532) < bin_width
    z2 = ComplexInterferogram(
        tau, 0.5 * np.exp(-2j * (W532 - W633) * tau), harmonic=2
    )
    s2 = fft_interferogram(z2, omega_r=W633)
    assert abs(s2.omega_axis[np.argmax(s2.magnitude)] - 2.0 * W532) < bin_width


def test_hann_window_suppresses_leakage():
    tau = np.linspace(0.0, 50.0, 256)
    # carrier deliberately between bins so the bare transform leaks
    w_c = 2.0 * np.pi * 10.37 / 50.0
    z = ComplexInterferogram(tau, np.exp(-1j * w_c * tau))
    bare = fft_interferogram(z, window="none", omega_r=1.0)
    tapered = fft_interferogram(z, window="hann", omega_r=1.0)
    i_bare = np.argmax(bare.magnitude)
    i_tap = np.argmax(tapered.magnitude)
    far_bare = np.max(np.abs(bare.magnitude[np.abs(np.arange(256) - i_bare) > 20]))
    far_tap = np.max(np.abs(tapered.magnitude[np.abs(np.arange(256) - i_tap) > 20]))
    assert far_tap < 0.1 * far_bare
    with pytest.raises(ValueError, match="window"):
        fft_interferogram(z, window="hamming")


def test_unwrap_masked_restores_ramps_and_leaves_gaps():
    k = np.arange(40, dtype=float)
    mask = np.zeros(40, dtype=bool)
    mask[5:25] = True
    mask[30:38] = True
    true_phase = np.where(mask, 0.0, 0.0).copy()
    true_phase[5:25] = 0.4 * (k[5:25] - 5.0)
    true_phase[30:38] = -0.9 * (k[30:38] - 30.0)
    wrapped = np.angle(np.exp(1j * true_phase))
    out = unwrap_masked(wrapped, mask)
    np.testing.assert_allclose(out[5:25], true_phase[5:25], atol=1e-12)
    np.testing.assert_allclose(out[30:38], true_phase[30:38], atol=1e-12)
    np.testing.assert_array_equal(out[~mask], wrapped[~mask])
    with pytest.raises(ValueError, match="same shape"):
        unwrap_masked(wrapped, mask[:-1])


def test_remove_linear_phase_centers_the_envelope():
    tau = np.linspace(7.3 - 20.0, 7.3 + 20.0, 161)
    z = ComplexInterferogram(
        tau, np.exp(-(((tau - 7.3) / 4.0) ** 2)) * np.exp(-1j * 0.6 * tau)
    )
    shifted, shift = remove_linear_phase(z)
    assert shift == pytest.approx(7.3, abs=1e-9)
    np.testing.assert_allclose(shifted.tau_axis, tau - 7.3, atol=1e-12)
    np.testing.assert_array_equal(shifted.values, z.values)


def test_remove_linear_phase_degenerate_cases_warn():
    tau = np.linspace(-5.0, 5.0, 20)
    flat = ComplexInterferogram(tau, np.ones(20, dtype=complex))
    with pytest.warns(UserWarning, match="no clear peak"):
        same, shift = remove_linear_phase(flat)
    assert shift == 0.0
    zero = ComplexInterferogram(tau, np.zeros(20, dtype=complex))
    with pytest.warns(UserWarning, match="all-zero"):
        same, shift = remove_linear_phase(zero)
    assert shift == 0.0


def _phase_spectrum(x, phase, mask=None):
    n = x.size
    mag = np.exp(-((x / (0.6 * x.max())) ** 2))
    mag = mag / mag.max()
    if mask is None:
        mask = np.ones(n, dtype=bool)
    return RecoveredSpectrum(
        omega_axis=W532 + x,
        magnitude=mag,
        phase=phase,
        valid_mask=mask,
        peak_value=1.0,
    )


def test_fit_gvd_recovers_an_exact_quadratic():
    x = np.linspace(-0.2, 0.2, 101)
    phase = 0.3 + 0.05 * x + 585.0 * x**2
    fit = fit_gvd(_phase_spectrum(x, phase), length_mm=30.8, omega_0=W532)
    assert fit.gvd == pytest.approx(2.0 * 585.0 / 30.8, rel=1e-9)
    assert fit.coefficients[0] == pytest.approx(0.3, abs=1e-9)
    assert fit.coefficients[1] == pytest.approx(0.05, abs=1e-9)
    assert fit.uncertainty == pytest.approx(0.0, abs=1e-9)
    assert fit.residual_rms < 1e-10
    assert fit.n_points == 101


def test_fit_gvd_uses_only_the_largest_valid_run():
    x = np.linspace(-0.2, 0.2, 101)
    phase = 585.0 * x**2
    mask = np.ones(101, dtype=bool)
    mask[70:] = False
    phase[70:] = 40.0  # garbage outside the run must not matter
    mask[75:80] = True
    fit = fit_gvd(_phase_spectrum(x, phase, mask), length_mm=30.8, omega_0=W532)
    assert fit.gvd == pytest.approx(2.0 * 585.0 / 30.8, rel=1e-9)
    assert fit.n_points == 70


def test_fit_gvd_validation():
    x = np.linspace(-0.2, 0.2, 101)
    phase = x.copy()
    with pytest.raises(ValueError, match="positive"):
        fit_gvd(_phase_spectrum(x, phase), length_mm=0.0, omega_0=W532)
    small = np.zeros(101, dtype=bool)
    small[:8] = True
    with pytest.raises(ValueError, match="need >= 10"):
        fit_gvd(_phase_spectrum(x, phase, small), length_mm=1.0, omega_0=W532)
    with pytest.raises(ValueError, match="no valid samples"):
        fit_gvd(
            _phase_spectrum(x, phase, np.zeros(101, dtype=bool)),
            length_mm=1.0,
            omega_0=W532,
        )


def test_fit_balanced_fringes_exact():
    tau = np.linspace(-4.0, 4.0, 201)
    ideal = Interferogram(tau, 8.0 * np.cos(W532 * tau / 2.0) ** 4)
    fit = fit_balanced_fringes(ideal, W532)
    assert fit.amplitude == pytest.approx(8.0, abs=1e-9)
    assert fit.offset == pytest.approx(0.0, abs=1e-9)
    assert fit.visibility == pytest.approx(1.0, abs=1e-9)
    assert fit.residual_rms < 1e-9
    lossy = Interferogram(tau, 6.0 * np.cos(W532 * tau / 2.0) ** 4 + 1.0)
    assert fit_balanced_fringes(lossy, W532).visibility == pytest.approx(0.75, abs=1e-9)


def test_fit_balanced_fringes_validation():
    coarse = Interferogram(np.linspace(-40.0, 40.0, 41), np.ones(41))
    with pytest.raises(ValueError, match="too coarse"):
        fit_balanced_fringes(coarse, W532)
    fine = Interferogram(np.linspace(-1.0, 1.0, 101), np.ones(101))
    with pytest.raises(ValueError, match="omega_0"):
        fit_balanced_fringes(fine, -1.0)


def test_recover_sample_response_takes_the_masked_ratio():
    x = np.linspace(-0.3, 0.3, 61)
    axis = W532 + x
    ref_mag = np.exp(-((x / 0.2) ** 2))
    ref_mag /= ref_mag.max()
    ref_mask = ref_mag >= VALID_MASK_FRACTION
    sample_mag = 0.5 * ref_mag
    sample_mag[25:35] *= 0.1  # a notch-like dip
    scale = sample_mag.max()
    sample = RecoveredSpectrum(axis, sample_mag / scale, 0.2 + 1.5 * x, ref_mask, 4.0 * scale)
    reference = RecoveredSpectrum(axis, ref_mag, 0.2 * np.ones(61), ref_mask, 4.0)
    out = recover_sample_response(sample, reference)
    expected = np.zeros(61)
    expected[ref_mask] = (sample_mag[ref_mask] * 4.0) / (ref_mag[ref_mask] * 4.0)
    np.testing.assert_allclose(out.magnitude * out.peak_value, expected, atol=1e-12)
    np.testing.assert_allclose(out.phase[ref_mask], 1.5 * x[ref_mask], atol=1e-12)
    np.testing.assert_array_equal(out.valid_mask, ref_mask)
    assert out.magnitude.max() == pytest.approx(1.0)


def test_recover_sample_response_validation():
    x = np.linspace(-0.1, 0.1, 21)
    ones = np.ones(21)
    m1 = np.zeros(21, dtype=bool)
    m1[:10] = True
    m2 = ~m1
    a = RecoveredSpectrum(W532 + x, ones, ones, m1, 1.0)
    b = RecoveredSpectrum(W532 + x, ones, ones, m2, 1.0)
    with pytest.raises(ValueError, match="no overlap"):
        recover_sample_response(a, b)
    shifted = RecoveredSpectrum(W532 + x + 0.05, ones, ones, m1, 1.0)
    with pytest.raises(ValueError, match="share one frequency axis"):
        recover_sample_response(a, shifted)


def test_peak_metrics_on_a_gaussian_bump():
    tau = np.linspace(-40.0, 40.0, 801)
    values = 2.0 + np.exp(-(((tau - 3.0) / 5.0) ** 2))
    metrics = peak_metrics(Interferogram(tau, values))
    assert metrics.center_fs == pytest.approx(3.0, abs=1e-6)
    assert metrics.baseline == pytest.approx(2.0, abs=1e-4)
    assert metrics.peak_value == pytest.approx(3.0, abs=1e-6)
    assert metrics.fwhm_fs == pytest.approx(2.0 * 5.0 * np.sqrt(np.log(2.0)), rel=1e-3)
    assert metrics.peak_to_baseline == pytest.approx(1.5, abs=1e-4)


def test_peak_metrics_failure_modes():
    tau = np.linspace(-40.0, 40.0, 101)
    with pytest.raises(ValueError, match="scan edge"):
        peak_metrics(Interferogram(tau, tau.copy()))
    # a bump smaller than the edge-sample scatter is not a peak
    ragged = np.ones(101)
    ragged[::2] += 0.5
    ragged[50] = 1.6
    with pytest.raises(ValueError, match="baseline noise"):
        peak_metrics(Interferogram(tau, ragged))
    with pytest.raises(ValueError, match="not positive"):
        peak_metrics(Interferogram(tau, -1.0 + 3.0 * np.exp(-((tau / 5.0) ** 2))))


def test_recovered_spectrum_validation():
    x = np.linspace(0.0, 1.0, 8)
    with pytest.raises(ValueError, match="share one length"):
        RecoveredSpectrum(x, np.ones(7), np.ones(8), np.ones(8, dtype=bool), 1.0)
    spec = RecoveredSpectrum(x, np.ones(8), np.ones(8), np.ones(8, dtype=bool), 1.0)
    with pytest.raises(ValueError):
        spec.magnitude[0] = 5.0
