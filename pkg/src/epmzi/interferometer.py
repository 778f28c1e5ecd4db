"""Two-photon Mach-Zehnder transfer amplitudes and coincidence rates.

Geometry: a degenerate photon pair (both photons in one input port) meets a
beamsplitter (r, t); arm 1 carries an adjustable delay tau and phase phi_1,
arm 2 carries the sample eta(omega) and phase phi_2; the arms recombine and
coincidences are counted between the two output ports of port d.  The
single-photon transfer amplitude from input a to output d is

    g_da(omega) = r*t*eta(omega)*e^{i phi_2} + r*t*e^{i omega tau}*e^{i phi_1}

and the normalized coincidence rate ("rate" below, dimensionless) is

    R(tau, dphi) = (1/(2 r^4 t^4)) * Integral |g_da(w) g_da(2w0-w)|^2 S(w) dw

with dphi = phi_2 - phi_1 the only phase combination the rate depends on.
Expanding the two-photon amplitude g_da(w)*g_da(2w0-w) into its four pathways
and grouping by powers of e^{i dphi} splits R into harmonics of the modulated
phase: a static 0f part, a 1f part oscillating at the optical frequency w0 in
tau, and a 2f part oscillating at 2*w0 (the N00N pathway pair).  The complex
1f/2f integrands returned here are the quantities a phase-stepping lock-in
measures; their closed Gaussian forms are

    R_0f = 2 + e^{-a^2 t^2},  R_1f = 4 e^{-a^2 t^2/4} cos(dphi - w0 tau),
    R_2f = cos(2 dphi - 2 w0 tau)

for a no-sample Gaussian spectrum of width parameter a.  All integrals run
over the conjugate-closed part of the grid so the omega <-> 2w0-omega flip is
an exact index permutation and the harmonic decomposition is exact to
round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import FrequencyGrid
from .media import TransferFunction
from .spectra import Spectrum


@dataclass(frozen=True)
class MziConfig:
    """Beamsplitter amplitudes, arm phases, and pump frequency.

    ``omega_p`` is the pump frequency (rad/fs); None means degenerate pumping
    at twice the grid centre, which is the only case the exact conjugate index
    flip supports.  ``r**2 + t**2`` must be 1.
    """

    r: float = 1.0 / np.sqrt(2.0)
    t: float = 1.0 / np.sqrt(2.0)
    phi_1: float = 0.0
    phi_2: float = 0.0
    omega_p: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.r < 1.0) or not (0.0 < self.t < 1.0):
            raise ValueError(f"r and t must lie in (0, 1), got r={self.r}, t={self.t}")
        if abs(self.r**2 + self.t**2 - 1.0) > 1e-12:
            raise ValueError(
                f"beamsplitter must be lossless: r^2+t^2 = {self.r**2 + self.t**2!r}"
            )

    def pump_frequency(self, grid: FrequencyGrid) -> float:
        """Resolved pump frequency; must be degenerate with the grid centre."""
        expected = 2.0 * grid.omega_0
        if self.omega_p is None:
            return expected
        if abs(self.omega_p - expected) > 1e-9 * expected:
            raise ValueError(
                f"omega_p={self.omega_p} rad/fs is not twice the grid centre "
                f"{grid.omega_0} rad/fs; only degenerate pumping is supported"
            )
        return self.omega_p


def _uniform_axis(tau_axis: np.ndarray) -> np.ndarray:
    tau_axis = np.asarray(tau_axis, dtype=float)
    if tau_axis.ndim != 1 or tau_axis.size < 2:
        raise ValueError("tau_axis must be a 1-D array with at least 2 samples")
    steps = np.diff(tau_axis)
    if np.any(steps <= 0):
        raise ValueError("tau_axis must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("tau_axis must be uniformly spaced")
    return tau_axis


@dataclass(frozen=True)
class Interferogram:
    """Real scan of a rate versus delay. ``kind`` tags what was recorded."""

    tau_axis: np.ndarray
    values: np.ndarray
    kind: str = "fully_sampled"

    _KINDS = ("fully_sampled", "comp_0f")

    def __post_init__(self) -> None:
        tau_axis = _uniform_axis(self.tau_axis)
        values = np.asarray(self.values, dtype=float)
        if values.shape != tau_axis.shape:
            raise ValueError("values and tau_axis must have the same length")
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}, got {self.kind!r}")
        tau_axis.setflags(write=False)
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "tau_axis", tau_axis)
        object.__setattr__(self, "values", values)

    @property
    def tau_step(self) -> float:
        return float(self.tau_axis[1] - self.tau_axis[0])


@dataclass(frozen=True)
class ComplexInterferogram:
    """Down-sampled lock-in output Z_mf versus delay, harmonic m in {1, 2}."""

    tau_axis: np.ndarray
    values: np.ndarray
    harmonic: int = 1

    def __post_init__(self) -> None:
        tau_axis = _uniform_axis(self.tau_axis)
        values = np.asarray(self.values, dtype=complex)
        if values.shape != tau_axis.shape:
            raise ValueError("values and tau_axis must have the same length")
        if self.harmonic not in (1, 2):
            raise ValueError(f"harmonic must be 1 or 2, got {self.harmonic}")
        tau_axis.setflags(write=False)
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "tau_axis", tau_axis)
        object.__setattr__(self, "values", values)

    @property
    def tau_step(self) -> float:
        return float(self.tau_axis[1] - self.tau_axis[0])


def _arm_amplitudes(omega, eta, tau: float, cfg: MziConfig):
    """Per-arm factors common to all four transfer amplitudes."""
    sample = np.asarray(eta) * np.exp(1j * cfg.phi_2)
    delay = np.exp(1j * (np.asarray(omega, dtype=float) * tau + cfg.phi_1))
    return sample, delay


def mzi_transfer_da(omega, eta, tau: float, cfg: MziConfig):
    """Amplitude input a -> output d (the monitored port)."""
    sample, delay = _arm_amplitudes(omega, eta, tau, cfg)
    return cfg.r * cfg.t * (sample + delay)


def mzi_transfer_db(omega, eta, tau: float, cfg: MziConfig):
    """Amplitude input b -> output d."""
    sample, delay = _arm_amplitudes(omega, eta, tau, cfg)
    return -cfg.r**2 * sample + cfg.t**2 * delay


def mzi_transfer_ca(omega, eta, tau: float, cfg: MziConfig):
    """Amplitude input a -> output c."""
    sample, delay = _arm_amplitudes(omega, eta, tau, cfg)
    return cfg.t**2 * sample - cfg.r**2 * delay


def mzi_transfer_cb(omega, eta, tau: float, cfg: MziConfig):
    """Amplitude input b -> output c."""
    sample, delay = _arm_amplitudes(omega, eta, tau, cfg)
    return -cfg.r * cfg.t * (sample + delay)


@dataclass(frozen=True)
class PathwayTerms:
    """The four two-photon pathways of the product g_da(w) g_da(w~).

    ``sample_delay``: photon at w through the sample, partner through the
    delay (one of the two HOM-type pathways); ``delay_sample`` is its mirror.
    ``both_sample`` and ``both_delay`` are the N00N-type pathways carrying
    2*phi_2 and 2*phi_1 respectively.
    """

    sample_delay: complex
    delay_sample: complex
    both_sample: complex
    both_delay: complex

    def total(self):
        return self.sample_delay + self.delay_sample + self.both_sample + self.both_delay


def pathway_terms(
    omega,
    omega_tilde,
    eta_omega,
    eta_omega_tilde,
    tau: float,
    cfg: MziConfig,
) -> PathwayTerms:
    """Pathway decomposition at a frequency pair (omega, omega_tilde).

    ``eta_omega`` / ``eta_omega_tilde`` are the sample response values at the
    two frequencies.  The terms sum to ``mzi_transfer_da(w) * mzi_transfer_da(w~)``.
    """
    omega = np.asarray(omega, dtype=float)
    omega_tilde = np.asarray(omega_tilde, dtype=float)
    rt2 = (cfg.r * cfg.t) ** 2
    common = np.exp(1j * (cfg.phi_1 + cfg.phi_2))
    return PathwayTerms(
        sample_delay=rt2 * eta_omega * np.exp(1j * omega_tilde * tau) * common,
        delay_sample=rt2 * eta_omega_tilde * np.exp(1j * omega * tau) * common,
        both_sample=rt2 * eta_omega * eta_omega_tilde * np.exp(2j * cfg.phi_2),
        both_delay=rt2 * np.exp(1j * (omega + omega_tilde) * tau) * np.exp(2j * cfg.phi_1),
    )


def _checked_pair(
    eta: TransferFunction, spectrum: Spectrum, cfg: MziConfig
) -> FrequencyGrid:
    if eta.grid != spectrum.grid:
        raise ValueError("eta and spectrum must share one FrequencyGrid")
    cfg.pump_frequency(eta.grid)
    return eta.grid


def _phase_config(cfg: MziConfig, delta_phi: float) -> MziConfig:
    """Rates depend on the phases only through phi_2 - phi_1."""
    return replace(cfg, phi_1=0.0, phi_2=float(delta_phi))


def _per_tau(tau, func):
    """Evaluate ``func(scalar_tau)`` over a scalar or 1-D tau argument."""
    tau_arr = np.asarray(tau, dtype=float)
    if tau_arr.ndim == 0:
        return func(float(tau_arr))
    if tau_arr.ndim != 1:
        raise ValueError("tau must be a scalar or a 1-D array")
    return np.array([func(float(t)) for t in tau_arr])


def rate_full(tau, delta_phi: float, eta: TransferFunction, spectrum: Spectrum,
              cfg: MziConfig):
    """Full normalized coincidence rate R(tau, delta_phi).

    Computed directly from |g_da(w) g_da(2w0-w)|^2 without any harmonic
    shortcut, so it can serve as the reference for the decomposition identity.
    Accepts a scalar or 1-D ``tau``.
    """
    grid = _checked_pair(eta, spectrum, cfg)
    cfg2 = _phase_config(cfg, delta_phi)
    w = grid.quadrature_weights() * spectrum.values
    omegas = grid.omegas()
    flip = grid.conjugate_indices()
    norm = 2.0 * cfg.r**4 * cfg.t**4

    def one(tau_s: float) -> float:
        g = mzi_transfer_da(omegas, eta.values, tau_s, cfg2)
        pair = g * g[flip]
        return float(np.sum(w * np.abs(pair) ** 2) / norm)

    return _per_tau(tau, one)


def rate_0f(tau, eta: TransferFunction, spectrum: Spectrum, cfg: MziConfig):
    """Phase-independent (0f) rate component.

    Static pathway populations plus the HOM cross term, whose exp(-2i(w-w0)tau)
    kernel produces the coincidence dip/peak envelope around tau = 0.
    """
    grid = _checked_pair(eta, spectrum, cfg)
    w = grid.quadrature_weights() * spectrum.values
    flip = grid.conjugate_indices()
    ev = eta.values
    ev_c = ev[flip]
    static = 0.5 * float(
        np.sum(w * (np.abs(ev) ** 2 + np.abs(ev_c) ** 2
                    + np.abs(ev * ev_c) ** 2 + 1.0))
    )
    d = grid.detunings()
    cross = ev * np.conj(ev_c)

    def one(tau_s: float) -> float:
        return static + float(np.sum(w * np.real(cross * np.exp(-2j * d * tau_s))))

    return _per_tau(tau, one)


def rate_1f_integrand(tau, eta: TransferFunction, spectrum: Spectrum,
                      cfg: MziConfig):
    """Complex 1f integrand: Integral eta(w) {1+|eta(2w0-w)|^2} e^{-i w tau} S(w) dw.

    The measurable fully-sampled 1f rate is ``2*Re[e^{i dphi} * this]``; its
    magnitude is twice the down-sampled |Z_1f|.
    """
    grid = _checked_pair(eta, spectrum, cfg)
    w = grid.quadrature_weights() * spectrum.values
    flip = grid.conjugate_indices()
    kernel = eta.values * (1.0 + np.abs(eta.values[flip]) ** 2) * w
    omegas = grid.omegas()

    def one(tau_s: float) -> complex:
        return complex(np.sum(kernel * np.exp(-1j * omegas * tau_s)))

    return _per_tau(tau, one)


def rate_2f_integrand(eta: TransferFunction, spectrum: Spectrum,
                      cfg: MziConfig) -> complex:
    """Complex 2f integrand: Integral eta(w) eta(2w0-w) S(w) dw (tau-independent)."""
    grid = _checked_pair(eta, spectrum, cfg)
    w = grid.quadrature_weights() * spectrum.values
    flip = grid.conjugate_indices()
    return complex(np.sum(w * eta.values * eta.values[flip]))


def rate_1f(tau, delta_phi: float, eta: TransferFunction, spectrum: Spectrum,
            cfg: MziConfig):
    """Real fully-sampled 1f rate component at (tau, delta_phi)."""
    integrand = rate_1f_integrand(tau, eta, spectrum, cfg)
    return 2.0 * np.real(np.exp(1j * delta_phi) * integrand)


def rate_2f(tau, delta_phi: float, eta: TransferFunction, spectrum: Spectrum,
            cfg: MziConfig):
    """Real fully-sampled 2f rate component at (tau, delta_phi)."""
    grid = _checked_pair(eta, spectrum, cfg)
    integrand = rate_2f_integrand(eta, spectrum, cfg)
    tau_arr = np.asarray(tau, dtype=float)
    carrier = np.exp(-1j * (2.0 * grid.omega_0 * tau_arr - 2.0 * delta_phi))
    return np.real(carrier * integrand)


def closed_form_rates_gaussian(
    tau, delta_phi: float, alpha: float, omega_0: float
) -> tuple:
    """No-sample Gaussian closed forms (r0f, r1f, r2f).

    ``alpha`` is the Gaussian width parameter (fwhm / (2 sqrt(ln 2))) and
    ``omega_0`` the carrier; the sum of the three equals the full rate, which
    collapses to 8*cos^4(w0 tau/2) at dphi = 0 in the alpha*tau -> 0 limit.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    tau = np.asarray(tau, dtype=float)
    at2 = (alpha * tau) ** 2
    r0f = 2.0 + np.exp(-at2)
    r1f = 4.0 * np.exp(-at2 / 4.0) * np.cos(delta_phi - omega_0 * tau)
    r2f = np.cos(2.0 * delta_phi - 2.0 * omega_0 * tau)
    if tau.ndim == 0:
        return float(r0f), float(r1f), float(r2f)
    return r0f, r1f, r2f


def double_gaussian_jsa(
    grid: FrequencyGrid, sigma_pump: float, sigma_diff: float
) -> np.ndarray:
    """Joint spectral amplitude exp(-((w+w~-2w0)/sp)^2) * exp(-((w-w~)/sd)^2).

    Swap-symmetric by construction.  As ``sigma_pump -> 0`` the pair becomes
    perfectly anti-correlated with marginal width parameter
    ``alpha = sigma_diff / (2 sqrt 2)``.
    """
    if sigma_pump <= 0 or sigma_diff <= 0:
        raise ValueError("sigma_pump and sigma_diff must be positive")
    d = grid.detunings()
    total = d[:, None] + d[None, :]
    diff = d[:, None] - d[None, :]
    return np.exp(-((total / sigma_pump) ** 2)) * np.exp(-((diff / sigma_diff) ** 2))


def brute_force_rate(
    psi: np.ndarray,
    tau: float,
    delta_phi: float,
    eta: TransferFunction,
    cfg: MziConfig,
) -> float:
    """Coincidence rate from an explicit joint spectral amplitude.

    Symmetrizes psi, applies g_da to both frequencies, and integrates
    |g_da(w) g_da(w~) (psi(w,w~) + psi(w~,w))|^2 on the full 2-D grid.  The
    normalization is fixed so that, with no sample, the large-tau
    phase-averaged rate is 2, matching the delta-correlated limit.  Any
    separable spectral phase on psi leaves the result unchanged.
    """
    grid = eta.grid
    cfg.pump_frequency(grid)
    psi = np.asarray(psi, dtype=complex)
    n = grid.n_points
    if psi.shape != (n, n):
        raise ValueError(f"psi shape {psi.shape} does not match grid ({n}x{n})")
    psi_sym = psi + psi.T
    if not np.any(psi_sym):
        raise ValueError("joint spectral amplitude is identically zero")
    cfg2 = _phase_config(cfg, delta_phi)
    g = mzi_transfer_da(grid.omegas(), eta.values, tau, cfg2)
    amplitude = (g[:, None] * g[None, :]) * psi_sym
    wf = np.full(n, grid.omega_step)
    wf[0] = wf[-1] = 0.5 * grid.omega_step
    w2 = wf[:, None] * wf[None, :]
    numerator = float(np.sum(w2 * np.abs(amplitude) ** 2))
    denominator = float(np.sum(w2 * np.abs(psi_sym) ** 2))
    return numerator / (2.0 * cfg.r**4 * cfg.t**4 * denominator)
