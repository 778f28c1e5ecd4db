"""Two-photon Mach-Zehnder spectroscopy with phase-modulated coincidence detection.

Simulates coincidence interferograms of frequency-anticorrelated photon pairs
through a collinear Mach-Zehnder interferometer with a sample in one arm,
demodulates the phase-swept rates into down-sampled complex interferograms,
and recovers the sample's complex transfer function (absorption, dispersion,
GVD) from their Fourier transforms.

The HTTP facade lives in :mod:`epmzi.service` and is imported on demand so
that plain numeric use of the package does not load the web stack.
"""

__version__ = "0.1.0"

from .analysis import (
    FringeFit,
    GvdFit,
    PeakMetrics,
    RecoveredSpectrum,
    fft_interferogram,
    fit_balanced_fringes,
    fit_gvd,
    peak_metrics,
    recover_sample_response,
    remove_linear_phase,
    unwrap_masked,
)
from .demodulation import (
    LockinOutput,
    ModulationConfig,
    NoiseConfig,
    SweepSamples,
    downsampled_a0f,
    downsampled_z1f,
    downsampled_z2f,
    fully_sampled_scan,
    lockin_extract,
    lockin_sweep,
    synthesize_timeseries,
)
from .grid import (
    C_NM_PER_FS,
    FrequencyGrid,
    make_grid,
    omega_from_wavelength,
    wavelength_from_omega,
)
from .interferometer import (
    ComplexInterferogram,
    Interferogram,
    MziConfig,
    PathwayTerms,
    brute_force_rate,
    closed_form_rates_gaussian,
    double_gaussian_jsa,
    mzi_transfer_ca,
    mzi_transfer_cb,
    mzi_transfer_da,
    mzi_transfer_db,
    pathway_terms,
    rate_0f,
    rate_1f,
    rate_1f_integrand,
    rate_2f,
    rate_2f_integrand,
    rate_full,
)
from .media import (
    NotchParams,
    SlabParams,
    TransferFunction,
    anticausal_energy_fraction,
    eta_identity,
    eta_notch,
    eta_slab,
    kramers_kronig_phase,
    notch_magnitude,
)
from .scenario import (
    ConfigError,
    ScenarioConfig,
    ScenarioResult,
    convert_path_step,
    load_config,
    run_scenario,
    spectrum_csv,
    write_outputs,
)
from .spectra import (
    Spectrum,
    gaussian_spectrum,
    load_spectrum,
    super_gaussian_spectrum,
)

__all__ = [
    "C_NM_PER_FS",
    "ComplexInterferogram",
    "ConfigError",
    "FringeFit",
    "FrequencyGrid",
    "GvdFit",
    "Interferogram",
    "LockinOutput",
    "ModulationConfig",
    "MziConfig",
    "NoiseConfig",
    "NotchParams",
    "PathwayTerms",
    "PeakMetrics",
    "RecoveredSpectrum",
    "ScenarioConfig",
    "ScenarioResult",
    "SlabParams",
    "Spectrum",
    "SweepSamples",
    "TransferFunction",
    "anticausal_energy_fraction",
    "brute_force_rate",
    "closed_form_rates_gaussian",
    "convert_path_step",
    "double_gaussian_jsa",
    "downsampled_a0f",
    "downsampled_z1f",
    "downsampled_z2f",
    "eta_identity",
    "eta_notch",
    "eta_slab",
    "fft_interferogram",
    "fit_balanced_fringes",
    "fit_gvd",
    "fully_sampled_scan",
    "gaussian_spectrum",
    "kramers_kronig_phase",
    "load_config",
    "load_spectrum",
    "lockin_extract",
    "lockin_sweep",
    "make_grid",
    "mzi_transfer_ca",
    "mzi_transfer_cb",
    "mzi_transfer_da",
    "mzi_transfer_db",
    "notch_magnitude",
    "omega_from_wavelength",
    "pathway_terms",
    "peak_metrics",
    "rate_0f",
    "rate_1f",
    "rate_1f_integrand",
    "rate_2f",
    "rate_2f_integrand",
    "rate_full",
    "recover_sample_response",
    "remove_linear_phase",
    "run_scenario",
    "spectrum_csv",
    "super_gaussian_spectrum",
    "synthesize_timeseries",
    "unwrap_masked",
    "wavelength_from_omega",
    "write_outputs",
]
