"""Scenario orchestration: validated configs, simulation runs, file emission.

A scenario is one TOML file with tables [source], [sample], [scan], [mzi],
[noise], [grid], [analysis], [outputs] mapping onto the models below.  A run
renders every output file in memory (CSV, SVG, JSON report) so the CLI can
write them to disk and the HTTP service can return them directly.

Down-sampled runs demodulate a simulated lock-in sweep and recover the sample
response from Z_1f against an identity-sample reference (the analytic
noise-free form, which the simulated lock-in reproduces to round-off).
Fully-sampled runs emit the static-phase scan and its raw transform.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .analysis import (
    RecoveredSpectrum,
    fft_interferogram,
    fit_balanced_fringes,
    fit_gvd,
    peak_metrics,
    recover_sample_response,
    remove_linear_phase,
)
from .demodulation import (
    ModulationConfig,
    NoiseConfig,
    downsampled_z1f,
    fully_sampled_scan,
    lockin_sweep,
)
from .grid import C_NM_PER_FS, FrequencyGrid, make_grid, omega_from_wavelength
from .interferometer import ComplexInterferogram, Interferogram, MziConfig
from .media import NotchParams, SlabParams, eta_identity, eta_notch, eta_slab
from .spectra import gaussian_spectrum, load_spectrum, super_gaussian_spectrum
from .svgplot import line_plot

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class ConfigError(ValueError):
    """Invalid or unresolvable scenario configuration."""


class SourceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["gaussian", "supergaussian", "file"] = "gaussian"
    center_nm: float = Field(532.0, gt=0)
    fwhm_nm: float = Field(36.5, gt=0)
    order: int = Field(2, ge=1)
    path: str | None = None

    @model_validator(mode="after")
    def _needs_path(self) -> "SourceSpec":
        if self.kind == "file" and not self.path:
            raise ValueError("source.path is required when kind = 'file'")
        return self


class SampleSpec(BaseModel):
    """Sample in the fixed arm; only the fields of the active kind matter."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["none", "slab", "notch"] = "none"
    length_mm: float = Field(30.8, gt=0)
    alpha_fs_per_mm: float = 0.0
    gvd_fs2_per_mm: float = 75.970
    gamma_fs3_per_mm: float = 0.0
    notch_center_rad_per_fs: float = Field(3.527, gt=0)
    notch_width_rad_per_fs: float = Field(0.05285, gt=0)
    notch_steepness: float = Field(2000.0, gt=0)


class ScanSpec(BaseModel):
    """Delay scan: path step defaults to 15 nm fully sampled, 150 nm down."""

    model_config = ConfigDict(extra="forbid")

    mode: Literal["fully_sampled", "downsampled"] = "downsampled"
    step_nm: float | None = Field(None, gt=0)
    tau_span_fs: float = Field(80.0, gt=0)

    @model_validator(mode="after")
    def _default_step(self) -> "ScanSpec":
        if self.step_nm is None:
            self.step_nm = 15.0 if self.mode == "fully_sampled" else 150.0
        return self


class MziSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: float = Field(_INV_SQRT2, gt=0, lt=1)
    t: float = Field(_INV_SQRT2, gt=0, lt=1)
    reference_nm: float = Field(633.0, gt=0)
    nu21_khz: float = Field(20.0, gt=0)
    samples_per_period: int = Field(256, ge=8)
    dwell_time_ms: float = Field(1.0, gt=0)


class NoiseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = False
    mean_counts_per_sample: float = Field(1000.0, gt=0)
    phase_jitter_sigma: float = Field(0.0, ge=0)
    seed: int = 12345


class GridSpec(BaseModel):
    """Frequency-grid numerics; span defaults to span_factor x source FWHM."""

    model_config = ConfigDict(extra="forbid")

    n_points: int = Field(4096, ge=16)
    span_factor: float = Field(8.0, gt=0)
    span_rad_per_fs: float | None = Field(None, gt=0)


class AnalysisSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    window: Literal["none", "hann"] = "none"


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "out"


class ScenarioConfig(BaseModel):
    """Full simulation recipe; TOML tables map one-to-one onto the fields."""

    model_config = ConfigDict(extra="forbid")

    source: SourceSpec = SourceSpec()
    sample: SampleSpec = SampleSpec()
    scan: ScanSpec = ScanSpec()
    mzi: MziSpec = MziSpec()
    noise: NoiseSpec = NoiseSpec()
    grid: GridSpec = GridSpec()
    analysis: AnalysisSpec = AnalysisSpec()
    outputs: OutputSpec = OutputSpec()


def format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "config"
        lines.append(f"{loc}: {err['msg']}")
    return "invalid scenario config:\n  " + "\n  ".join(lines)


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a TOML scenario file.

    A relative ``source.path`` is resolved against the config file's
    directory; ``outputs.directory`` stays as written (it is resolved against
    the working directory at write time, so bundled configs write locally).
    """
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        config = ScenarioConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(format_validation_error(exc)) from exc
    if config.source.path is not None and not Path(config.source.path).is_absolute():
        config.source.path = str(path.parent / config.source.path)
    return config


def bundled_config_names() -> list[str]:
    base = resources.files("epmzi") / "configs"
    return sorted(p.name[: -len(".toml")] for p in base.iterdir() if p.name.endswith(".toml"))


def resolve_config_arg(arg: str) -> Path:
    """Accept either a config file path or a bundled config name."""
    p = Path(arg)
    if p.is_file():
        return p
    if "/" not in arg and not arg.endswith(".toml"):
        candidate = resources.files("epmzi") / "configs" / f"{arg}.toml"
        if candidate.is_file():
            return Path(str(candidate))
    names = ", ".join(bundled_config_names())
    raise ConfigError(f"config not found: {arg} (bundled configs: {names})")


def convert_path_step(step_nm: float) -> float:
    """Delay increment for a path-length step: tau = step / c."""
    if step_nm <= 0:
        raise ValueError(f"step_nm must be positive, got {step_nm}")
    return step_nm / C_NM_PER_FS


def source_bandwidth(source: SourceSpec) -> float:
    """Nominal FWHM in rad/fs: d(omega) = (omega/lambda) d(lambda)."""
    return omega_from_wavelength(source.center_nm) * source.fwhm_nm / source.center_nm


def build_grid(config: ScenarioConfig) -> FrequencyGrid:
    omega_0 = omega_from_wavelength(config.source.center_nm)
    span = config.grid.span_rad_per_fs
    if span is None:
        if config.source.kind == "file":
            raise ConfigError(
                "grid.span_rad_per_fs is required for file sources "
                "(no nominal bandwidth to scale from)"
            )
        span = config.grid.span_factor * source_bandwidth(config.source)
    return make_grid(omega_0, span, config.grid.n_points)


def build_spectrum(config: ScenarioConfig, grid: FrequencyGrid):
    source = config.source
    if source.kind == "gaussian":
        return gaussian_spectrum(grid, source_bandwidth(source))
    if source.kind == "supergaussian":
        return super_gaussian_spectrum(grid, source_bandwidth(source), source.order)
    try:
        return load_spectrum(source.path, grid)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"source.path: {exc}") from exc


def build_eta(config: ScenarioConfig, grid: FrequencyGrid):
    sample = config.sample
    if sample.kind == "none":
        return eta_identity(grid)
    if sample.kind == "slab":
        params = SlabParams(
            alpha=sample.alpha_fs_per_mm,
            beta=0.5 * sample.gvd_fs2_per_mm,
            gamma=sample.gamma_fs3_per_mm,
            length=sample.length_mm,
        )
        return eta_slab(grid, params)
    params = NotchParams(
        omega_n=sample.notch_center_rad_per_fs,
        width=sample.notch_width_rad_per_fs,
        steepness=sample.notch_steepness,
    )
    return eta_notch(grid, params)


def build_tau_axis(scan: ScanSpec) -> np.ndarray:
    step = convert_path_step(scan.step_nm)
    n = int(math.floor(scan.tau_span_fs / step)) + 1
    if n < 2:
        raise ConfigError(
            f"scan.tau_span_fs = {scan.tau_span_fs} fs holds fewer than two "
            f"steps of {step:.6g} fs"
        )
    return -0.5 * scan.tau_span_fs + step * np.arange(n)


def _build_runtime(config: ScenarioConfig):
    grid = build_grid(config)
    spectrum = build_spectrum(config, grid)
    eta = build_eta(config, grid)
    try:
        cfg = MziConfig(r=config.mzi.r, t=config.mzi.t)
        mod = ModulationConfig(
            omega_r=omega_from_wavelength(config.mzi.reference_nm),
            nu21_khz=config.mzi.nu21_khz,
            samples_per_period=config.mzi.samples_per_period,
            dwell_time_ms=config.mzi.dwell_time_ms,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return grid, spectrum, eta, cfg, mod


def _num(v) -> str:
    return repr(float(v))


def _csv_text(header: str, columns: list[list[str]]) -> str:
    lines = [header]
    lines.extend(",".join(row) for row in zip(*columns))
    return "\n".join(lines) + "\n"


def interferogram_csv(ifg: Interferogram) -> str:
    return _csv_text(
        "tau_fs,rate",
        [[_num(t) for t in ifg.tau_axis], [_num(v) for v in ifg.values]],
    )


def complex_interferogram_csv(ifg: ComplexInterferogram) -> str:
    z = ifg.values
    return _csv_text(
        "tau_fs,re,im,amp,phase",
        [
            [_num(t) for t in ifg.tau_axis],
            [_num(v) for v in z.real],
            [_num(v) for v in z.imag],
            [_num(v) for v in np.abs(z)],
            [_num(v) for v in np.angle(z)],
        ],
    )


def spectrum_csv(spec: RecoveredSpectrum) -> str:
    return _csv_text(
        "omega_rad_per_fs,magnitude,phase_rad,valid",
        [
            [_num(v) for v in spec.omega_axis],
            [_num(v) for v in spec.magnitude],
            [_num(v) for v in spec.phase],
            [str(int(v)) for v in spec.valid_mask],
        ],
    )


def parse_interferogram_csv(
    text: str, name: str = "<csv>"
) -> Interferogram | ComplexInterferogram:
    """Rebuild an interferogram from CSV text written by this module.

    The header picks the type (``tau_fs,rate`` real, five-column lock-in
    complex); ``name`` supplies what the CSV cannot: ``2f`` selects harmonic
    2, a ``0f`` rate file is tagged comp_0f.
    """
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{name}: empty file") from None
    rows = [row for row in reader if row]

    def parse(n_cols: int) -> np.ndarray:
        out = []
        for lineno, row in enumerate(rows, start=2):
            if len(row) != n_cols:
                raise ValueError(
                    f"{name}:{lineno}: expected {n_cols} columns, got {len(row)}"
                )
            try:
                out.append([float(c) for c in row])
            except ValueError:
                raise ValueError(
                    f"{name}:{lineno}: non-numeric value in {row!r}"
                ) from None
        if len(out) < 2:
            raise ValueError(f"{name}: need at least two data rows")
        return np.asarray(out)

    if header == ["tau_fs", "rate"]:
        data = parse(2)
        kind = "comp_0f" if "0f" in name else "fully_sampled"
        return Interferogram(data[:, 0], data[:, 1], kind=kind)
    if header == ["tau_fs", "re", "im", "amp", "phase"]:
        data = parse(5)
        harmonic = 2 if "2f" in name else 1
        return ComplexInterferogram(
            data[:, 0], data[:, 1] + 1j * data[:, 2], harmonic=harmonic
        )
    raise ValueError(f"{name}: unrecognized header {','.join(header)!r}")


def read_interferogram_csv(path: str | Path) -> Interferogram | ComplexInterferogram:
    path = Path(path)
    return parse_interferogram_csv(path.read_text(), name=path.name)


def _svg_real(ifg: Interferogram, title: str) -> str:
    return line_plot(
        ifg.tau_axis,
        [("rate", ifg.values)],
        title,
        "delay (fs)",
        "normalized coincidence rate",
    )


def _svg_complex(ifg: ComplexInterferogram, title: str) -> str:
    z = ifg.values
    return line_plot(
        ifg.tau_axis,
        [("re", z.real), ("im", z.imag), ("amp", np.abs(z))],
        title,
        "delay (fs)",
        "lock-in output (rate units)",
    )


def spectrum_svg(spec: RecoveredSpectrum, title: str) -> str:
    return line_plot(
        spec.omega_axis,
        [("magnitude", spec.magnitude), ("phase", spec.phase)],
        title,
        "angular frequency (rad/fs)",
        "magnitude (norm.) / phase (rad)",
    )


def _metric_dict(fn, *args) -> dict:
    try:
        return asdict(fn(*args))
    except ValueError as exc:
        return {"error": str(exc)}


@dataclass(frozen=True)
class ScenarioResult:
    """In-memory run products; write with write_outputs or serve directly."""

    files: dict[str, str]
    report: dict


def run_scenario(config: ScenarioConfig, seed: int | None = None) -> ScenarioResult:
    """Simulate one scenario and render all of its output files.

    ``seed`` overrides ``noise.seed`` for this run only.  The report embeds
    the resolved config, the applied seed, and the fit metrics; the same
    config and seed reproduce every output byte for byte.
    """
    if seed is None:
        seed = config.noise.seed
    grid, spectrum, eta, cfg, mod = _build_runtime(config)
    noise = None
    if config.noise.enabled or config.noise.phase_jitter_sigma > 0:
        noise = NoiseConfig(
            poisson_enabled=config.noise.enabled,
            mean_counts_per_sample=config.noise.mean_counts_per_sample,
            phase_jitter_sigma=config.noise.phase_jitter_sigma,
            seed=seed,
        )
    tau_axis = build_tau_axis(config.scan)
    window = config.analysis.window

    files: dict[str, str] = {}
    metrics: dict = {}

    if config.scan.mode == "fully_sampled":
        ifg = fully_sampled_scan(tau_axis, eta, spectrum, cfg, 0.0, noise)
        files["fully_sampled.csv"] = interferogram_csv(ifg)
        files["fully_sampled.svg"] = _svg_real(ifg, "Fully sampled coincidence scan")
        recovered = fft_interferogram(ifg, window)
        metrics["peak"] = _metric_dict(peak_metrics, ifg)
        metrics["visibility"] = (
            _metric_dict(fit_balanced_fringes, ifg, grid.omega_0)
            if config.sample.kind == "none"
            else None
        )
        metrics["gvd"] = None
    else:
        a0, z1, z2 = lockin_sweep(tau_axis, eta, spectrum, cfg, mod, noise)
        files["comp_0f.csv"] = interferogram_csv(a0)
        files["comp_0f.svg"] = _svg_real(a0, "Phase-averaged (0f) interferogram")
        files["comp_1f.csv"] = complex_interferogram_csv(z1)
        files["comp_1f.svg"] = _svg_complex(z1, "Lock-in 1f interferogram")
        files["comp_2f.csv"] = complex_interferogram_csv(z2)
        files["comp_2f.svg"] = _svg_complex(z2, "Lock-in 2f interferogram")
        spec1 = fft_interferogram(z1, window, omega_r=mod.omega_r)
        if config.sample.kind == "none":
            recovered = spec1
        else:
            reference = downsampled_z1f(tau_axis, eta_identity(grid), spectrum, cfg, mod)
            ref_spec = fft_interferogram(reference, window, omega_r=mod.omega_r)
            recovered = recover_sample_response(spec1, ref_spec)
        metrics["peak"] = _metric_dict(peak_metrics, a0)
        metrics["visibility"] = None
        if config.sample.kind == "slab":
            centered, shift = remove_linear_phase(z1)
            shifted_spec = fft_interferogram(centered, window, omega_r=mod.omega_r)
            metrics["gvd"] = _metric_dict(
                fit_gvd, shifted_spec, config.sample.length_mm, grid.omega_0
            )
            metrics["group_delay_shift_fs"] = shift
        else:
            metrics["gvd"] = None

    files["spectrum_recovered.csv"] = spectrum_csv(recovered)
    files["spectrum_recovered.svg"] = spectrum_svg(recovered, "Recovered spectrum")

    report = {
        "mode": config.scan.mode,
        "seed": seed,
        "metrics": metrics,
        "files": sorted(files),
        "config": config.model_dump(mode="json"),
    }
    files["fit_report.json"] = json.dumps(report, indent=2) + "\n"
    return ScenarioResult(files=files, report=report)


def analyze_interferogram(
    ifg: Interferogram | ComplexInterferogram,
    omega_0: float,
    omega_r: float,
    window: str = "none",
    reference: ComplexInterferogram | None = None,
    length_mm: float | None = None,
) -> tuple[RecoveredSpectrum, dict]:
    """Re-run the analysis chain on a stored or uploaded interferogram.

    Real scans get peak metrics (plus a fringe fit for fully sampled ones) and
    their raw transform.  Harmonic-1 complex scans get a GVD fit when
    ``length_mm`` is given, and response recovery when a no-sample harmonic-1
    ``reference`` is given; otherwise their raw transform is returned.
    """
    metrics: dict = {}
    if isinstance(ifg, Interferogram):
        spec = fft_interferogram(ifg, window)
        metrics["peak"] = _metric_dict(peak_metrics, ifg)
        if ifg.kind == "fully_sampled":
            metrics["visibility"] = _metric_dict(fit_balanced_fringes, ifg, omega_0)
        if reference is not None:
            metrics["recovery"] = {
                "error": "reference given but the input is not a 1f interferogram"
            }
        return spec, metrics

    spec = fft_interferogram(ifg, window, omega_r=omega_r)
    if length_mm is not None and ifg.harmonic == 1:
        centered, shift = remove_linear_phase(ifg)
        shifted_spec = fft_interferogram(centered, window, omega_r=omega_r)
        metrics["gvd"] = _metric_dict(fit_gvd, shifted_spec, length_mm, omega_0)
        metrics["group_delay_shift_fs"] = shift
    if reference is not None:
        if ifg.harmonic != 1 or reference.harmonic != 1:
            metrics["recovery"] = {
                "error": "response recovery needs harmonic-1 input and reference"
            }
        else:
            ref_spec = fft_interferogram(reference, window, omega_r=omega_r)
            spec = recover_sample_response(spec, ref_spec)
            metrics["recovery"] = {"against_reference": True}
    return spec, metrics


def write_outputs(result: ScenarioResult, directory: str | Path) -> list[Path]:
    """Write every rendered file under ``directory`` (created if needed)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(result.files):
        target = directory / name
        target.write_text(result.files[name], newline="\n")
        written.append(target)
    return written
