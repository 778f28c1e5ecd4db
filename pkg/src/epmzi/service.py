"""HTTP facade over the scenario runner and analysis chain.

Request bodies reuse the scenario config models, so malformed configs come
back as standard 422 responses naming the offending field.  The service is
stateless: simulations return their rendered files in the response instead of
writing to the server's disk.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .grid import omega_from_wavelength
from .interferometer import ComplexInterferogram
from .scenario import (
    ConfigError,
    ScenarioConfig,
    analyze_interferogram,
    parse_interferogram_csv,
    run_scenario,
    spectrum_csv,
)

app = FastAPI(
    title="epmzi",
    version=__version__,
    description=(
        "Two-photon Mach-Zehnder spectroscopy simulator: synthesize "
        "coincidence interferograms and recover sample responses."
    ),
)


class ValidateResponse(BaseModel):
    valid: bool
    config: dict


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioConfig = ScenarioConfig()
    seed: int | None = None
    include_files: bool = True


class SimulateResponse(BaseModel):
    report: dict
    files: dict[str, str]


class AnalyzeRequest(BaseModel):
    """One interferogram CSV (content, not path) plus analysis knobs.

    ``filename`` only disambiguates what the CSV text cannot: harmonic (a
    ``2f`` name) and 0f tagging.  ``reference_csv`` must hold a no-sample
    harmonic-1 interferogram for response recovery.
    """

    model_config = ConfigDict(extra="forbid")

    csv: str
    filename: str = "comp_1f.csv"
    reference_csv: str | None = None
    reference_filename: str = "comp_1f.csv"
    center_nm: float = Field(532.0, gt=0)
    reference_nm: float = Field(633.0, gt=0)
    window: Literal["none", "hann"] = "none"
    length_mm: float | None = Field(None, gt=0)


class AnalyzeResponse(BaseModel):
    metrics: dict
    spectrum_csv: str


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/validate", response_model=ValidateResponse)
def validate(config: ScenarioConfig) -> ValidateResponse:
    """Check a config without running it; 422 carries field-level errors."""
    return ValidateResponse(valid=True, config=config.model_dump(mode="json"))


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    try:
        result = run_scenario(req.config, seed=req.seed)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return SimulateResponse(
        report=result.report, files=result.files if req.include_files else {}
    )


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    try:
        ifg = parse_interferogram_csv(req.csv, name=req.filename)
        reference = None
        if req.reference_csv is not None:
            reference = parse_interferogram_csv(
                req.reference_csv, name=req.reference_filename
            )
            if not isinstance(reference, ComplexInterferogram):
                raise ValueError(
                    "reference_csv must hold a complex (lock-in) interferogram"
                )
        spec, metrics = analyze_interferogram(
            ifg,
            omega_0=omega_from_wavelength(req.center_nm),
            omega_r=omega_from_wavelength(req.reference_nm),
            window=req.window,
            reference=reference,
            length_mm=req.length_mm,
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return AnalyzeResponse(metrics=metrics, spectrum_csv=spectrum_csv(spec))
