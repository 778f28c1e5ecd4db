import json
import subprocess
import sys

import numpy as np
import pytest

from epmzi.grid import C_NM_PER_FS
from epmzi.scenario import (
    ConfigError,
    ScenarioConfig,
    build_tau_axis,
    bundled_config_names,
    convert_path_step,
    load_config,
    parse_interferogram_csv,
    resolve_config_arg,
    run_scenario,
    write_outputs,
)

TINY_TOML = """
[source]
kind = "gaussian"
center_nm = 532.0
fwhm_nm = 36.5

[scan]
mode = "downsampled"
tau_span_fs = 40.0

[grid]
n_points = 512

[mzi]
samples_per_period = 8

[outputs]
directory = "out"
"""


def _tiny_config(**overrides) -> ScenarioConfig:
    cfg = ScenarioConfig.model_validate(
        {
            "scan": {"mode": "downsampled", "tau_span_fs": 40.0},
            "grid": {"n_points": 512},
            "mzi": {"samples_per_period": 8},
        }
    )
    return cfg.model_copy(update=overrides, deep=True) if overrides else cfg


def _cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "epmzi.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def test_bundled_configs_load_and_validate():
    names = bundled_config_names()
    assert names == ["no_sample", "notch", "quartz"]
    for name in names:
        config = load_config(resolve_config_arg(name))
        assert isinstance(config, ScenarioConfig)
    with pytest.raises(ConfigError, match="bundled configs"):
        resolve_config_arg("does_not_exist")


def test_load_config_reports_field_locations(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[scan]\nstep_nm = -1.0\n")
    with pytest.raises(ConfigError, match="scan.step_nm"):
        load_config(bad)
    bad.write_text("[scan]\nstride = 3\n")
    with pytest.raises(ConfigError, match="scan.stride"):
        load_config(bad)
    bad.write_text('[source]\nkind = "file"\n')
    with pytest.raises(ConfigError, match="source.path is required"):
        load_config(bad)
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.toml")
    bad.write_text("not toml [")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_path_step_conversion():
    assert convert_path_step(15.0) == 15.0 / C_NM_PER_FS
    assert convert_path_step(15.0) == pytest.approx(0.050034614279722806, abs=0)
    assert convert_path_step(150.0) == pytest.approx(0.5003461427972281, abs=0)
    with pytest.raises(ValueError, match="positive"):
        convert_path_step(0.0)


def test_tau_axis_spans_symmetrically():
    config = _tiny_config()
    tau = build_tau_axis(config.scan)
    step = convert_path_step(config.scan.step_nm)
    assert tau[0] == -20.0
    assert tau.size == int(np.floor(40.0 / step)) + 1
    np.testing.assert_allclose(np.diff(tau), step, rtol=1e-12)
    shrunk = config.scan.model_copy(update={"tau_span_fs": 0.1})
    with pytest.raises(ConfigError, match="fewer than two"):
        build_tau_axis(shrunk)


def test_downsampled_run_emits_the_full_file_set():
    result = run_scenario(_tiny_config())
    assert sorted(result.files) == [
        "comp_0f.csv",
        "comp_0f.svg",
        "comp_1f.csv",
        "comp_1f.svg",
        "comp_2f.csv",
        "comp_2f.svg",
        "fit_report.json",
        "spectrum_recovered.csv",
        "spectrum_recovered.svg",
    ]
    for name, text in result.files.items():
        assert "\r" not in text, name
        assert text.endswith("\n"), name
    assert result.files["comp_0f.csv"].splitlines()[0] == "tau_fs,rate"
    assert (
        result.files["comp_1f.csv"].splitlines()[0] == "tau_fs,re,im,amp,phase"
    )
    assert (
        result.files["spectrum_recovered.csv"].splitlines()[0]
        == "omega_rad_per_fs,magnitude,phase_rad,valid"
    )
    # without a sample the 2f amplitude is |I_2f|/2 = 1/2 at every delay
    rows = result.files["comp_2f.csv"].splitlines()[1:]
    amps = np.array([float(r.split(",")[3]) for r in rows])
    np.testing.assert_allclose(amps, 0.5, atol=1e-9)
    report = result.report
    assert report["mode"] == "downsampled"
    assert report["seed"] == 12345
    assert report["config"]["grid"]["n_points"] == 512
    assert report["metrics"]["peak"]["peak_to_baseline"] == pytest.approx(1.5, abs=1e-3)
    assert json.loads(result.files["fit_report.json"]) == report


def test_csv_round_trip_is_exact():
    result = run_scenario(_tiny_config())
    z1 = parse_interferogram_csv(result.files["comp_1f.csv"], name="comp_1f.csv")
    assert z1.harmonic == 1
    again = parse_interferogram_csv(result.files["comp_2f.csv"], name="comp_2f.csv")
    assert again.harmonic == 2
    a0 = parse_interferogram_csv(result.files["comp_0f.csv"], name="comp_0f.csv")
    assert a0.kind == "comp_0f"
    tau = build_tau_axis(_tiny_config().scan)
    np.testing.assert_array_equal(z1.tau_axis, tau)
    with pytest.raises(ValueError, match="unrecognized header"):
        parse_interferogram_csv("a,b\n1,2\n")
    with pytest.raises(ValueError, match="non-numeric"):
        parse_interferogram_csv("tau_fs,rate\n0.0,x\n1.0,2.0\n")
    with pytest.raises(ValueError, match="empty"):
        parse_interferogram_csv("")


def test_seed_override_lands_in_the_report():
    config = _tiny_config()
    result = run_scenario(config, seed=99)
    assert result.report["seed"] == 99
    # noise disabled: the seed is recorded but outputs stay deterministic
    again = run_scenario(config, seed=99)
    assert again.files == result.files


def test_slab_run_reports_gvd_and_group_delay():
    config = load_config(resolve_config_arg("quartz"))
    config.grid.n_points = 1024  # keep the test quick; physics unchanged
    result = run_scenario(config)
    gvd = result.report["metrics"]["gvd"]
    assert "error" not in gvd
    assert gvd["gvd"] == pytest.approx(75.970, rel=0.01)
    assert result.report["metrics"]["group_delay_shift_fs"] == pytest.approx(
        0.0, abs=1e-3
    )


def test_notch_run_recovers_against_identity_reference():
    config = _tiny_config()
    config.sample.kind = "notch"
    config.scan.tau_span_fs = 600.0
    config.grid.n_points = 1024
    config.grid.span_rad_per_fs = 3.0
    result = run_scenario(config)
    lines = result.files["spectrum_recovered.csv"].splitlines()[1:]
    data = np.array([[float(c) for c in line.split(",")] for line in lines])
    valid = data[:, 3].astype(bool)
    assert valid.any()
    # the blocked band is masked out of the recovered response
    center = np.argmin(np.abs(data[:, 0] - config.sample.notch_center_rad_per_fs))
    assert not valid[center]


def test_fully_sampled_run_fits_fringes():
    config = _tiny_config()
    # narrowband source keeps the envelope flat across the short scan
    config.source.fwhm_nm = 2.0
    config.scan.mode = "fully_sampled"
    config.scan.step_nm = 15.0
    config.scan.tau_span_fs = 12.0
    result = run_scenario(config)
    assert "fully_sampled.csv" in result.files
    vis = result.report["metrics"]["visibility"]
    assert vis["amplitude"] == pytest.approx(8.0, rel=1e-2)
    assert vis["visibility"] == pytest.approx(1.0, abs=5e-3)
    assert "peak" in result.report["metrics"]


def test_write_outputs_round_trips(tmp_path):
    result = run_scenario(_tiny_config())
    written = write_outputs(result, tmp_path / "out")
    assert [p.name for p in written] == sorted(result.files)
    for p in written:
        assert p.read_text() == result.files[p.name]


def test_cli_validate_checks_without_writing(tmp_path):
    proc = _cli(["simulate", "quartz", "--validate"], tmp_path)
    assert proc.returncode == 0, proc.stderr
    assert "config ok" in proc.stdout
    assert list(tmp_path.iterdir()) == []


def test_cli_simulate_is_deterministic(tmp_path):
    (tmp_path / "tiny.toml").write_text(TINY_TOML)
    for out in ("a", "b"):
        proc = _cli(
            ["simulate", "tiny.toml", "--out", out, "--seed", "7"], tmp_path
        )
        assert proc.returncode == 0, proc.stderr
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes(), name
    report = json.loads((tmp_path / "a" / "fit_report.json").read_text())
    assert report["seed"] == 7
    # --out redirects files only; the report records the config as written
    assert report["config"]["outputs"]["directory"] == "out"


def test_cli_rejects_missing_config(tmp_path):
    proc = _cli(["simulate", "missing.toml"], tmp_path)
    assert proc.returncode == 2
    assert "error:" in proc.stderr


def test_cli_analyze_with_reference(tmp_path):
    sample_cfg = _tiny_config()
    sample_cfg.sample.kind = "notch"
    sample_cfg.scan.tau_span_fs = 200.0
    sample_cfg.grid.n_points = 1024
    sample_cfg.grid.span_rad_per_fs = 3.0
    write_outputs(run_scenario(sample_cfg), tmp_path / "sample")

    ref_cfg = sample_cfg.model_copy(deep=True)
    ref_cfg.sample.kind = "none"
    ref = run_scenario(ref_cfg)
    (tmp_path / "ref_comp_1f.csv").write_text(ref.files["comp_1f.csv"])

    proc = _cli(
        [
            "analyze",
            "sample/comp_1f.csv",
            "--reference",
            "ref_comp_1f.csv",
            "--out",
            "analysis",
        ],
        tmp_path,
    )
    assert proc.returncode == 0, proc.stderr
    out = tmp_path / "analysis"
    assert (out / "comp_1f_spectrum.csv").is_file()
    assert (out / "comp_1f_spectrum.svg").is_file()
    report = json.loads((out / "fit_report.json").read_text())
    assert report["comp_1f.csv"]["metrics"]["recovery"] == {
        "against_reference": True
    }


def test_cli_analyze_rejects_garbage(tmp_path):
    (tmp_path / "junk.csv").write_text("definitely,not\nan,interferogram\n")
    proc = _cli(["analyze", "junk.csv"], tmp_path)
    assert proc.returncode == 2
    assert "error:" in proc.stderr


def test_cli_analyze_rejects_reference_from_a_different_scan(tmp_path):
    # scans of different span have different FFT axes, so the ratio is
    # undefined; that is an input problem (exit 2), not a crash (exit 3)
    sample = run_scenario(_tiny_config())
    (tmp_path / "sample_comp_1f.csv").write_text(sample.files["comp_1f.csv"])

    ref_cfg = _tiny_config()
    ref_cfg.scan.tau_span_fs = 60.0
    ref = run_scenario(ref_cfg)
    (tmp_path / "ref_comp_1f.csv").write_text(ref.files["comp_1f.csv"])

    proc = _cli(
        ["analyze", "sample_comp_1f.csv", "--reference", "ref_comp_1f.csv"],
        tmp_path,
    )
    assert proc.returncode == 2
    assert "share one frequency axis" in proc.stderr
