"""Command-line entry points: simulate scenarios, analyze CSVs, serve HTTP.

Exit codes: 0 on success, 2 for configuration/usage errors (including
argparse usage failures), 3 for runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .grid import omega_from_wavelength
from .interferometer import ComplexInterferogram
from .scenario import (
    ConfigError,
    analyze_interferogram,
    load_config,
    read_interferogram_csv,
    resolve_config_arg,
    run_scenario,
    spectrum_csv,
    spectrum_svg,
    write_outputs,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epmzi",
        description=(
            "Two-photon Mach-Zehnder spectroscopy simulator: synthesize "
            "coincidence interferograms and recover sample responses."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser(
        "simulate", help="run a scenario config and write its output files"
    )
    sim.add_argument(
        "config",
        help="TOML config path, or a bundled name: no_sample, quartz, notch",
    )
    sim.add_argument("--out", help="output directory (overrides outputs.directory)")
    sim.add_argument("--seed", type=int, help="override noise.seed for this run")
    sim.add_argument(
        "--validate", action="store_true", help="check the config and exit"
    )

    ana = sub.add_parser(
        "analyze", help="re-run analysis on saved interferogram CSVs"
    )
    ana.add_argument("csvs", nargs="+", metavar="csv")
    ana.add_argument(
        "--reference", help="no-sample comp_1f CSV enabling response recovery"
    )
    ana.add_argument(
        "--center-nm", type=float, default=532.0, help="signal centre wavelength"
    )
    ana.add_argument(
        "--reference-nm", type=float, default=633.0, help="lock-in reference wavelength"
    )
    ana.add_argument(
        "--length-mm", type=float, help="sample length; enables the GVD fit"
    )
    ana.add_argument("--window", choices=("none", "hann"), default="none")
    ana.add_argument("--out", default=".", help="directory for analysis outputs")

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    path = resolve_config_arg(args.config)
    config = load_config(path)
    if args.validate:
        print(f"{path}: config ok")
        return 0
    result = run_scenario(config, seed=args.seed)
    # The report embeds the config as written, so the same config and seed
    # give byte-identical outputs wherever --out points.
    directory = args.out if args.out is not None else config.outputs.directory
    for target in write_outputs(result, directory):
        print(f"wrote {target}")
    return 0


def _load_input(path: Path):
    try:
        return read_interferogram_csv(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_analyze(args: argparse.Namespace) -> int:
    omega_0 = omega_from_wavelength(args.center_nm)
    omega_r = omega_from_wavelength(args.reference_nm)
    reference = None
    if args.reference:
        reference = _load_input(Path(args.reference))
        if not isinstance(reference, ComplexInterferogram):
            raise ConfigError(
                f"{args.reference}: reference must be a complex (lock-in) CSV"
            )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report: dict = {}
    for name in args.csvs:
        path = Path(name)
        ifg = _load_input(path)
        try:
            spec, metrics = analyze_interferogram(
                ifg,
                omega_0=omega_0,
                omega_r=omega_r,
                window=args.window,
                reference=reference,
                length_mm=args.length_mm,
            )
        except ValueError as exc:
            # data that cannot be analyzed is bad input, same as a bad config
            raise ConfigError(f"{path}: {exc}") from exc
        stem = path.stem
        (out_dir / f"{stem}_spectrum.csv").write_text(
            spectrum_csv(spec), newline="\n"
        )
        (out_dir / f"{stem}_spectrum.svg").write_text(
            spectrum_svg(spec, f"Spectrum of {path.name}"), newline="\n"
        )
        report[path.name] = {
            "metrics": metrics,
            "spectrum_csv": f"{stem}_spectrum.csv",
        }
        print(f"wrote {out_dir / (stem + '_spectrum.csv')}")
    (out_dir / "fit_report.json").write_text(
        json.dumps(report, indent=2) + "\n", newline="\n"
    )
    print(f"wrote {out_dir / 'fit_report.json'}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_serve(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # contract: runtime failures exit 3, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
