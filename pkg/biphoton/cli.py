import argparse
import json
import logging
import sys
from dataclasses import replace
from typing import List, Optional

from biphoton.analysis.fringe_fit import FringeFitter
from biphoton.analysis.plasmon import OpticalConstants, PlasmonAnalyzer
from biphoton.config import Config
from biphoton.core.detection import Normalization
from biphoton.exceptions import NumericalError, ValidationError
from biphoton.experiment.runner import ExperimentRunner
from biphoton.experiment.scenarios import Mode, Scenario, ScenarioConfig
from biphoton.utils.file_io import FileHandler

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _emit(document) -> None:
    print(json.dumps(document, sort_keys=True, indent=2))


def load_config(args) -> ScenarioConfig:
    """Scenario config from --config with command-line overrides applied."""
    cfg = ScenarioConfig.from_file(args.config) if args.config else ScenarioConfig()
    overrides = {}
    if args.scenario:
        overrides["scenario"] = args.scenario
    if args.mode:
        overrides["mode"] = Mode(args.mode)
    detection = cfg.detection
    if args.seed is not None:
        Config.set_seed(args.seed)
        detection = replace(detection, seed=args.seed)
    if args.normalization:
        detection = replace(detection, normalization=Normalization(args.normalization))
    overrides["detection"] = detection
    return replace(cfg, **overrides)


def cmd_scan(args) -> int:
    cfg = load_config(args)
    out_dir = Config.setup(args.out)
    result = ExperimentRunner.run_scenario(cfg)
    csv_path, json_path = ExperimentRunner.write_outputs(result, out_dir)
    logger.info(f"Scan written to '{csv_path}', fits to '{json_path}'")
    _emit(result.fit_report())
    return EXIT_OK


def cmd_fit(args) -> int:
    curve = FileHandler.read_curve_csv(args.csv, x_column=args.x_column, y_column=args.y_column)
    if args.free:
        fit = FringeFitter.fit_free_period(curve, polarity=args.polarity, weighting=args.weighting)
    else:
        fit = FringeFitter.fit_fixed_period(curve, args.period, harmonic=args.harmonic,
                                            polarity=args.polarity, weighting=args.weighting)
    report = fit.to_report()
    if args.out:
        FileHandler.save_json(report, Config.setup(args.out) / "fit.json")
    _emit(report)
    return EXIT_OK


def cmd_debroglie(args) -> int:
    """Free-period fit of a measured curve, or of a simulated no-plate scan."""
    if args.csv:
        curve = FileHandler.read_curve_csv(args.csv, x_column=args.x_column, y_column=args.y_column)
        fit = FringeFitter.fit_free_period(curve, weighting=args.weighting)
    else:
        cfg = replace(load_config(args), fit_period="free")
        fit = ExperimentRunner.run_scenario(cfg).fits["hv"]
    report = {"debroglie_wavelength_nm": fit.model.period_nm, "fit": fit.to_report()}
    _emit(report)
    return EXIT_OK


def cmd_resonance(args) -> int:
    oc = OpticalConstants.from_csv(args.constants) if args.constants else OpticalConstants.sample_gold()
    table = PlasmonAnalyzer.mode_table(args.period, oc, args.max_order)
    print(f"# optical constants: {oc.source}")
    print("mode,interface,resonance_nm")
    for mode, wavelength in table:
        value = f"{wavelength:.2f}" if wavelength is not None else "n/a"
        print(f"({mode.i},{mode.j}),{mode.interface.value},{value}")
    if args.wavelength is not None:
        mode, distance = PlasmonAnalyzer.nearest_mode(args.wavelength, args.period, oc, args.max_order)
        print(f"# nearest to {args.wavelength} nm: {mode.label()} (distance {distance:.2f} nm)")
    return EXIT_OK


def cmd_bethe(args) -> int:
    transmission = PlasmonAnalyzer.bethe_transmission(args.diameter, args.wavelength, args.period)
    _emit({
        "hole_diameter_nm": args.diameter,
        "wavelength_nm": args.wavelength,
        "period_nm": args.period,
        "bethe_transmission": transmission,
    })
    return EXIT_OK


def cmd_spectrum(args) -> int:
    spectrum = PlasmonAnalyzer.ingest_spectrum(FileHandler.read_text(args.csv))
    classical = args.classical
    if classical is None:
        classical = PlasmonAnalyzer.bethe_transmission(args.diameter, args.wavelength, args.period)
    _emit({
        "wavelength_nm": args.wavelength,
        "transmittance": PlasmonAnalyzer.transmittance_at(spectrum, args.wavelength),
        "classical": classical,
        "enhancement": PlasmonAnalyzer.enhancement_at(spectrum, args.wavelength, classical),
    })
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = load_config(args)
    first = ExperimentRunner.run_scenario(replace(cfg, scenario=Scenario(args.first)))
    second = ExperimentRunner.run_scenario(replace(cfg, scenario=Scenario(args.second)))
    report = ExperimentRunner.compare_cases(first, second)
    _emit({"first": args.first, "second": args.second, "phase_difference_over_pi": report})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="INI experiment config")
    common.add_argument("--seed", type=int, default=None, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("--mode", choices=["analytic", "mc"], default=None, help="Rate model")
    common.add_argument("--out", type=str, default=None, help="Output directory")
    common.add_argument("--normalization", choices=[n.value for n in Normalization], default=None,
                        help="HV coincidence normalization")
    common.add_argument("--scenario", choices=[s.value for s in Scenario], default=None,
                        help="Experimental configuration")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    curve = argparse.ArgumentParser(add_help=False)
    curve.add_argument("--x-column", default="delta_l_nm", help="Path-difference column")
    curve.add_argument("--y-column", default="rate_hv", help="Rate or count column")
    curve.add_argument("--weighting", choices=["none", "poisson"], default="none", help="Fit weights")

    geometry = argparse.ArgumentParser(add_help=False)
    geometry.add_argument("--diameter", type=float, default=Config.HOLE_DIAMETER_NM, help="Hole diameter (nm)")
    geometry.add_argument("--wavelength", type=float, default=Config.WAVELENGTH_NM, help="Wavelength (nm)")
    geometry.add_argument("--period", type=float, default=Config.ARRAY_PERIOD_NM, help="Array period (nm)")

    parser = argparse.ArgumentParser(description="Two-photon interference through a subwavelength hole array")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", parents=[common], help="Run a scenario and write CSV + fit JSON")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("fit", parents=[common, curve], help="Fit a fringe in an external CSV curve")
    p.add_argument("csv", help="CSV with path-difference and rate columns")
    p.add_argument("--period", type=float, default=Config.WAVELENGTH_NM, help="Base period (nm)")
    p.add_argument("--harmonic", type=int, default=2, help="Fringe period is period / harmonic")
    p.add_argument("--polarity", type=int, choices=[1, -1], default=1, help="+1 for 1+cos, -1 for 1-cos")
    p.add_argument("--free", action="store_true", help="Fit the period as well")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("debroglie", parents=[common, curve], help="Report the biphoton de Broglie wavelength")
    p.add_argument("csv", nargs="?", default=None, help="Measured curve (default: simulated scan)")
    p.set_defaults(handler=cmd_debroglie)

    p = sub.add_parser("resonance", parents=[common], help="Surface plasmon mode table")
    p.add_argument("--period", type=float, default=Config.ARRAY_PERIOD_NM, help="Array period (nm)")
    p.add_argument("--max-order", type=int, default=2, help="Largest sqrt(i^2 + j^2)")
    p.add_argument("--constants", type=str, default=None,
                   help="wavelength_nm,eps_real,eps_imag CSV (default: sample gold table)")
    p.add_argument("--wavelength", type=float, default=None, help="Also report the nearest mode")
    p.set_defaults(handler=cmd_resonance)

    p = sub.add_parser("bethe", parents=[common, geometry], help="Classical aperture transmission")
    p.set_defaults(handler=cmd_bethe)

    p = sub.add_parser("spectrum", parents=[common, geometry], help="Query a measured transmittance spectrum")
    p.add_argument("csv", help="wavelength_nm,transmittance CSV")
    p.add_argument("--classical", type=float, default=None,
                   help="Classical transmittance (default: Bethe estimate for the geometry)")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("compare", parents=[common], help="Phase offset between two scenarios")
    p.add_argument("--first", choices=[s.value for s in Scenario], default=Scenario.PLATE_HWP_FIRST.value)
    p.add_argument("--second", choices=[s.value for s in Scenario], default=Scenario.PLATE_HWP_AFTER.value)
    p.set_defaults(handler=cmd_compare)

    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map errors onto exit codes (0 / 2 / 3)."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_VALIDATION
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_VALIDATION
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(run_cli())
