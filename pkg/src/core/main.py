import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional, List, Dict, Callable

import ujson as json

from core.args import CMDArgs, parse_arguments
from core.configs import SounderConfig, load_config, preset_config
from core.errors import SounderError
from core.logger import init_logger, run_log, info, exception
from core.utils import write_text_atomic
from channel.acquisition import emitted_signal, simulate_acquisition
from estimation.e_models import EstimationMethod
from estimation.inversion import measure_calibration
from estimation.pipeline import estimate_all
from evaluation.save_results import (
    get_next_run_directory, point_directory, dump_config, dump_acquisition, read_acquisition, dump_ir,
    dump_calibration, read_calibration,
)
from evaluation.scenario import Scenario, load_scenario, run_scenario
from evaluation.tui import print_config_summary, print_run_summary, print_checks
from evaluation.validate import run_builtin_checks
from telemetry.models import TelemetryScope
from telemetry.tele_writer import TeleWriter
from waveform.iq_files import write_signal


def resolve_config(args: CMDArgs) -> SounderConfig:
    if args.config_path is not None:
        config = load_config(args.config_path)
        info(f"config loaded from {args.config_path}")
    else:
        config = preset_config(args.preset or "mulhouse")
    changes = {}
    if args.snr_db is not None:
        changes["snr_db"] = args.snr_db
    if args.workers is not None:
        changes["workers"] = args.workers
    return config.updated(**changes) if changes else config


def _scenario(args: CMDArgs, config: SounderConfig) -> Scenario:
    scenario = load_scenario(args.scenario) if args.scenario else Scenario.identity(config.p)
    if args.seed is not None:
        scenario = scenario.model_copy(update={"seed": args.seed})
    return scenario


def cmd_synth(args: CMDArgs, config: SounderConfig, out_dir: Path) -> None:
    for n in range(1, config.p + 1):
        write_signal(
            out_dir / f"emitted_ch{n}.iq", emitted_signal(config, n), role="emitted",
            comb_modulus=config.p, channel_index=n, fingerprint=config.fingerprint,
        )
    dump_config(out_dir, config)


def cmd_simulate(args: CMDArgs, config: SounderConfig, out_dir: Path) -> None:
    profiles, seeds = _scenario(args, config).expanded()
    for index, (point_profiles, seed) in enumerate(zip(profiles, seeds)):
        record = simulate_acquisition(config, point_profiles, seed)
        dump_acquisition(point_directory(out_dir, index) / "acquisition.iq", record)
    info(f"simulate: {len(profiles)} acquisitions written")
    dump_config(out_dir, config)


def cmd_estimate(args: CMDArgs, config: SounderConfig, out_dir: Path) -> None:
    record = read_acquisition(args.input_path)
    cal = read_calibration(args.calibration, config) if args.calibration else None
    for est in estimate_all(record, cal, config, EstimationMethod(args.method)):
        dump_ir(out_dir, est, config.fingerprint)
    dump_config(out_dir, config)


def cmd_run(args: CMDArgs, config: SounderConfig, out_dir: Path) -> None:
    profiles, seeds = _scenario(args, config).expanded()
    cal = read_calibration(args.calibration, config) if args.calibration else None
    writer = TeleWriter(TelemetryScope.RUN)
    result = run_scenario(config, profiles, seeds, EstimationMethod(args.method), out_dir, cal, tele_writer=writer)
    info(f"telemetry: {writer.n_written} lines appended to {writer.current_file_path()}")
    print_run_summary(result.report)


def cmd_validate(args: CMDArgs, config: SounderConfig, out_dir: Path) -> None:
    results = run_builtin_checks(config, seed=args.seed or 0)
    print_checks(results)
    write_text_atomic(out_dir / "checks.json", json.dumps([asdict(r) for r in results], indent=2))
    dump_config(out_dir, config)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise SounderError(f"validation failed: {', '.join(failed)}")


def cmd_calibrate(args: CMDArgs, config: SounderConfig, out_dir: Path) -> None:
    cal = measure_calibration(config, seed=args.seed or 0)
    dump_calibration(out_dir / "calibration.iq", cal, config)
    dump_config(out_dir, config)


COMMANDS: Dict[str, Callable[[CMDArgs, SounderConfig, Path], None]] = {
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "run": cmd_run,
    "validate": cmd_validate,
    "calibrate": cmd_calibrate,
}


def write_error_record(e: Exception, out_dir: Optional[Path]) -> None:
    record = json.dumps({
        "status": "error",
        "error_type": type(e).__name__,
        "message": str(e),
        "point_index": getattr(e, "point_index", None),
    })
    sys.stderr.write(record + "\n")
    if out_dir is not None:
        write_text_atomic(out_dir / "error.json", record)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_arguments(argv)

    init_logger(args.debug)
    info("Logger initialized")

    out_dir = args.out_dir
    try:
        config = resolve_config(args)
        print_config_summary(config)
        if out_dir is None:
            out_dir = get_next_run_directory()
        out_dir.mkdir(parents=True, exist_ok=True)

        with run_log(out_dir):
            COMMANDS[args.command](args, config, out_dir)
            info(f"{args.command}: results in {out_dir}")

    except Exception as e:
        exception(f"{args.command} failed: {e}")
        write_error_record(e, out_dir)
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
