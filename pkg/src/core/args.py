import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, List

from core.configs import PRESETS


COMMANDS = ["synth", "simulate", "estimate", "run", "validate", "calibrate"]


@dataclass
class CMDArgs:
    command: str
    config_path: Optional[Path]
    preset: Optional[str]
    seed: Optional[int]
    method: str
    out_dir: Optional[Path]
    debug: bool
    snr_db: Optional[float]
    scenario: Optional[Path]
    input_path: Optional[Path]
    calibration: Optional[Path]
    workers: Optional[int]


def _existing_file(value: str) -> Path:
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"{value} does not exist")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macrosounder",
        description="Simulate a frequency-interleaved multi-transmitter channel sounder and estimate its impulse responses",
    )
    parser.add_argument('command', choices=COMMANDS,
                        help='synth: emitted waveforms; simulate: acquisition file; estimate: IR files from an '
                             'acquisition; run: end-to-end scenario; validate: built-in checks; '
                             'calibrate: back-to-back calibration file')
    parser.add_argument('--config', '-c', type=_existing_file, default=None,
                        help='YAML sounder configuration')
    parser.add_argument('--preset', '-p', type=str, default=None, choices=sorted(PRESETS),
                        help='Named parameter set, used when --config is absent (default: mulhouse)')
    parser.add_argument('--seed', '-s', type=int, default=None,
                        help='Noise seed (simulate, calibrate, validate) or base seed (run)')
    parser.add_argument('--method', '-m', type=str, default="inversion", choices=["inversion", "correlation"],
                        help='Estimation method')
    parser.add_argument('--out-dir', '-o', type=Path, default=None,
                        help='Output directory, defaults to the next free runs/NNNN')
    parser.add_argument('--debug', action='store_true',
                        help='Debug logging')
    parser.add_argument('--snr-db', type=float, default=None,
                        help='Override the configured receiver SNR')
    parser.add_argument('--scenario', type=_existing_file, default=None,
                        help='YAML scenario: tap profiles per measurement point')
    parser.add_argument('--input', '-i', dest='input_path', type=_existing_file, default=None,
                        help='Acquisition .iq file (estimate)')
    parser.add_argument('--calibration', type=_existing_file, default=None,
                        help='Calibration .iq file written by calibrate (estimate, run)')
    parser.add_argument('--workers', '-w', type=int, default=None,
                        help='Parallel points for run')
    return parser


def parse_arguments(argv: Optional[List[str]] = None) -> CMDArgs:
    """Parse command line arguments."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "estimate" and args.input_path is None:
        parser.error("estimate needs --input <acquisition.iq>")
    if args.config is not None and args.preset is not None:
        parser.error("--config and --preset are exclusive; put `preset:` in the config file instead")
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")

    return CMDArgs(
        command=args.command,
        config_path=args.config,
        preset=args.preset,
        seed=args.seed,
        method=args.method,
        out_dir=args.out_dir,
        debug=args.debug,
        snr_db=args.snr_db,
        scenario=args.scenario,
        input_path=args.input_path,
        calibration=args.calibration,
        workers=args.workers,
    )
