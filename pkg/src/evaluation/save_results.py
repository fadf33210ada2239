from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
import ujson as json
from pydantic import BaseModel, ConfigDict

from core.configs import SounderConfig
from core.errors import SignalError, EstimationError
from core.globals import RUNS_DIR
from core.utils import write_text_atomic
from channel.ch_models import AcquisitionRecord
from estimation.e_models import ImpulseResponseEstimate, CalibrationRecord, EstimationMethod
from evaluation.metrics import MetricsReport
from telemetry.aggregations.point_stats import TimingStats
from waveform.iq_files import IQMetadata, write_iq, read_iq


def get_next_run_directory(runs_dir: Optional[Path] = None) -> Path:
    """
    Create the next run directory: "0001", "0002", ... under runs_dir.
    """
    runs_dir = runs_dir or RUNS_DIR
    runs_dir.mkdir(exist_ok=True, parents=True)
    existing_dirs = [
        i for i in sorted(runs_dir.iterdir())
        if i.is_dir() and len(i.name) == 4 and i.name.isdigit()
    ]

    tries_cnt = 1
    if existing_dirs:
        tries_cnt = int(existing_dirs[-1].name) + 1

    run_dir = runs_dir / f"{tries_cnt:04d}"
    run_dir.mkdir(exist_ok=True, parents=True)
    return run_dir


def point_directory(run_dir: Path, point_index: int) -> Path:
    return run_dir / "points" / f"{point_index:04d}"


def dump_config(out_dir: Path, config: SounderConfig) -> Path:
    path = out_dir / "config.yaml"
    out_dir.mkdir(parents=True, exist_ok=True)
    config.save_to_disk(path)
    return path


def dump_acquisition(path: Path, record: AcquisitionRecord) -> Path:
    return write_iq(path, record.samples, IQMetadata(
        role="acquisition",
        n_samples=len(record),
        sample_rate_hz=record.sample_rate_hz,
        span_s=record.span_s,
        comb_modulus=record.comb_modulus,
        fingerprint=record.fingerprint,
        noise_seed=record.noise_seed,
        snr_db=record.snr_db,
    ))


def read_acquisition(path: Path) -> AcquisitionRecord:
    samples, metadata = read_iq(path)
    if metadata.role != "acquisition" or metadata.comb_modulus is None:
        raise SignalError(f"{path}: not an acquisition file (role={metadata.role})")
    return AcquisitionRecord(
        samples=samples,
        sample_rate_hz=metadata.sample_rate_hz,
        span_s=metadata.span_s,
        comb_modulus=metadata.comb_modulus,
        fingerprint=metadata.fingerprint,
        noise_seed=metadata.noise_seed,
        snr_db=metadata.snr_db,
    )


def ir_frame(est: ImpulseResponseEstimate) -> pd.DataFrame:
    magnitude = np.abs(est.samples)
    with np.errstate(divide="ignore"):
        magnitude_db = 20 * np.log10(magnitude)
    return pd.DataFrame({
        "sample_index": np.arange(len(est)),
        "time_s": est.times_s,
        "real": est.samples.real,
        "imag": est.samples.imag,
        "magnitude_db": magnitude_db,
    })


def dump_ir(out_dir: Path, est: ImpulseResponseEstimate, fingerprint: Optional[str] = None) -> Tuple[Path, Path]:
    """ir_ch<n>.csv for plotting, ir_ch<n>.iq for a bit-exact copy."""
    stem = out_dir / f"ir_ch{est.channel_index}"
    csv_path = stem.with_suffix(".csv")
    write_text_atomic(csv_path, ir_frame(est).to_csv(index=False, float_format="%.17g"))
    iq_path = write_iq(stem.with_suffix(".iq"), est.samples, IQMetadata(
        role="impulse_response",
        n_samples=len(est),
        sample_rate_hz=est.grid_rate,
        span_s=est.period_s,
        comb_modulus=est.comb_modulus,
        channel_index=est.channel_index,
        fingerprint=fingerprint,
        attributes={"method": est.method.value, "ramp_corrected": est.ramp_corrected},
    ))
    return csv_path, iq_path


def read_ir(path: Path) -> ImpulseResponseEstimate:
    samples, metadata = read_iq(path)
    if metadata.role != "impulse_response":
        raise SignalError(f"{path}: not an impulse response file (role={metadata.role})")
    return ImpulseResponseEstimate(
        samples=samples,
        channel_index=metadata.channel_index,
        period_s=metadata.span_s,
        comb_modulus=metadata.comb_modulus,
        method=EstimationMethod(metadata.attributes.get("method", "inversion")),
        ramp_corrected=bool(metadata.attributes.get("ramp_corrected", True)),
    )


def dump_point_metrics(out_dir: Path, metrics: MetricsReport) -> Path:
    path = out_dir / "metrics.json"
    write_text_atomic(path, metrics.model_dump_json(indent=2))
    return path


class RunReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    fingerprint: str
    method: str
    n_points: int
    n_channels: int
    worst_nmse_db: Optional[float] = None
    worst_crosstalk_db: Optional[float] = None
    points: List[MetricsReport]


def dump_report(out_dir: Path, report: RunReport) -> Path:
    path = out_dir / "report.json"
    # per-sample PDPs stay in the per-point metrics.json
    exclude = {"points": {"__all__": {"channels": {"__all__": {"pdp"}}}}}
    write_text_atomic(path, report.model_dump_json(indent=2, exclude=exclude))
    return path


def dump_timing(out_dir: Path, stats: TimingStats) -> Path:
    path = out_dir / "timing.json"
    write_text_atomic(path, json.dumps(stats.to_dict(), indent=2))
    return path


def dump_calibration(path: Path, cal: CalibrationRecord, config: SounderConfig) -> Path:
    """Channel combs stacked in channel order, 2N lines each."""
    channels = sorted(cal.lines)
    stacked = np.concatenate([cal.for_channel(n) for n in channels])
    return write_iq(path, stacked, IQMetadata(
        role="calibration",
        n_samples=stacked.size,
        comb_modulus=config.p,
        fingerprint=config.fingerprint,
        attributes={"channels": channels, "n_lines": config.n_lines},
    ))


def read_calibration(path: Path, config: Optional[SounderConfig] = None) -> CalibrationRecord:
    samples, metadata = read_iq(path)
    if metadata.role != "calibration":
        raise SignalError(f"{path}: not a calibration file (role={metadata.role})")
    channels = [int(n) for n in metadata.attributes["channels"]]
    n_lines = int(metadata.attributes["n_lines"])
    if config is not None and (n_lines != config.n_lines or set(channels) != set(range(1, config.p + 1))):
        raise EstimationError(
            f"{path}: calibration has channels {channels} x {n_lines} lines, "
            f"config needs p={config.p} x {config.n_lines}"
        )
    return CalibrationRecord({n: samples[i * n_lines:(i + 1) * n_lines] for i, n in enumerate(channels)})
