import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.configs import SounderConfig, ProfileConfig, TapConfig
from core.errors import ScenarioError, ConfigError, SounderError
from core.logger import info, debug, error
from channel.acquisition import simulate_acquisition
from channel.ch_models import TapProfile
from estimation.e_models import CalibrationRecord, EstimationMethod, ImpulseResponseEstimate
from estimation.pipeline import estimate_all
from evaluation.metrics import MetricsReport, compute_metrics
from evaluation.oracles import expected_ir
from evaluation.save_results import (
    RunReport, point_directory, dump_ir, dump_point_metrics, dump_report, dump_config, dump_timing,
)
from telemetry.aggregations.point_stats import TimingStats, aggr_point_timings
from telemetry.models import PointTiming, PointStatus, TeleRunPoint, TeleItemStatus
from telemetry.tele_writer import TeleWriter


__all__ = ["ScenarioPoint", "Scenario", "PointOutcome", "ScenarioResult", "load_scenario", "run_scenario"]


class ScenarioPoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # one per transmitter, in channel order
    profiles: List[ProfileConfig]
    seed: Optional[int] = None


class Scenario(BaseModel):
    """
    Measurement points along a route, replayed `repeat` times. Expanded point i
    uses seed + i; a point naming its own seed s uses s + repetition.
    """
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    repeat: int = Field(default=1, ge=1)
    points: List[ScenarioPoint] = Field(min_length=1)

    @classmethod
    def identity(cls, p: int, seed: int = 0) -> "Scenario":
        return cls(seed=seed, points=[ScenarioPoint(profiles=[
            ProfileConfig(taps=[TapConfig(delay_s=0.0)]) for _ in range(p)
        ])])

    def expanded(self) -> Tuple[List[List[TapProfile]], List[int]]:
        profiles, seeds = [], []
        for index in range(len(self.points) * self.repeat):
            point = self.points[index % len(self.points)]
            profiles.append([pc.to_profile(n) for n, pc in enumerate(point.profiles, start=1)])
            if point.seed is None:
                seeds.append(self.seed + index)
            else:
                seeds.append(point.seed + index // len(self.points))
        return profiles, seeds

    @classmethod
    def read_from_disk(cls, path: Path) -> "Scenario":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"{path=} does not exist")
        try:
            return cls.model_validate(yaml.safe_load(path.read_text()) or {})
        except ValidationError as e:
            raise ConfigError(f"invalid scenario {path}: {e.errors()[0]['msg']} at {e.errors()[0]['loc']}") from e


def load_scenario(path: Path) -> Scenario:
    return Scenario.read_from_disk(path)


@dataclass
class PointOutcome:
    index: int
    seed: int
    estimates: List[ImpulseResponseEstimate]
    metrics: MetricsReport
    timing: PointTiming


class PointFailed(ScenarioError):
    """Raised from a single point; its timing covers that point only."""

    def __init__(self, timing: PointTiming):
        super().__init__(f"point {timing.point_index}: {timing.error_message}", timing.point_index)
        self.timing = timing


@dataclass
class ScenarioResult:
    points: List[PointOutcome]
    report: RunReport
    timing: TimingStats
    out_dir: Optional[Path] = None


def _process_point(
        index: int,
        config: SounderConfig,
        profiles: Sequence[TapProfile],
        seed: int,
        method: EstimationMethod,
        cal: Optional[CalibrationRecord],
        out_dir: Optional[Path],
) -> PointOutcome:
    ts_created = time.time()
    started = time.perf_counter()

    try:
        record = simulate_acquisition(config, profiles, seed)
        estimates = estimate_all(record, cal, config, method)
        oracles = [expected_ir(config, n, profile, method, cal) for n, profile in enumerate(profiles, start=1)]
        metrics = compute_metrics(estimates, oracles, config.pdp_threshold_db, point_index=index, seed=seed)

        if out_dir is not None:
            point_dir = point_directory(out_dir, index)
            for est in estimates:
                dump_ir(point_dir, est, config.fingerprint)
            dump_point_metrics(point_dir, metrics)
    except Exception as e:
        message = str(e) if isinstance(e, SounderError) else f"{type(e).__name__}: {e}"
        raise PointFailed(PointTiming(
            event="point_failed",
            status=PointStatus.FAILED,
            ts_created=ts_created,
            duration_seconds=time.perf_counter() - started,
            point_index=index,
            error_message=message,
        )) from e

    timing = PointTiming(
        event="point_done",
        status=PointStatus.OK,
        ts_created=ts_created,
        duration_seconds=time.perf_counter() - started,
        point_index=index,
    )
    return PointOutcome(index, seed, estimates, metrics, timing)


def _build_report(config: SounderConfig, method: EstimationMethod, outcomes: List[PointOutcome]) -> RunReport:
    metrics = [o.metrics for o in outcomes]
    crosstalks = [m.crosstalk_db for m in metrics if m.crosstalk_db is not None]
    finite_nmse = [c.nmse_db for m in metrics for c in m.channels if np.isfinite(c.nmse_db)]
    return RunReport(
        fingerprint=config.fingerprint,
        method=method.value,
        n_points=len(outcomes),
        n_channels=config.p,
        worst_nmse_db=max(finite_nmse) if finite_nmse else None,
        worst_crosstalk_db=max(crosstalks) if crosstalks else None,
        points=metrics,
    )


def run_scenario(
        config: SounderConfig,
        profiles: Sequence[Sequence[TapProfile]],
        seeds: Sequence[int],
        method: EstimationMethod = EstimationMethod.INVERSION,
        out_dir: Optional[Path] = None,
        cal: Optional[CalibrationRecord] = None,
        tele_writer: Optional[TeleWriter] = None,
) -> ScenarioResult:
    """
    simulate -> estimate -> metrics for every point. Points may run on config.workers
    threads; the report is ordered by point index. The first failing point aborts the
    batch with a ScenarioError carrying its index.
    """
    if len(profiles) != len(seeds):
        raise ScenarioError(f"{len(profiles)} profile lists but {len(seeds)} seeds")
    for index, point_profiles in enumerate(profiles):
        if len(point_profiles) != config.p:
            raise ScenarioError(f"point {index}: expected {config.p} profiles, got {len(point_profiles)}", index)

    def emit(timing: PointTiming, n_channels: Optional[int] = None):
        if tele_writer is None:
            return
        TeleRunPoint(
            event=timing.event,
            status=TeleItemStatus.SUCCESS if timing.status is PointStatus.OK else TeleItemStatus.FAILURE,
            error_message=timing.error_message,
            run_dir=str(out_dir) if out_dir is not None else None,
            point_index=timing.point_index,
            n_channels=n_channels,
            method=method.value,
            fingerprint=config.fingerprint,
            duration_seconds=timing.duration_seconds,
        ).write(tele_writer)

    def fail(failed: PointFailed) -> ScenarioError:
        emit(failed.timing)
        error(f"point {failed.point_index} failed: {failed.timing.error_message}")
        return ScenarioError(str(failed), failed.point_index)

    outcomes: List[PointOutcome] = []

    if config.workers == 1 or len(profiles) == 1:
        for index, (point_profiles, seed) in enumerate(zip(profiles, seeds)):
            try:
                outcome = _process_point(index, config, point_profiles, seed, method, cal, out_dir)
            except PointFailed as e:
                raise fail(e) from e.__cause__
            emit(outcome.timing, config.p)
            outcomes.append(outcome)
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            futures = {
                executor.submit(_process_point, index, config, point_profiles, seed, method, cal, out_dir): index
                for index, (point_profiles, seed) in enumerate(zip(profiles, seeds))
            }
            for future in as_completed(futures):
                index = futures[future]
                try:
                    outcome = future.result()
                except PointFailed as e:
                    executor.shutdown(wait=True, cancel_futures=True)
                    raise fail(e) from e.__cause__
                debug(f"point {index} done in {outcome.timing.duration_seconds:.3f}s")
                emit(outcome.timing, config.p)
                outcomes.append(outcome)
        outcomes.sort(key=lambda o: o.index)

    report = _build_report(config, method, outcomes)
    timing = aggr_point_timings([o.timing for o in outcomes])
    if out_dir is not None:
        dump_config(out_dir, config)
        dump_report(out_dir, report)
        dump_timing(out_dir, timing)

    info(f"scenario done: {len(outcomes)} points x {config.p} channels, worst NMSE {report.worst_nmse_db} dB")
    return ScenarioResult(outcomes, report, timing, out_dir)
