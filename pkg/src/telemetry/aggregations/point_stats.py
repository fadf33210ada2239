from typing import List, Dict, Any
from dataclasses import dataclass
from collections import Counter

import numpy as np

from numba import jit

from telemetry.models import PointTiming


__all__ = ["TimingStats", "aggr_point_timings"]


@dataclass
class PercentileStats:
    p50: float
    p90: float
    p99: float

    @classmethod
    def default(cls) -> "PercentileStats":
        return cls(p50=0, p90=0, p99=0)

    def to_dict(self) -> Dict[str, float]:
        return {"p50": self.p50, "p90": self.p90, "p99": self.p99}


@dataclass
class MovingAverageData:
    window_size: int
    values: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {"window_size": self.window_size, "values": self.values}


@dataclass
class TimingStats:
    avg: float
    min: float
    max: float
    total: float
    count: int
    std_dev: float
    percentiles: PercentileStats
    status_counts: Dict[str, int]
    error_counts: Dict[str, int]
    # points per second of wall time
    throughput: float
    moving_averages: List[MovingAverageData]

    @classmethod
    def default(cls) -> "TimingStats":
        return cls(
            avg=0,
            min=0,
            max=0,
            total=0,
            count=0,
            std_dev=0,
            percentiles=PercentileStats.default(),
            status_counts={},
            error_counts={},
            throughput=0,
            moving_averages=[],
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "avg": self.avg,
            "min": self.min,
            "max": self.max,
            "total": self.total,
            "count": self.count,
            "std_dev": self.std_dev,
            "percentiles": self.percentiles.to_dict(),
            "status_counts": self.status_counts,
            "error_counts": self.error_counts,
            "throughput": self.throughput,
            "moving_averages": [ma.to_dict() for ma in self.moving_averages],
        }


@jit(nopython=True)
def moving_average_numba(durations, window_size):
    assert window_size != 0, "Window size cannot be zero"

    n = len(durations)
    result = np.zeros(n - window_size + 1)
    window_sum = 0.0
    for j in range(window_size):
        window_sum += durations[j]
    result[0] = window_sum / window_size
    for i in range(1, n - window_size + 1):
        window_sum += durations[i + window_size - 1] - durations[i - 1]
        result[i] = window_sum / window_size
    return result


def aggr_point_timings(timings: List[PointTiming], window_size: int = 20) -> TimingStats:
    """
    Wall-time statistics of a batch, in point-index order for the moving average.
    Returns zeros for an empty batch.
    """
    if not timings:
        return TimingStats.default()

    durations = np.array([t.duration_seconds for t in timings], dtype=np.float64)
    status_counts = Counter([t.status.value for t in timings])
    error_counts = Counter([t.error_message for t in timings if t.error_message])

    ordered = sorted(timings, key=lambda t: (t.point_index is None, t.point_index, t.ts_created))
    moving_averages = []
    if len(ordered) >= window_size:
        values = moving_average_numba(
            np.array([t.duration_seconds for t in ordered], dtype=np.float64), window_size
        )
        moving_averages.append(MovingAverageData(window_size=window_size, values=values.tolist()))

    throughput = 0.0
    start_time = min(t.ts_created for t in timings)
    end_time = max(t.ts_created + t.duration_seconds for t in timings)
    if end_time > start_time:
        throughput = len(timings) / (end_time - start_time)

    return TimingStats(
        avg=float(np.mean(durations)),
        min=float(np.min(durations)),
        max=float(np.max(durations)),
        total=float(np.sum(durations)),
        count=len(durations),
        std_dev=float(np.std(durations)),
        percentiles=PercentileStats(
            p50=float(np.percentile(durations, 50)),
            p90=float(np.percentile(durations, 90)),
            p99=float(np.percentile(durations, 99)),
        ),
        status_counts=dict(status_counts),
        error_counts=dict(error_counts),
        throughput=throughput,
        moving_averages=moving_averages,
    )
