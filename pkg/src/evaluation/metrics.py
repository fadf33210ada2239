from typing import List, Optional, Sequence, Tuple

import numpy as np
from numba import jit
from pydantic import BaseModel, ConfigDict

from core.errors import EstimationError
from estimation.e_models import ImpulseResponseEstimate


__all__ = [
    "NMSE_FLOOR_DB", "DYNAMIC_RANGE_CAP_DB",
    "ChannelMetrics", "MetricsReport",
    "nmse_db", "crosstalk_db", "power_delay_profile", "dynamic_range_db", "delay_spread",
    "compute_metrics",
]


# reported instead of -inf for an exact match
NMSE_FLOOR_DB = -300.0
DYNAMIC_RANGE_CAP_DB = 300.0


class ChannelMetrics(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    channel_index: int
    nmse_db: float
    peak: float
    peak_delay_s: float
    dynamic_range_db: float
    mean_delay_s: float
    rms_delay_spread_s: float
    total_energy: float
    pdp: List[float]


class MetricsReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    point_index: Optional[int] = None
    seed: Optional[int] = None
    method: str = "inversion"
    channels: List[ChannelMetrics]
    # silent-channel peak over the strongest active peak; None unless both kinds exist
    crosstalk_db: Optional[float] = None

    @property
    def worst_nmse_db(self) -> float:
        return max(c.nmse_db for c in self.channels)


def _db10(ratio: float) -> float:
    if ratio <= 0:
        return NMSE_FLOOR_DB
    return max(10.0 * np.log10(ratio), NMSE_FLOOR_DB)


def nmse_db(estimate: np.ndarray, oracle: np.ndarray) -> float:
    """||est - oracle||^2 / ||oracle||^2 in dB; +inf when only the oracle is zero."""
    estimate = np.asarray(estimate)
    oracle = np.asarray(oracle)
    if estimate.shape != oracle.shape:
        raise EstimationError(f"estimate {estimate.shape} and oracle {oracle.shape} differ in length")
    err = float(np.sum(np.abs(estimate - oracle) ** 2))
    ref = float(np.sum(np.abs(oracle) ** 2))
    if ref == 0:
        return NMSE_FLOOR_DB if err == 0 else float("inf")
    return _db10(err / ref)


def crosstalk_db(silent_estimate: np.ndarray, active_estimate: np.ndarray) -> float:
    active_peak = float(np.max(np.abs(active_estimate)))
    if active_peak == 0:
        raise EstimationError("active channel estimate is identically zero")
    return _db10((float(np.max(np.abs(silent_estimate))) / active_peak) ** 2)


def power_delay_profile(estimate: np.ndarray) -> np.ndarray:
    return np.abs(np.asarray(estimate)) ** 2


def dynamic_range_db(pdp: np.ndarray, threshold_db: float) -> float:
    """Peak PDP over the median of the samples below threshold_db from the peak."""
    peak = float(pdp.max())
    if peak == 0:
        return 0.0
    noise = pdp[pdp < peak * 10 ** (threshold_db / 10)]
    floor = float(np.median(noise)) if noise.size else 0.0
    if floor == 0:
        return DYNAMIC_RANGE_CAP_DB
    return min(10.0 * np.log10(peak / floor), DYNAMIC_RANGE_CAP_DB)


@jit(nopython=True)
def _pdp_moments(pdp, times, floor):
    total = 0.0
    first = 0.0
    second = 0.0
    for i in range(pdp.size):
        if pdp[i] >= floor:
            total += pdp[i]
            first += pdp[i] * times[i]
            second += pdp[i] * times[i] * times[i]
    return total, first, second


def delay_spread(pdp: np.ndarray, times_s: np.ndarray, threshold_db: float) -> Tuple[float, float]:
    """Mean excess delay and RMS delay spread of the PDP samples within threshold_db of the peak."""
    peak = float(pdp.max())
    if peak == 0:
        return 0.0, 0.0
    total, first, second = _pdp_moments(
        np.ascontiguousarray(pdp, dtype=np.float64),
        np.ascontiguousarray(times_s, dtype=np.float64),
        peak * 10 ** (threshold_db / 10),
    )
    mean = first / total
    return float(mean), float(np.sqrt(max(second / total - mean * mean, 0.0)))


def compute_metrics(
        estimates: Sequence[ImpulseResponseEstimate],
        oracles: Sequence[np.ndarray],
        pdp_threshold_db: float = -30.0,
        point_index: Optional[int] = None,
        seed: Optional[int] = None,
) -> MetricsReport:
    if len(estimates) != len(oracles):
        raise EstimationError(f"{len(estimates)} estimates but {len(oracles)} oracles")

    channels = []
    for est, oracle in zip(estimates, oracles):
        pdp = power_delay_profile(est.samples)
        times = est.times_s
        mean_delay, rms_spread = delay_spread(pdp, times, pdp_threshold_db)
        peak_at = int(np.argmax(pdp))
        channels.append(ChannelMetrics(
            channel_index=est.channel_index,
            nmse_db=nmse_db(est.samples, oracle),
            peak=float(np.sqrt(pdp[peak_at])),
            peak_delay_s=float(times[peak_at]),
            dynamic_range_db=dynamic_range_db(pdp, pdp_threshold_db),
            mean_delay_s=mean_delay,
            rms_delay_spread_s=rms_spread,
            total_energy=float(pdp.sum()),
            pdp=pdp.tolist(),
        ))

    silent = [est for est, o in zip(estimates, oracles) if not np.any(o)]
    active = [est for est, o in zip(estimates, oracles) if np.any(o)]
    crosstalk = None
    if silent and active:
        strongest = max(active, key=lambda e: float(np.max(np.abs(e.samples))))
        crosstalk = max(crosstalk_db(s.samples, strongest.samples) for s in silent)

    return MetricsReport(
        point_index=point_index,
        seed=seed,
        method=estimates[0].method.value if estimates else "inversion",
        channels=channels,
        crosstalk_db=crosstalk,
    )
