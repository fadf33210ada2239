from typing import List, Optional

import numpy as np

from core.configs import SounderConfig
from core.errors import EstimationError
from channel.acquisition import branch_comb
from channel.ch_models import AcquisitionRecord
from estimation.analysis import analyze, extract_lines
from estimation.correlation import correlation_lines
from estimation.e_models import CalibrationRecord, ImpulseResponseEstimate, EstimationMethod
from estimation.inversion import wiener_invert, apply_calibration
from estimation.timedomain import to_time, correct_ramp


__all__ = ["inversion_lines", "channel_lines", "estimate_all"]


def _check_record(record: AcquisitionRecord, config: SounderConfig) -> None:
    if record.fingerprint is not None and record.fingerprint != config.estimator_fingerprint:
        raise EstimationError(
            f"record fingerprint {record.fingerprint} does not match config fingerprint {config.estimator_fingerprint}"
        )
    if record.comb_modulus != config.p:
        raise EstimationError(f"record interleaves p={record.comb_modulus} combs, config has p={config.p}")


def inversion_lines(record: AcquisitionRecord, n: int, config: SounderConfig) -> np.ndarray:
    s_lines = branch_comb(config, n).lines
    r_lines = extract_lines(analyze(record, config), n, config)
    return wiener_invert(r_lines, s_lines, config.line_floor(s_lines), config.ridge)


def channel_lines(
        record: AcquisitionRecord,
        n: int,
        config: SounderConfig,
        method: EstimationMethod = EstimationMethod.INVERSION,
        cal: Optional[CalibrationRecord] = None,
) -> np.ndarray:
    if method is EstimationMethod.INVERSION:
        lines = inversion_lines(record, n, config)
    else:
        lines = correlation_lines(record, n, config)
    if cal is not None:
        lines = apply_calibration(lines, cal, n, config.line_floor_rel)
    return lines


def estimate_all(
        record: AcquisitionRecord,
        cal: Optional[CalibrationRecord],
        config: SounderConfig,
        method: EstimationMethod = EstimationMethod.INVERSION,
) -> List[ImpulseResponseEstimate]:
    """All p ramp-corrected responses from one acquisition."""
    _check_record(record, config)
    estimates = []
    for n in range(1, config.p + 1):
        lines = channel_lines(record, n, config, method, cal)
        estimates.append(correct_ramp(to_time(lines, n, config, method), config))
    return estimates
