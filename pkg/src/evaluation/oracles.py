from typing import Optional

import numpy as np

from core.configs import SounderConfig
from channel.acquisition import branch_comb
from channel.ch_models import TapProfile
from channel.taps import transfer_function, check_spread, oracle_from_lines
from estimation.e_models import CalibrationRecord, EstimationMethod


__all__ = ["expected_lines", "expected_ir"]


def expected_lines(
        config: SounderConfig,
        n: int,
        profile: TapProfile,
        method: EstimationMethod = EstimationMethod.INVERSION,
        cal: Optional[CalibrationRecord] = None,
) -> np.ndarray:
    """
    Noiseless line estimate of channel n: the channel's H on its own comb, seen
    through the receiver timing offset, the equipment filter (or what calibration
    leaves of it) and, for correlation, the |S_n|^2 weighting.
    """
    comb = branch_comb(config, n)
    check_spread(profile, config.period_s)
    freqs = comb.frequencies_hz

    h = transfer_function(profile, freqs)
    if config.timing_offset_s:
        h = h * np.exp(-2j * np.pi * freqs * config.timing_offset_s)

    equipment = config.equipment_profile()
    if equipment is not None:
        h = h * transfer_function(equipment, freqs)
    if cal is not None:
        reference = cal.for_channel(n)
        h = h / (reference / np.abs(reference).mean())

    if method is EstimationMethod.CORRELATION:
        h = h * np.abs(comb.lines) ** 2
    return h


def expected_ir(
        config: SounderConfig,
        n: int,
        profile: TapProfile,
        method: EstimationMethod = EstimationMethod.INVERSION,
        cal: Optional[CalibrationRecord] = None,
) -> np.ndarray:
    """Reference for a ramp-corrected estimate of channel n on t_i = iT/(2N)."""
    comb = branch_comb(config, n)
    lines = expected_lines(config, n, profile, method, cal)
    return oracle_from_lines(lines, comb.frequencies_hz, config.line_grid_rate)
