import dataclasses

import numpy as np

from core.configs import SounderConfig
from core.errors import EstimationError
from estimation.e_models import ImpulseResponseEstimate, EstimationMethod
from waveform.dft import idft_lines


__all__ = ["phase_ramp", "to_time", "correct_ramp"]


def phase_ramp(n: int, p: int, n_lines: int) -> np.ndarray:
    """e^{-j2pi (n-1) t_i / (pT)} at t_i = iT/(2N)."""
    i = np.arange(n_lines)
    return np.exp(-2j * np.pi * (n - 1) * i / (p * n_lines))


def to_time(
        h_lines: np.ndarray,
        n: int,
        config: SounderConfig,
        method: EstimationMethod = EstimationMethod.INVERSION,
) -> ImpulseResponseEstimate:
    """
    Inverse DFT of the 2N ascending-k lines evaluated at t_i = iT/(2N).
    Channel n >= 2 comes out multiplied by the phase ramp of its comb offset.
    """
    h_lines = np.asarray(h_lines, dtype=np.complex128)
    if h_lines.size != config.n_lines:
        raise EstimationError(f"expected {config.n_lines} lines, got {h_lines.size}")
    return ImpulseResponseEstimate(
        samples=idft_lines(h_lines),
        channel_index=n,
        period_s=config.period_s,
        comb_modulus=config.p,
        method=method,
        ramp_corrected=False,
    )


def correct_ramp(est: ImpulseResponseEstimate, config: SounderConfig) -> ImpulseResponseEstimate:
    if est.ramp_corrected:
        raise EstimationError(f"channel {est.channel_index} estimate is already ramp-corrected")
    if est.comb_modulus != config.p or len(est) != config.n_lines:
        raise EstimationError("estimate does not belong to this sounder configuration")
    ramp = phase_ramp(est.channel_index, config.p, len(est))
    return dataclasses.replace(est, samples=est.samples * np.conj(ramp), ramp_corrected=True)
