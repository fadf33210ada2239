import math
from typing import Optional, Union

import numpy as np

from core.errors import ChannelError
from waveform.w_models import BasebandSignal


__all__ = ["add_awgn", "noise_variance"]


def noise_variance(signal_power: float, snr_db: float) -> float:
    return signal_power / 10 ** (snr_db / 10)


def add_awgn(
        signal: BasebandSignal,
        snr_db: Optional[float],
        seed: Union[int, np.random.Generator, None],
) -> BasebandSignal:
    """
    Circularly-symmetric complex Gaussian noise, per-sample variance = mean power / 10^(snr_db/10).
    snr_db None or +inf leaves the signal untouched.
    """
    if snr_db is None or (math.isinf(snr_db) and snr_db > 0):
        return signal
    if math.isnan(snr_db) or math.isinf(snr_db):
        raise ChannelError(f"snr_db must be finite, None or +inf, got {snr_db}")
    power = signal.mean_power
    if power == 0:
        raise ChannelError("cannot set a finite SNR on a zero-power signal")
    rng = np.random.default_rng(seed)
    sigma = math.sqrt(noise_variance(power, snr_db) / 2)
    noise = sigma * (rng.standard_normal(len(signal)) + 1j * rng.standard_normal(len(signal)))
    return BasebandSignal(signal.samples + noise, signal.sample_rate_hz, signal.span_s)
