import dataclasses
from typing import Optional

import numpy as np

from core.errors import ChannelError
from channel.ch_models import TapProfile
from waveform.w_models import SpectralComb


__all__ = ["transfer_function", "check_spread", "apply_channel", "apply_delay", "oracle_from_lines", "oracle_ir", "oracle_for_comb"]


def transfer_function(profile: TapProfile, frequencies_hz: np.ndarray) -> np.ndarray:
    """H(f) = sum_i gain_i e^{-j2pi f delay_i}."""
    f = np.asarray(frequencies_hz, dtype=np.float64)
    if profile.n_taps == 0:
        return np.zeros(f.shape, dtype=np.complex128)
    return np.exp(-2j * np.pi * np.outer(f, profile.delays)) @ profile.gains


def check_spread(profile: TapProfile, base_period: float) -> None:
    if profile.n_taps and profile.max_delay >= base_period:
        raise ChannelError(
            f"channel {profile.label}: delay {profile.max_delay:.6e} s >= T = {base_period:.6e} s "
            f"would alias circularly"
        )


def apply_channel(comb: SpectralComb, profile: TapProfile) -> SpectralComb:
    check_spread(profile, comb.base_period)
    h = transfer_function(profile, comb.frequencies_hz)
    return dataclasses.replace(comb, lines=comb.lines * h)


def apply_delay(comb: SpectralComb, delay_s: float) -> SpectralComb:
    """Common delay on every line (receiver timing offset); wraps circularly after periodization."""
    if not 0 <= delay_s < comb.base_period:
        raise ChannelError(f"timing offset {delay_s} s outside [0, T)")
    if delay_s == 0:
        return comb
    return dataclasses.replace(comb, lines=comb.lines * np.exp(-2j * np.pi * comb.frequencies_hz * delay_s))


def oracle_from_lines(h_lines: np.ndarray, frequencies_hz: np.ndarray, sample_rate_hz: float) -> np.ndarray:
    """(1/2N) sum_k h_k e^{j2pi f_k t_i}, t_i = i/sample_rate_hz, i in [0, 2N)."""
    freqs = np.asarray(frequencies_hz, dtype=np.float64)
    t = np.arange(freqs.size) / sample_rate_hz
    return np.exp(2j * np.pi * np.outer(t, freqs)) @ np.asarray(h_lines, dtype=np.complex128) / freqs.size


def oracle_ir(
        profile: TapProfile,
        comb_frequencies: np.ndarray,
        sample_rate_hz: float,
        base_period: Optional[float] = None,
) -> np.ndarray:
    """
    Band-limited, T-periodized response seen on the given 2N lines:
    (1/2N) sum_k H(f_k) e^{j2pi f_k t_i}, t_i = i/sample_rate_hz, i in [0, 2N).
    """
    freqs = np.asarray(comb_frequencies, dtype=np.float64)
    if base_period is None and freqs.size > 1:
        base_period = 1.0 / (freqs[1] - freqs[0])
    if base_period is not None:
        check_spread(profile, base_period)
    return oracle_from_lines(transfer_function(profile, freqs), freqs, sample_rate_hz)


def oracle_for_comb(profile: TapProfile, comb: SpectralComb) -> np.ndarray:
    """Oracle on the estimate grid t_i = iT/(2N) of this comb's own lines."""
    return oracle_ir(profile, comb.frequencies_hz, comb.band_hz, comb.base_period)
