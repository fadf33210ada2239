import dataclasses

import numpy as np

from core.errors import SignalError
from waveform.w_models import SpectralComb


__all__ = ["apply_comb_offset", "line_frequencies", "offset_hz"]


def apply_comb_offset(comb: SpectralComb, n: int, p: int) -> SpectralComb:
    """
    Interleave transmitter n (1-based) among p: every line moves up by (n-1)/(pT).

    The line amplitudes are untouched; for n >= 2 the signal period becomes pT.
    """
    if p < 1 or not 1 <= n <= p:
        raise SignalError(f"transmitter index n={n} outside [1, {p}]")
    if comb.offset_index != 0:
        raise SignalError(f"comb is already offset (offset_index={comb.offset_index})")
    return dataclasses.replace(comb, offset_index=n - 1, comb_modulus=p)


def line_frequencies(comb: SpectralComb) -> np.ndarray:
    return comb.frequencies_hz


def offset_hz(n: int, p: int, base_period: float) -> float:
    return (n - 1) / (p * base_period)
