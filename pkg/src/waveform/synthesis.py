from typing import List

import numpy as np

from core.errors import SignalError
from waveform.w_models import SpectralComb, BasebandSignal, is_integer_multiple


__all__ = ["synthesize", "composite", "zero_signal"]


def _period_samples(comb: SpectralComb, sample_rate_hz: float) -> int:
    per_period = sample_rate_hz * comb.signal_period
    if not is_integer_multiple(per_period):
        raise SignalError(
            f"sample rate {sample_rate_hz} Hz is not a multiple of 1/(pT) = {1 / comb.signal_period} Hz"
        )
    return round(per_period)


def synthesize(
        comb: SpectralComb,
        sample_rate_hz: float,
        span_s: float,
        fast: bool = False,
) -> BasebandSignal:
    """
    Sample s(t) = sum_k lines[k] e^{j2pi (k/T + (n-1)/pT) t} at t = i/f_e over span_s.

    The direct line sum is the reference; fast=True builds one period with an
    inverse FFT and tiles it, which is valid because the grid always aligns here.
    """
    if sample_rate_hz < comb.band_hz * (1 - 1e-12):
        raise SignalError(f"sampling below band: f_e={sample_rate_hz} Hz < B={comb.band_hz} Hz")
    per_period = _period_samples(comb, sample_rate_hz)

    n_total = sample_rate_hz * span_s
    if not is_integer_multiple(n_total):
        raise SignalError(f"span {span_s} s is not a multiple of 1/f_e")
    n_total = round(n_total)

    bins = comb.bin_indices
    if fast:
        grid = np.zeros(per_period, dtype=np.complex128)
        grid[bins % per_period] = comb.lines
        one_period = np.fft.ifft(grid) * per_period
        reps = -(-n_total // per_period)
        samples = np.tile(one_period, reps)[:n_total]
    else:
        i = np.arange(n_total, dtype=np.int64)
        phase_idx = np.outer(i, bins) % per_period
        samples = np.exp(2j * np.pi * phase_idx / per_period) @ comb.lines

    return BasebandSignal(samples=samples, sample_rate_hz=sample_rate_hz, span_s=span_s)


def zero_signal(sample_rate_hz: float, span_s: float) -> BasebandSignal:
    return BasebandSignal(
        samples=np.zeros(round(sample_rate_hz * span_s), dtype=np.complex128),
        sample_rate_hz=sample_rate_hz,
        span_s=span_s,
    )


def composite(signals: List[BasebandSignal]) -> BasebandSignal:
    if not signals:
        raise SignalError("composite needs at least one signal")
    first = signals[0]
    for s in signals[1:]:
        if (
            len(s) != len(first)
            or not np.isclose(s.sample_rate_hz, first.sample_rate_hz, rtol=1e-12, atol=0)
            or not np.isclose(s.span_s, first.span_s, rtol=1e-12, atol=0)
        ):
            raise SignalError(
                f"mismatched signals: {s.sample_rate_hz} Hz/{s.span_s} s vs {first.sample_rate_hz} Hz/{first.span_s} s"
            )
    total = np.sum([s.samples for s in signals], axis=0)
    return BasebandSignal(samples=total, sample_rate_hz=first.sample_rate_hz, span_s=first.span_s)
