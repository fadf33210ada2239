import numpy as np

from core.configs import SounderConfig
from channel.acquisition import emitted_signal
from channel.ch_models import AcquisitionRecord
from estimation.analysis import analyze, extract_lines
from estimation.e_models import ImpulseResponseEstimate, EstimationMethod
from estimation.timedomain import to_time, correct_ramp
from waveform.w_models import BasebandSignal


__all__ = ["circular_correlation", "correlation_lines", "correlate_estimate"]


def circular_correlation(record: AcquisitionRecord, reference: BasebandSignal) -> BasebandSignal:
    """c[l] = (1/M) sum_i r[(i + l) mod M] conj(ref[i]) over the pT window."""
    m = len(record)
    corr = np.fft.ifft(np.fft.fft(record.samples) * np.conj(np.fft.fft(reference.samples))) / m
    return BasebandSignal(corr, record.sample_rate_hz, record.span_s)


def correlation_lines(record: AcquisitionRecord, n: int, config: SounderConfig) -> np.ndarray:
    """
    Channel-n lines of the correlation with transmitter n's pT reference:
    R * conj(S_n), i.e. the inversion lines weighted by |S_n|^2.
    """
    reference = emitted_signal(config, n)
    corr = circular_correlation(record, reference)
    return extract_lines(analyze(corr, config), n, config)


def correlate_estimate(record: AcquisitionRecord, n: int, config: SounderConfig) -> ImpulseResponseEstimate:
    # keeping only comb n of the correlation folds it to one period T
    lines = correlation_lines(record, n, config)
    return correct_ramp(to_time(lines, n, config, EstimationMethod.CORRELATION), config)
