from typing import Optional, Union

import numpy as np

from core.configs import SounderConfig
from core.errors import EstimationError
from channel.ch_models import AcquisitionRecord
from estimation.e_models import ReceivedSpectrum
from waveform.dft import dft_fast
from waveform.w_models import BasebandSignal


__all__ = ["analyze", "extract_lines", "comb_bins"]


def analyze(
        record: Union[AcquisitionRecord, BasebandSignal],
        config: Optional[SounderConfig] = None,
) -> ReceivedSpectrum:
    """
    DFT of the pT window with 1/M scaling. For a noiseless exact-period record,
    the bin of every emitted line holds that line's amplitude times H there.
    """
    n_samples = round(record.sample_rate_hz * record.span_s)
    if len(record) != n_samples:
        raise EstimationError(f"record holds {len(record)} samples, f_e * span needs {n_samples}")
    if config is not None and len(record) != config.acquisition_samples:
        raise EstimationError(
            f"record length {len(record)} does not match f_e * pT = {config.acquisition_samples}"
        )
    return ReceivedSpectrum(bins=np.fft.fftshift(dft_fast(record.samples)), span_s=record.span_s)


def comb_bins(n: int, config: SounderConfig) -> np.ndarray:
    """Bins m = p*k + (n-1), k in [-N, N-1], of channel n on the 1/(pT) grid."""
    if not 1 <= n <= config.p:
        raise EstimationError(f"channel index n={n} outside [1, {config.p}]")
    half = config.effective_half_lines
    return config.p * np.arange(-half, half) + (n - 1)


def extract_lines(spectrum: ReceivedSpectrum, n: int, config: SounderConfig) -> np.ndarray:
    """Lines numbered n modulo p, ascending k."""
    if not np.isclose(spectrum.span_s, config.acquisition_span_s, rtol=1e-9, atol=0):
        raise EstimationError(f"spectrum spans {spectrum.span_s} s, config expects pT = {config.acquisition_span_s} s")
    return spectrum.at(comb_bins(n, config))
