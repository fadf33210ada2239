from pathlib import Path

import numpy as np

from core.errors import SequenceError
from sequences.s_models import SymbolSequence
from waveform.iq_files import read_iq


__all__ = ["to_symbols", "oversample", "circular_autocorrelation", "load_symbols"]


def to_symbols(bits: np.ndarray, chip_rate: float) -> SymbolSequence:
    """Antipodal mapping 0 -> +1, 1 -> -1."""
    bits = np.asarray(bits)
    if bits.size == 0:
        raise SequenceError("cannot map an empty bit sequence")
    if np.any((bits != 0) & (bits != 1)):
        raise SequenceError("bits must be 0/1")
    return SymbolSequence(symbols=1.0 - 2.0 * bits.astype(np.float64), chip_rate=chip_rate)


def oversample(seq: SymbolSequence, factor: int) -> SymbolSequence:
    """
    Zero-stuffed chip impulses at `factor` samples per chip; the period T is unchanged.
    The spectrum repeats the chip-rate lines `factor` times (scaled by 1/factor).
    """
    if factor < 1:
        raise SequenceError(f"oversampling factor must be >= 1, got {factor}")
    if factor == 1:
        return seq
    stuffed = np.zeros(seq.period_chips * factor, dtype=np.complex128)
    stuffed[::factor] = seq.symbols
    return SymbolSequence(symbols=stuffed, chip_rate=seq.chip_rate * factor)


def circular_autocorrelation(seq: SymbolSequence) -> np.ndarray:
    """c[l] = sum_i s[(i + l) mod L] conj(s[i]); c[0] is the sequence energy."""
    spectrum = np.fft.fft(seq.symbols)
    corr = np.fft.ifft(np.abs(spectrum) ** 2)
    return corr


def load_symbols(path: Path, chip_rate: float) -> SymbolSequence:
    samples, _metadata = read_iq(path)
    return SymbolSequence(symbols=samples, chip_rate=chip_rate)
