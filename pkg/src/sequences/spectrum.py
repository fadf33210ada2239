import numpy as np

from core.errors import SequenceError
from sequences.s_models import SymbolSequence
from waveform.w_models import SpectralComb


__all__ = ["DEFAULT_LINE_FLOOR_REL", "sequence_lines", "band_limit", "largest_half_lines"]


DEFAULT_LINE_FLOOR_REL = 1e-9


def sequence_lines(seq: SymbolSequence, half_lines: int) -> np.ndarray:
    """(1/L) sum_i s[i] e^{-j2pi k i/L} for k in [-N, N-1], ascending."""
    if half_lines < 1 or 2 * half_lines > seq.period_chips:
        raise SequenceError(f"need 1 <= 2N <= L, got 2N={2 * half_lines}, L={seq.period_chips}")
    full = np.fft.fft(seq.symbols) / seq.period_chips
    k = np.arange(-half_lines, half_lines)
    return full[k % seq.period_chips]


def band_limit(
        seq: SymbolSequence,
        half_lines: int,
        line_floor_rel: float = DEFAULT_LINE_FLOOR_REL,
) -> SpectralComb:
    """
    Keep the 2N lines k in [-N, N-1] of the L-periodic sequence; B = 2N/T.

    Every kept line must reach line_floor_rel * max|line|, otherwise Wiener
    inversion on that band is ill-posed and the sequence is rejected.
    """
    lines = sequence_lines(seq, half_lines)
    magnitudes = np.abs(lines)
    floor = line_floor_rel * magnitudes.max()
    weak = np.flatnonzero(magnitudes < floor) if floor > 0 else np.arange(lines.size)
    if weak.size:
        bad_k = (weak - half_lines).tolist()
        raise SequenceError(f"lines k={bad_k[:8]} below floor {floor:.3e}; sequence unusable on this band")
    return SpectralComb(lines=lines, base_period=seq.period_s)


def largest_half_lines(seq: SymbolSequence, line_floor_rel: float = DEFAULT_LINE_FLOOR_REL) -> int:
    """Largest N with 2N <= L and every kept line above the floor."""
    for half_lines in range(seq.period_chips // 2, 0, -1):
        magnitudes = np.abs(sequence_lines(seq, half_lines))
        if magnitudes.max() > 0 and magnitudes.min() >= line_floor_rel * magnitudes.max():
            return half_lines
    raise SequenceError("no band of the sequence has all its lines above the floor")
