import numpy as np
from numba import jit


__all__ = ["dft_direct", "dft_fast", "idft_lines"]


@jit(nopython=True)
def _dft_direct(x):
    n = x.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for m in range(n):
        acc = 0j
        for i in range(n):
            # integer phase index keeps the twiddles exact for long records
            acc += x[i] * np.exp(-2j * np.pi * ((m * i) % n) / n)
        out[m] = acc / n
    return out


def dft_direct(x: np.ndarray) -> np.ndarray:
    """
    Reference forward DFT, project normalization: X[m] = (1/M) sum x[i] e^{-j2pi mi/M}.
    Output in FFT order (bin m at index m mod M).
    """
    return _dft_direct(np.ascontiguousarray(x, dtype=np.complex128))


def dft_fast(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    return np.fft.fft(x) / x.size


def idft_lines(lines: np.ndarray) -> np.ndarray:
    """
    (1/2N) sum_k lines[k] e^{j2pi k i/2N} for ascending k in [-N, N-1], i in [0, 2N).
    """
    return np.fft.ifft(np.fft.ifftshift(np.asarray(lines, dtype=np.complex128)))
