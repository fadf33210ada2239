from dataclasses import dataclass

import numpy as np

from core.errors import SignalError


__all__ = ["SpectralComb", "BasebandSignal", "frozen_array", "is_integer_multiple"]


def frozen_array(values, dtype=np.complex128) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def is_integer_multiple(value: float, rel_tol: float = 1e-9) -> bool:
    nearest = round(value)
    return nearest > 0 and abs(value - nearest) <= rel_tol * abs(value)


@dataclass(frozen=True, eq=False)
class SpectralComb:
    """
    Line spectrum of one transmitter's periodic baseband signal.

    Line k (ascending, k in [-N, N-1]) sits at k/T + offset_index/(pT),
    i.e. at bin p*k + offset_index of the 1/(pT) grid.
    """
    lines: np.ndarray
    base_period: float
    offset_index: int = 0
    comb_modulus: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lines", frozen_array(self.lines))
        if self.lines.ndim != 1 or self.lines.size == 0 or self.lines.size % 2:
            raise SignalError(f"comb needs an even, nonzero number of lines, got {self.lines.shape}")
        if self.base_period <= 0:
            raise SignalError(f"base period must be positive, got {self.base_period}")
        if self.comb_modulus < 1 or not 0 <= self.offset_index < self.comb_modulus:
            raise SignalError(f"offset_index={self.offset_index} outside [0, {self.comb_modulus - 1}]")

    @property
    def half_lines(self) -> int:
        return self.lines.size // 2

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.half_lines, self.half_lines)

    @property
    def band_hz(self) -> float:
        return 2 * self.half_lines / self.base_period

    @property
    def bin_indices(self) -> np.ndarray:
        return self.comb_modulus * self.k + self.offset_index

    @property
    def signal_period(self) -> float:
        return self.comb_modulus * self.base_period

    @property
    def frequencies_hz(self) -> np.ndarray:
        return self.bin_indices / self.signal_period


@dataclass(frozen=True, eq=False)
class BasebandSignal:
    samples: np.ndarray
    sample_rate_hz: float
    span_s: float

    def __post_init__(self):
        object.__setattr__(self, "samples", frozen_array(self.samples))
        expected = self.sample_rate_hz * self.span_s
        if not is_integer_multiple(expected):
            raise SignalError(f"sample_rate_hz * span_s = {expected!r} is not an integer sample count")
        if self.samples.ndim != 1 or self.samples.size != round(expected):
            raise SignalError(f"expected {round(expected)} samples, got {self.samples.shape}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))
