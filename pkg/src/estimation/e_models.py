from dataclasses import dataclass, field
from enum import Enum
from typing import Dict

import numpy as np

from core.errors import EstimationError
from waveform.w_models import frozen_array


__all__ = ["EstimationMethod", "ReceivedSpectrum", "ImpulseResponseEstimate", "CalibrationRecord"]


class EstimationMethod(Enum):
    INVERSION = "inversion"
    CORRELATION = "correlation"


@dataclass(frozen=True, eq=False)
class ReceivedSpectrum:
    """
    Normalized DFT of a record over pT. `bins` ascend in m, bin m at m/(pT),
    m in [-(M//2), M - M//2).
    """
    bins: np.ndarray
    span_s: float

    def __post_init__(self):
        object.__setattr__(self, "bins", frozen_array(self.bins))

    def __len__(self) -> int:
        return self.bins.size

    @property
    def first_index(self) -> int:
        return -(self.bins.size // 2)

    @property
    def frequencies_hz(self) -> np.ndarray:
        return (np.arange(self.bins.size) + self.first_index) / self.span_s

    def at(self, m: np.ndarray) -> np.ndarray:
        idx = np.asarray(m) - self.first_index
        if np.any(idx < 0) or np.any(idx >= self.bins.size):
            raise EstimationError(f"bins outside the analyzed band [{self.first_index}, {self.first_index + self.bins.size})")
        return self.bins[idx]


@dataclass(frozen=True, eq=False)
class ImpulseResponseEstimate:
    """One period T of channel n's band-limited response, 2N samples at t_i = iT/(2N)."""
    samples: np.ndarray
    channel_index: int
    period_s: float
    comb_modulus: int
    method: EstimationMethod = EstimationMethod.INVERSION
    ramp_corrected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "samples", frozen_array(self.samples))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def grid_rate(self) -> float:
        return self.samples.size / self.period_s

    @property
    def times_s(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.period_s / self.samples.size


@dataclass(frozen=True, eq=False)
class CalibrationRecord:
    """Back-to-back ("cable") line responses of the emission chain, one 2N-line comb per channel."""
    lines: Dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lines", {int(n): frozen_array(v) for n, v in self.lines.items()})

    def for_channel(self, n: int) -> np.ndarray:
        if n not in self.lines:
            raise EstimationError(f"calibration record has no channel {n} (has {sorted(self.lines)})")
        return self.lines[n]

    @classmethod
    def flat(cls, n_lines: int, p: int) -> "CalibrationRecord":
        return cls({n: np.ones(n_lines, dtype=np.complex128) for n in range(1, p + 1)})
