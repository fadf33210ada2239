from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import ChannelError, SignalError
from waveform.w_models import BasebandSignal, frozen_array, is_integer_multiple


__all__ = ["TapProfile", "AcquisitionRecord"]


@dataclass(frozen=True, eq=False)
class TapProfile:
    """Static multipath channel: complex gains at (possibly fractional) delays in seconds."""
    delays: np.ndarray
    gains: np.ndarray
    label: int = 1
    silent: bool = False

    def __post_init__(self):
        object.__setattr__(self, "delays", frozen_array(self.delays, dtype=np.float64))
        object.__setattr__(self, "gains", frozen_array(self.gains))
        if self.delays.ndim != 1 or self.delays.shape != self.gains.shape:
            raise ChannelError(f"delays {self.delays.shape} and gains {self.gains.shape} must be matching 1-D arrays")
        if self.delays.size and (not np.all(np.isfinite(self.delays)) or self.delays.min() < 0):
            raise ChannelError("tap delays must be finite and >= 0")
        if not self.silent and not np.any(self.gains):
            raise ChannelError(f"channel {self.label} has no nonzero tap; build it with silent=True")

    @classmethod
    def from_taps(cls, taps: Sequence[Tuple[float, complex]], label: int = 1) -> "TapProfile":
        delays = [d for d, _ in taps]
        gains = [g for _, g in taps]
        return cls(np.array(delays, dtype=np.float64), np.array(gains, dtype=np.complex128), label)

    @classmethod
    def identity(cls, label: int = 1) -> "TapProfile":
        return cls.from_taps([(0.0, 1.0)], label)

    @classmethod
    def silent_profile(cls, label: int = 1) -> "TapProfile":
        return cls(np.zeros(0), np.zeros(0, dtype=np.complex128), label, silent=True)

    @property
    def n_taps(self) -> int:
        return self.delays.size

    @property
    def max_delay(self) -> float:
        return float(self.delays.max()) if self.delays.size else 0.0

    @property
    def is_silent(self) -> bool:
        return not np.any(self.gains)

    def delayed(self, extra_delay_s: float) -> "TapProfile":
        return TapProfile(self.delays + extra_delay_s, self.gains, self.label, self.silent)

    def scaled(self, factor: complex) -> "TapProfile":
        return TapProfile(self.delays, self.gains * factor, self.label, silent=self.silent or factor == 0)

    def merged(self, other: "TapProfile") -> "TapProfile":
        return TapProfile(
            np.concatenate([self.delays, other.delays]),
            np.concatenate([self.gains, other.gains]),
            self.label,
            silent=self.silent and other.silent,
        )


@dataclass(frozen=True, eq=False)
class AcquisitionRecord:
    """One composite received window of f_e * pT samples."""
    samples: np.ndarray
    sample_rate_hz: float
    span_s: float
    comb_modulus: int
    fingerprint: Optional[str] = None
    noise_seed: Optional[int] = None
    snr_db: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "samples", frozen_array(self.samples))
        expected = self.sample_rate_hz * self.span_s
        if not is_integer_multiple(expected):
            raise SignalError(f"f_e * pT = {expected!r} is not an integer")
        if self.samples.ndim != 1 or self.samples.size != round(expected):
            raise SignalError(f"acquisition needs {round(expected)} samples, got {self.samples.shape}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def signal(self) -> BasebandSignal:
        return BasebandSignal(self.samples, self.sample_rate_hz, self.span_s)
