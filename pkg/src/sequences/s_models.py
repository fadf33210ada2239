from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import SequenceError
from waveform.w_models import frozen_array


__all__ = ["MSequenceSpec", "SymbolSequence"]


class MSequenceSpec(BaseModel):
    """Fibonacci LFSR: cell 1 takes the XOR of the tapped cells, cell `degree` is the output."""
    model_config = ConfigDict(frozen=True)

    degree: int = Field(ge=2, le=24)
    feedback_taps: Tuple[int, ...]
    initial_state: Tuple[int, ...]

    @field_validator("feedback_taps", mode="before")
    @classmethod
    def _canonical_taps(cls, v):
        return tuple(sorted({int(t) for t in v}, reverse=True))

    @model_validator(mode="after")
    def _check(self) -> "MSequenceSpec":
        if not self.feedback_taps or any(not 1 <= t <= self.degree for t in self.feedback_taps):
            raise ValueError(f"feedback_taps {self.feedback_taps} must lie in [1, {self.degree}]")
        if self.degree not in self.feedback_taps:
            raise ValueError(f"feedback_taps must include the register length {self.degree}")
        if len(self.initial_state) != self.degree:
            raise ValueError(f"initial_state needs {self.degree} bits, got {len(self.initial_state)}")
        if any(b not in (0, 1) for b in self.initial_state):
            raise ValueError("initial_state must be made of 0/1 bits")
        if not any(self.initial_state):
            raise ValueError("initial_state must not be all zeros")
        return self

    @property
    def length(self) -> int:
        return 2 ** self.degree - 1


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """One period of the sounding sequence; `chip_rate` is the rate of `symbols` entries."""
    symbols: np.ndarray
    chip_rate: float

    def __post_init__(self):
        object.__setattr__(self, "symbols", frozen_array(self.symbols))
        if self.symbols.ndim != 1 or self.symbols.size == 0:
            raise SequenceError("symbol sequence is empty")
        if not np.any(self.symbols):
            raise SequenceError("symbol sequence is identically zero")
        if self.chip_rate <= 0:
            raise SequenceError(f"chip_rate must be positive, got {self.chip_rate}")

    @property
    def period_chips(self) -> int:
        return self.symbols.size

    @property
    def period_s(self) -> float:
        return self.period_chips / self.chip_rate
