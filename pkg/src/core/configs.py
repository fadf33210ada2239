import copy
from functools import lru_cache
from pathlib import Path
from typing import Optional, List, Literal, Tuple, Dict, Any

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from channel.ch_models import TapProfile
from core.errors import ConfigError
from core.utils import generate_content_hash
from sequences.mseq import PRIMITIVE_TAPS, generate_mseq
from sequences.s_models import MSequenceSpec, SymbolSequence
from sequences.spectrum import DEFAULT_LINE_FLOOR_REL, band_limit, largest_half_lines
from sequences.symbols import to_symbols, oversample, load_symbols
from waveform.w_models import SpectralComb, is_integer_multiple


__all__ = [
    "TapConfig", "ProfileConfig", "SequenceConfig", "SounderConfig", "ESTIMATOR_FIELDS",
    "PRESETS", "preset_config", "load_config", "write_config",
]

# receiver-side simulation fields and reporting knobs stay out
ESTIMATOR_FIELDS = {"p", "sequence", "chip_rate_hz", "half_lines", "sample_rate_hz", "line_floor_rel", "ridge"}


class TapConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    delay_s: float = Field(ge=0)
    gain_re: float = 1.0
    gain_im: float = 0.0

    @property
    def gain(self) -> complex:
        return complex(self.gain_re, self.gain_im)


class ProfileConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    taps: List[TapConfig] = Field(default_factory=list)
    silent: bool = False

    def to_profile(self, label: int) -> TapProfile:
        if not self.taps:
            return TapProfile.silent_profile(label)
        return TapProfile(
            np.array([t.delay_s for t in self.taps], dtype=np.float64),
            np.array([t.gain for t in self.taps], dtype=np.complex128),
            label,
            silent=self.silent,
        )


class SequenceConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["mseq", "iq_file"] = "mseq"
    degree: Optional[int] = Field(default=None, ge=2, le=24)
    feedback_taps: Optional[Tuple[int, ...]] = None
    initial_state: Optional[Tuple[int, ...]] = None
    iq_path: Optional[str] = None
    # zero-stuffed chip impulses per chip before band limiting
    samples_per_chip: int = Field(default=1, ge=1, le=16)

    @model_validator(mode="after")
    def _check_kind(self) -> "SequenceConfig":
        if self.kind == "mseq" and self.degree is None:
            raise ValueError("sequence.degree is required for kind=mseq")
        if self.kind == "mseq" and self.feedback_taps is None and self.degree not in PRIMITIVE_TAPS:
            raise ValueError(f"sequence.feedback_taps is required for degree {self.degree}")
        if self.kind == "iq_file" and not self.iq_path:
            raise ValueError("sequence.iq_path is required for kind=iq_file")
        return self

    def mseq_spec(self) -> MSequenceSpec:
        return MSequenceSpec(
            degree=self.degree,
            feedback_taps=self.feedback_taps or PRIMITIVE_TAPS[self.degree],
            initial_state=self.initial_state or (1,) * self.degree,
        )


@lru_cache(maxsize=64)
def _sounder_sequence(sequence: SequenceConfig, chip_rate_hz: float) -> SymbolSequence:
    if sequence.kind == "mseq":
        chips = to_symbols(generate_mseq(sequence.mseq_spec()), chip_rate_hz)
    else:
        chips = load_symbols(Path(sequence.iq_path), chip_rate_hz)
    return oversample(chips, sequence.samples_per_chip)


@lru_cache(maxsize=64)
def _usable_half_lines(sequence: SequenceConfig, chip_rate_hz: float, line_floor_rel: float) -> int:
    return largest_half_lines(_sounder_sequence(sequence, chip_rate_hz), line_floor_rel)


@lru_cache(maxsize=64)
def _base_comb(sequence: SequenceConfig, chip_rate_hz: float, half_lines: int, line_floor_rel: float) -> SpectralComb:
    return band_limit(_sounder_sequence(sequence, chip_rate_hz), half_lines, line_floor_rel)


class SounderConfig(BaseModel):
    """
    All sounder parameters. Stored fields are what a config file holds;
    T, B, f_e, pT and the sample count are derived.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    preset: Optional[str] = None

    p: int = Field(default=1, ge=1, le=64)
    sequence: SequenceConfig
    chip_rate_hz: float = Field(gt=0)
    # N: the comb keeps 2N lines k in [-N, N-1]; None picks the largest usable N
    half_lines: Optional[int] = Field(default=None, ge=1)
    # None means f_e = B
    sample_rate_hz: Optional[float] = Field(default=None, gt=0)

    line_floor_rel: float = Field(default=DEFAULT_LINE_FLOOR_REL, gt=0, lt=1)
    ridge: float = Field(default=0.0, ge=0)

    carrier_hz: Optional[float] = Field(default=None, gt=0)
    timing_offset_s: float = Field(default=0.0, ge=0)
    snr_db: Optional[float] = Field(default=None, allow_inf_nan=False)
    equipment_filter: Optional[List[TapConfig]] = None

    pdp_threshold_db: float = Field(default=-30.0, lt=0)
    workers: int = Field(default=1, ge=1, le=64)

    @model_validator(mode="after")
    def _check_invariants(self) -> "SounderConfig":
        seq = self.symbol_sequence()
        n_lines = 2 * self.effective_half_lines
        if n_lines > seq.period_chips:
            raise ValueError(f"2N <= L violated: 2N={n_lines}, L={seq.period_chips}")
        # rejects weak lines
        self.base_comb()
        if self.sample_rate < self.band_hz * (1 - 1e-12):
            raise ValueError(f"sampling below band: f_e={self.sample_rate} Hz < B={self.band_hz} Hz")
        if not is_integer_multiple(self.sample_rate * self.acquisition_span_s):
            raise ValueError(
                f"f_e * pT must be an integer sample count, got {self.sample_rate * self.acquisition_span_s!r}"
            )
        if self.timing_offset_s >= self.period_s:
            raise ValueError(f"timing_offset_s={self.timing_offset_s} must be < T={self.period_s}")
        if self.equipment_filter and max(t.delay_s for t in self.equipment_filter) >= self.period_s:
            raise ValueError("equipment_filter delays must be < T")
        return self

    def updated(self, **changes) -> "SounderConfig":
        """Copy with changes, re-validated (model_copy would skip the invariants)."""
        return config_from_dict({**self.model_dump(mode="json"), **changes})

    def symbol_sequence(self) -> SymbolSequence:
        return _sounder_sequence(self.sequence, self.chip_rate_hz)

    @property
    def effective_half_lines(self) -> int:
        if self.half_lines is not None:
            return self.half_lines
        return _usable_half_lines(self.sequence, self.chip_rate_hz, self.line_floor_rel)

    @property
    def n_lines(self) -> int:
        return 2 * self.effective_half_lines

    @property
    def sequence_length(self) -> int:
        return self.symbol_sequence().period_chips

    @property
    def period_s(self) -> float:
        return self.symbol_sequence().period_s

    @property
    def band_hz(self) -> float:
        return self.n_lines / self.period_s

    @property
    def line_grid_rate(self) -> float:
        return self.band_hz

    @property
    def sample_rate(self) -> float:
        return self.sample_rate_hz if self.sample_rate_hz is not None else self.band_hz

    @property
    def acquisition_span_s(self) -> float:
        return self.p * self.period_s

    @property
    def acquisition_samples(self) -> int:
        return round(self.sample_rate * self.acquisition_span_s)

    def offset_hz(self, n: int) -> float:
        return (n - 1) / (self.p * self.period_s)

    def base_comb(self) -> SpectralComb:
        return _base_comb(self.sequence, self.chip_rate_hz, self.effective_half_lines, self.line_floor_rel)

    def line_floor(self, lines: np.ndarray) -> float:
        return self.line_floor_rel * float(np.max(np.abs(lines)))

    def equipment_profile(self) -> Optional[TapProfile]:
        if not self.equipment_filter:
            return None
        return ProfileConfig(taps=self.equipment_filter).to_profile(label=0)

    @property
    def fingerprint(self) -> str:
        # parallelism never changes results
        return generate_content_hash(self.model_dump_json(exclude={"workers"}))

    @property
    def estimator_fingerprint(self) -> str:
        """Hash of the fields a recorded acquisition must share with the config that estimates it."""
        return generate_content_hash(self.model_dump_json(include=ESTIMATOR_FIELDS))

    def save_to_disk(self, path: Path) -> None:
        config_dict = self.model_dump(mode="json")
        Path(path).write_text(yaml.safe_dump(config_dict, default_flow_style=False, sort_keys=False))

    @classmethod
    def read_from_disk(cls, path: Path) -> "SounderConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"{path=} does not exist")
        config_dict = yaml.safe_load(path.read_text()) or {}
        if not isinstance(config_dict, dict):
            raise ConfigError(f"{path}: expected a mapping at top level")
        return config_from_dict(config_dict)


PRESETS: Dict[str, Dict[str, Any]] = {
    # 255-chip m-sequence at 12.5 Mchip/s, two chip impulses per chip:
    # T = 20.4 us, 2N = 510 lines, B = f_e = 25 MHz, 2T acquisition = 1020 samples
    "mulhouse": {
        "p": 2,
        "sequence": {"kind": "mseq", "degree": 8, "samples_per_chip": 2},
        "chip_rate_hz": 12.5e6,
        "half_lines": 255,
        "carrier_hz": 2.2e9,
    },
}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def config_from_dict(config_dict: Dict[str, Any]) -> SounderConfig:
    preset = config_dict.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}")
        config_dict = _deep_merge(PRESETS[preset], config_dict)
    try:
        return SounderConfig.model_validate(config_dict)
    except ValidationError as e:
        failing = "; ".join(
            f"{'.'.join(str(x) for x in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid sounder config: {failing}") from e


def preset_config(name: str, **overrides) -> SounderConfig:
    return config_from_dict({"preset": name, **overrides})


def load_config(path: Path) -> SounderConfig:
    return SounderConfig.read_from_disk(path)


def write_config(config: SounderConfig, path: Path) -> None:
    config.save_to_disk(path)
