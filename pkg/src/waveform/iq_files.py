from pathlib import Path
from typing import Optional, Dict, Any, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import SignalError
from core.utils import write_bytes_atomic, write_text_atomic
from waveform.w_models import BasebandSignal


__all__ = ["IQMetadata", "write_iq", "read_iq", "sidecar_path", "write_signal", "read_signal"]


# little-endian float64 I then Q per sample == little-endian complex128
IQ_DTYPE = np.dtype("<c16")
IQ_SUFFIX = ".iq"


class IQMetadata(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    role: str
    n_samples: int
    sample_rate_hz: Optional[float] = None
    span_s: Optional[float] = None
    comb_modulus: Optional[int] = None
    channel_index: Optional[int] = None
    fingerprint: Optional[str] = None
    noise_seed: Optional[int] = None
    snr_db: Optional[float] = None
    attributes: Dict[str, Any] = Field(default_factory=dict)


def sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def write_iq(path: Path, samples: np.ndarray, metadata: IQMetadata) -> Path:
    path = Path(path)
    if path.suffix != IQ_SUFFIX:
        path = path.with_suffix(IQ_SUFFIX)
    data = np.ascontiguousarray(samples, dtype=IQ_DTYPE)
    if data.ndim != 1 or data.size != metadata.n_samples:
        raise SignalError(f"{path.name}: metadata says {metadata.n_samples} samples, got {data.shape}")
    write_bytes_atomic(path, data.tobytes())
    write_text_atomic(sidecar_path(path), metadata.model_dump_json(indent=2))
    return path


def read_iq(path: Path) -> Tuple[np.ndarray, IQMetadata]:
    path = Path(path)
    meta_file = sidecar_path(path)
    if not path.is_file() or not meta_file.is_file():
        raise SignalError(f"IQ file or sidecar missing: {path}")
    metadata = IQMetadata.model_validate_json(meta_file.read_text())
    samples = np.frombuffer(path.read_bytes(), dtype=IQ_DTYPE).astype(np.complex128)
    if samples.size != metadata.n_samples:
        raise SignalError(f"{path.name}: sidecar says {metadata.n_samples} samples, file holds {samples.size}")
    return samples, metadata


def write_signal(path: Path, signal: BasebandSignal, role: str, **fields) -> Path:
    return write_iq(path, signal.samples, IQMetadata(
        role=role,
        n_samples=len(signal),
        sample_rate_hz=signal.sample_rate_hz,
        span_s=signal.span_s,
        **fields,
    ))


def read_signal(path: Path) -> Tuple[BasebandSignal, IQMetadata]:
    samples, metadata = read_iq(path)
    if metadata.sample_rate_hz is None or metadata.span_s is None:
        raise SignalError(f"{path}: sidecar lacks sample_rate_hz/span_s, not a baseband signal")
    return BasebandSignal(samples, metadata.sample_rate_hz, metadata.span_s), metadata
