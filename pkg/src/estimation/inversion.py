import numpy as np

from core.configs import SounderConfig
from core.errors import EstimationError
from core.logger import info
from channel.acquisition import simulate_acquisition, branch_comb
from channel.ch_models import TapProfile
from estimation.analysis import analyze, extract_lines
from estimation.e_models import CalibrationRecord
from sequences.spectrum import DEFAULT_LINE_FLOOR_REL


__all__ = ["wiener_invert", "apply_calibration", "measure_calibration"]


def _check_floor(lines: np.ndarray, floor: float, what: str) -> None:
    weak = np.flatnonzero(np.abs(lines) < floor)
    if weak.size:
        half = lines.size // 2
        raise EstimationError(f"{what} lines k={(weak - half).tolist()[:8]} below floor {floor:.3e}")


def wiener_invert(
        r_lines: np.ndarray,
        s_lines: np.ndarray,
        line_floor: float,
        ridge: float = 0.0,
) -> np.ndarray:
    """
    R/S line by line: the sampled transfer function of the channel on its comb.
    With ridge > 0: conj(S) R / (|S|^2 + ridge).
    """
    r_lines = np.asarray(r_lines, dtype=np.complex128)
    s_lines = np.asarray(s_lines, dtype=np.complex128)
    if r_lines.shape != s_lines.shape:
        raise EstimationError(f"received {r_lines.shape} and emitted {s_lines.shape} lines differ in shape")
    _check_floor(s_lines, line_floor, "emitted")
    if ridge == 0:
        return r_lines / s_lines
    return np.conj(s_lines) * r_lines / (np.abs(s_lines) ** 2 + ridge)


def apply_calibration(
        h_lines: np.ndarray,
        cal: CalibrationRecord,
        n: int,
        line_floor_rel: float = DEFAULT_LINE_FLOOR_REL,
) -> np.ndarray:
    """Divide out the cable reference of channel n, normalized to unit mean magnitude."""
    reference = cal.for_channel(n)
    if reference.shape != np.shape(h_lines):
        raise EstimationError(f"calibration for channel {n} has {reference.size} lines, got {np.size(h_lines)}")
    magnitudes = np.abs(reference)
    _check_floor(reference, line_floor_rel * magnitudes.max(), f"calibration channel {n}")
    return np.asarray(h_lines) / (reference / magnitudes.mean())


def measure_calibration(config: SounderConfig, seed: int = 0) -> CalibrationRecord:
    """
    Back-to-back recording through the emission chain only (identity channels, noiseless,
    no receiver timing offset): each channel's lines divided by its emitted lines.
    """
    cable = config.updated(snr_db=None, timing_offset_s=0.0)
    record = simulate_acquisition(
        cable, [TapProfile.identity(n) for n in range(1, cable.p + 1)], seed
    )
    spectrum = analyze(record, cable)
    lines = {}
    for n in range(1, cable.p + 1):
        s_lines = branch_comb(cable, n).lines
        lines[n] = wiener_invert(extract_lines(spectrum, n, cable), s_lines, cable.line_floor(s_lines))
    info(f"calibration measured for {cable.p} channels, {cable.n_lines} lines each")
    return CalibrationRecord(lines)
