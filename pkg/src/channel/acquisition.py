from typing import List, Optional, Sequence, Union

import numpy as np

from core.configs import SounderConfig
from core.errors import ChannelError
from core.logger import debug
from channel.ch_models import TapProfile, AcquisitionRecord
from channel.noise import add_awgn
from channel.taps import apply_channel, apply_delay
from waveform.comb import apply_comb_offset
from waveform.synthesis import synthesize, composite
from waveform.w_models import SpectralComb, BasebandSignal


__all__ = ["branch_comb", "emitted_signal", "received_branch", "simulate_acquisition"]


def branch_comb(config: SounderConfig, n: int) -> SpectralComb:
    """Emitted comb of transmitter n: the common sequence lines, interleaved at (n-1)/(pT)."""
    return apply_comb_offset(config.base_comb(), n, config.p)


def emitted_signal(config: SounderConfig, n: int, periods: int = 1) -> BasebandSignal:
    """Noiseless sounder waveform of transmitter n over `periods` acquisition spans pT."""
    return synthesize(branch_comb(config, n), config.sample_rate, periods * config.acquisition_span_s)


def received_branch(config: SounderConfig, n: int, profile: TapProfile) -> BasebandSignal:
    comb = branch_comb(config, n)
    equipment = config.equipment_profile()
    if equipment is not None:
        comb = apply_channel(comb, equipment)
    comb = apply_channel(comb, profile)
    comb = apply_delay(comb, config.timing_offset_s)
    return synthesize(comb, config.sample_rate, config.acquisition_span_s)


def simulate_acquisition(
        config: SounderConfig,
        profiles: Sequence[TapProfile],
        seed: Union[int, None] = 0,
) -> AcquisitionRecord:
    """
    Emit every branch through its own channel, superpose at the receiver,
    add receiver noise at config.snr_db and wrap the pT window with metadata.
    """
    if len(profiles) != config.p:
        raise ChannelError(f"expected {config.p} tap profiles, got {len(profiles)}")

    branches: List[BasebandSignal] = [
        received_branch(config, n, profile) for n, profile in enumerate(profiles, start=1)
    ]
    received = composite(branches)

    noise_seed: Optional[int] = None if config.snr_db is None else seed
    if config.snr_db is not None:
        received = add_awgn(received, config.snr_db, np.random.default_rng(seed))

    debug(f"acquisition: p={config.p} samples={len(received)} snr_db={config.snr_db} seed={noise_seed}")
    return AcquisitionRecord(
        samples=received.samples,
        sample_rate_hz=received.sample_rate_hz,
        span_s=received.span_s,
        comb_modulus=config.p,
        fingerprint=config.estimator_fingerprint,
        noise_seed=noise_seed,
        snr_db=config.snr_db,
    )
