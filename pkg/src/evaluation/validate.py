from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from core.configs import SounderConfig
from core.logger import info, warn
from channel.acquisition import simulate_acquisition, emitted_signal
from channel.ch_models import TapProfile
from channel.random_profiles import random_profile
from estimation.e_models import EstimationMethod
from estimation.pipeline import estimate_all, channel_lines
from estimation.timedomain import to_time, phase_ramp
from evaluation.metrics import nmse_db, crosstalk_db
from evaluation.oracles import expected_ir


__all__ = ["CheckResult", "run_builtin_checks", "BUILTIN_CHECKS"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def __post_init__(self):
        # plain Python scalars, as written to checks.json
        self.passed = bool(self.passed)
        self.value = float(self.value)
        self.threshold = float(self.threshold)


def _noiseless(config: SounderConfig) -> SounderConfig:
    return config.updated(snr_db=None)


def check_round_trip(config: SounderConfig, seed: int = 0, n_profiles: int = 10) -> CheckResult:
    """Random multipath on every branch, inversion estimate against the oracle."""
    config = _noiseless(config)
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(n_profiles):
        profiles = [random_profile(rng, config.period_s, label=n) for n in range(1, config.p + 1)]
        estimates = estimate_all(simulate_acquisition(config, profiles), None, config)
        for est, profile in zip(estimates, profiles):
            worst = max(worst, nmse_db(est.samples, expected_ir(config, est.channel_index, profile)))
    return CheckResult("round_trip", worst <= -200.0, worst, -200.0, f"{n_profiles} random profiles, worst NMSE dB")


def check_colocated(config: SounderConfig, seed: int = 0) -> CheckResult:
    """
    The same channel on every branch must give the same estimate on every channel.

    Each comb samples H on its own offset lines, so estimates only coincide when
    every delay sits on the iT/(2N) grid: the check uses grid delays on the bare
    sounder (no equipment filter, no timing offset).
    """
    config = config.updated(snr_db=None, timing_offset_s=0.0, equipment_filter=None)
    profile = random_profile(
        np.random.default_rng(seed), config.period_s, grid_step_s=config.period_s / config.n_lines
    )
    estimates = estimate_all(
        simulate_acquisition(config, [TapProfile(profile.delays, profile.gains, n) for n in range(1, config.p + 1)]),
        None, config,
    )
    reference = estimates[0].samples
    scale = float(np.max(np.abs(reference)))
    deviation = max((float(np.max(np.abs(e.samples - reference))) / scale for e in estimates[1:]), default=0.0)
    return CheckResult("colocated", deviation <= 1e-10, deviation, 1e-10, "max relative deviation between channels")


def check_crosstalk(config: SounderConfig, seed: int = 0) -> CheckResult:
    """Only channel 1 active; every other channel's estimate must stay at the numerical floor."""
    config = _noiseless(config)
    if config.p < 2:
        return CheckResult("crosstalk", True, -300.0, -200.0, "single channel, nothing to leak into")
    active = random_profile(np.random.default_rng(seed), config.period_s)
    profiles = [active] + [TapProfile.silent_profile(n) for n in range(2, config.p + 1)]
    estimates = estimate_all(simulate_acquisition(config, profiles), None, config)
    worst = max(crosstalk_db(e.samples, estimates[0].samples) for e in estimates[1:])
    return CheckResult("crosstalk", worst <= -200.0, worst, -200.0, "silent peak over active peak, dB")


def check_ramp_law(config: SounderConfig, seed: int = 0) -> CheckResult:
    """Uncorrected over corrected estimate must be the offset phase ramp wherever the response is significant."""
    config = _noiseless(config)
    rng = np.random.default_rng(seed)
    profiles = [random_profile(rng, config.period_s, label=n) for n in range(1, config.p + 1)]
    record = simulate_acquisition(config, profiles)
    worst = 0.0
    for n in range(2, config.p + 1):
        raw = to_time(channel_lines(record, n, config), n, config).samples
        oracle = expected_ir(config, n, profiles[n - 1])
        mask = np.abs(oracle) > 1e-8 * np.abs(oracle).max()
        ratio = raw[mask] / oracle[mask]
        ramp = phase_ramp(n, config.p, config.n_lines)[mask]
        worst = max(worst, float(np.max(np.abs(np.angle(ratio / ramp)))))
    return CheckResult("ramp_law", worst <= 1e-10, worst, 1e-10, "max phase error, rad")


def check_orthogonality(config: SounderConfig) -> CheckResult:
    """Distinct-offset combs over one pT span are orthogonal."""
    signals = [emitted_signal(config, n).samples for n in range(1, config.p + 1)]
    worst = 0.0
    for a in range(config.p):
        for b in range(a + 1, config.p):
            inner = abs(np.vdot(signals[a], signals[b]))
            worst = max(worst, float(inner / (np.linalg.norm(signals[a]) * np.linalg.norm(signals[b]))))
    return CheckResult("orthogonality", worst <= 1e-12, worst, 1e-12, "max normalized inner product")


def check_method_relation(config: SounderConfig, seed: int = 0) -> CheckResult:
    """Correlation lines equal inversion lines times |S_n|^2."""
    config = _noiseless(config)
    rng = np.random.default_rng(seed)
    profiles = [random_profile(rng, config.period_s, label=n) for n in range(1, config.p + 1)]
    record = simulate_acquisition(config, profiles)
    s_power = np.abs(config.base_comb().lines) ** 2
    worst = 0.0
    for n in range(1, config.p + 1):
        inversion = channel_lines(record, n, config, EstimationMethod.INVERSION)
        correlation = channel_lines(record, n, config, EstimationMethod.CORRELATION)
        expected = inversion * s_power
        worst = max(worst, float(np.max(np.abs(correlation - expected)) / np.max(np.abs(expected))))
    return CheckResult("method_relation", worst <= 1e-12, worst, 1e-12, "max relative line deviation")


BUILTIN_CHECKS: List[Callable[..., CheckResult]] = [
    check_orthogonality,
    check_round_trip,
    check_colocated,
    check_crosstalk,
    check_ramp_law,
    check_method_relation,
]


def run_builtin_checks(config: SounderConfig, seed: int = 0) -> List[CheckResult]:
    results = []
    for check in BUILTIN_CHECKS:
        result = check(config) if check is check_orthogonality else check(config, seed=seed)
        (info if result.passed else warn)(f"check {result.name}: {result.value:.3e} (limit {result.threshold:.0e})")
        results.append(result)
    return results
