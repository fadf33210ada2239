from typing import Optional, Tuple

import numpy as np

from channel.ch_models import TapProfile


__all__ = ["random_profile"]


def random_profile(
        rng: np.random.Generator,
        period_s: float,
        label: int = 1,
        n_taps: Tuple[int, int] = (1, 6),
        max_spread: float = 0.8,
        grid_step_s: Optional[float] = None,
) -> TapProfile:
    """
    Random static multipath for checks: uniform fractional delays within
    max_spread * T, unit-variance complex Gaussian gains. Not a fading model.

    With grid_step_s, delays are distinct whole multiples of that step instead.
    """
    count = int(rng.integers(n_taps[0], n_taps[1] + 1))
    if grid_step_s is None:
        delays = np.sort(rng.uniform(0.0, max_spread * period_s, size=count))
    else:
        n_steps = max(int(max_spread * period_s / grid_step_s), 1)
        count = min(count, n_steps)
        delays = np.sort(rng.choice(n_steps, size=count, replace=False)) * grid_step_s
    gains = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2)
    return TapProfile(delays, gains, label)
