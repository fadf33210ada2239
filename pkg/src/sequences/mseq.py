from typing import Dict, Tuple

import numpy as np
from numba import jit

from core.errors import SequenceError
from sequences.s_models import MSequenceSpec


__all__ = ["PRIMITIVE_TAPS", "default_mseq_spec", "generate_mseq"]


# feedback taps of primitive polynomials 1 + sum x^t, one per degree
PRIMITIVE_TAPS: Dict[int, Tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
}


def default_mseq_spec(degree: int) -> MSequenceSpec:
    if degree not in PRIMITIVE_TAPS:
        raise SequenceError(f"no built-in primitive taps for degree {degree}")
    return MSequenceSpec(
        degree=degree,
        feedback_taps=PRIMITIVE_TAPS[degree],
        initial_state=(1,) * degree,
    )


@jit(nopython=True)
def _lfsr_run(state, taps, n_steps):
    m = state.shape[0]
    reg = state.copy()
    out = np.zeros(n_steps, dtype=np.uint8)
    period = 0
    for t in range(n_steps):
        out[t] = reg[m - 1]
        fb = 0
        for j in taps:
            fb ^= reg[j]
        for c in range(m - 1, 0, -1):
            reg[c] = reg[c - 1]
        reg[0] = fb
        if period == 0:
            back = True
            for c in range(m):
                if reg[c] != state[c]:
                    back = False
                    break
            if back:
                period = t + 1
    return out, period


def generate_mseq(spec: MSequenceSpec) -> np.ndarray:
    """
    One period (2^degree - 1 bits) of the LFSR output.

    Raises SequenceError when the register state comes back early, i.e. the
    feedback polynomial is not primitive.
    """
    state = np.array(spec.initial_state, dtype=np.uint8)
    taps = np.array([t - 1 for t in spec.feedback_taps], dtype=np.int64)
    bits, period = _lfsr_run(state, taps, spec.length)
    if period != spec.length:
        raise SequenceError(
            f"feedback taps {spec.feedback_taps} are not primitive: "
            f"observed period {period}, expected {spec.length}"
        )
    return bits
