import os
import tempfile

# logs, runs and telemetry of the CLI tests stay out of the checkout
os.environ.setdefault("SOUNDER_BASE_DIR", tempfile.mkdtemp(prefix="sounder-tests-"))

import numpy as np
import pytest

from core.configs import SounderConfig, config_from_dict


def make_config(p: int = 2, degree: int = 6, **overrides) -> SounderConfig:
    """Desk-scale sounder: 2^degree - 1 chips at 1 Mchip/s, f_e = B."""
    return config_from_dict({
        "p": p,
        "sequence": {"kind": "mseq", "degree": degree},
        "chip_rate_hz": 1.0e6,
        **overrides,
    })


@pytest.fixture
def config_factory():
    return make_config


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def zadoff_chu(length: int, root: int = 1) -> np.ndarray:
    i = np.arange(length)
    return np.exp(-1j * np.pi * root * i * (i + 1) / length)


@pytest.fixture
def flat_sequence_file(tmp_path):
    """Constant-magnitude spectrum sequence (63-sample Zadoff-Chu) stored as IQ."""
    from waveform.iq_files import IQMetadata, write_iq

    samples = zadoff_chu(63)
    return write_iq(tmp_path / "zc63.iq", samples, IQMetadata(role="sequence", n_samples=samples.size))
