import numpy as np
import pytest

from core.configs import preset_config
from core.errors import ChannelError
from channel.acquisition import branch_comb, emitted_signal, received_branch, simulate_acquisition
from channel.ch_models import TapProfile, AcquisitionRecord
from channel.noise import add_awgn
from channel.random_profiles import random_profile
from channel.taps import transfer_function, apply_channel, apply_delay, oracle_ir, oracle_for_comb
from waveform.comb import apply_comb_offset
from waveform.w_models import BasebandSignal


def test_identity_channel_keeps_comb(config_factory):
    comb = branch_comb(config_factory(p=2), 2)
    out = apply_channel(comb, TapProfile.identity())
    np.testing.assert_array_equal(out.lines, comb.lines)


def test_single_delay_is_pure_phase(config_factory):
    config = config_factory(p=2)
    comb = branch_comb(config, 2)
    tau = 0.37 * config.period_s
    out = apply_channel(comb, TapProfile.from_taps([(tau, 1.0)]))
    np.testing.assert_allclose(np.abs(out.lines), np.abs(comb.lines), rtol=1e-12)
    np.testing.assert_allclose(out.lines, comb.lines * np.exp(-2j * np.pi * comb.frequencies_hz * tau), rtol=1e-12)


def test_two_taps_in_opposition_double_the_line():
    f = 250e3
    profile = TapProfile.from_taps([(0.0, 1.0), (1 / (2 * f), -1.0)])
    assert transfer_function(profile, np.array([f]))[0] == pytest.approx(2.0, abs=1e-12)


def test_delay_beyond_period_rejected(config_factory):
    config = config_factory(p=2)
    with pytest.raises(ChannelError, match="alias"):
        apply_channel(branch_comb(config, 1), TapProfile.from_taps([(config.period_s, 1.0)]))


def test_timing_offset_outside_period_rejected(config_factory):
    config = config_factory(p=2)
    with pytest.raises(ChannelError):
        apply_delay(branch_comb(config, 1), 1.5 * config.period_s)


def test_profile_invariants():
    with pytest.raises(ChannelError, match="silent=True"):
        TapProfile.from_taps([(0.0, 0.0)])
    with pytest.raises(ChannelError):
        TapProfile.from_taps([(-1e-9, 1.0)])
    assert TapProfile.silent_profile().is_silent
    assert TapProfile.identity().scaled(0).is_silent


@pytest.mark.parametrize("n", [1, 2])
def test_identity_oracle_is_unit_pulse_at_zero(config_factory, n):
    config = config_factory(p=2)
    oracle = oracle_for_comb(TapProfile.identity(), branch_comb(config, n))
    assert oracle[0] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(oracle[1:], 0, atol=1e-12)


def test_on_grid_tap_oracle_weight(config_factory):
    config = config_factory(p=1)
    g, i0 = 0.6 - 0.3j, 7
    profile = TapProfile.from_taps([(i0 / config.sample_rate, g)])
    oracle = oracle_ir(profile, branch_comb(config, 1).frequencies_hz, config.sample_rate)
    assert oracle[i0] == pytest.approx(g, abs=1e-12)
    assert np.max(np.abs(np.delete(oracle, i0))) <= 1e-12


def test_silent_oracle_is_zero(config_factory):
    oracle = oracle_for_comb(TapProfile.silent_profile(), branch_comb(config_factory(p=2), 2))
    np.testing.assert_array_equal(oracle, 0)


def test_oracle_is_linear(config_factory, rng):
    config = config_factory(p=3)
    comb = branch_comb(config, 3)
    a = random_profile(rng, config.period_s)
    b = random_profile(rng, config.period_s)
    np.testing.assert_allclose(
        oracle_for_comb(a.merged(b), comb),
        oracle_for_comb(a, comb) + oracle_for_comb(b, comb),
        atol=1e-12,
    )


def test_offset_and_channel_commute(config_factory, rng):
    config = config_factory(p=3)
    base = config.base_comb()
    profile = random_profile(rng, config.period_s)
    shifted = apply_comb_offset(base, 2, 3)
    filtered_then_lines = apply_channel(shifted, profile).lines
    expected = base.lines * transfer_function(profile, base.frequencies_hz + config.offset_hz(2))
    np.testing.assert_allclose(filtered_then_lines, expected, rtol=1e-12, atol=1e-15)


def test_awgn_none_and_inf_leave_signal(config_factory):
    x = emitted_signal(config_factory(p=1), 1)
    assert add_awgn(x, None, 0) is x
    assert add_awgn(x, float("inf"), 0) is x


def test_awgn_is_deterministic(config_factory):
    x = emitted_signal(config_factory(p=1), 1)
    np.testing.assert_array_equal(add_awgn(x, 10.0, 42).samples, add_awgn(x, 10.0, 42).samples)
    assert not np.array_equal(add_awgn(x, 10.0, 42).samples, add_awgn(x, 10.0, 43).samples)


def test_awgn_power_at_zero_db():
    n = 100_000
    x = BasebandSignal(np.ones(n, dtype=np.complex128), 1.0, float(n))
    noisy = add_awgn(x, 0.0, 7)
    assert np.mean(np.abs(noisy.samples - x.samples) ** 2) == pytest.approx(1.0, rel=0.05)


def test_awgn_on_silence_rejected():
    with pytest.raises(ChannelError, match="zero-power"):
        add_awgn(BasebandSignal(np.zeros(8), 8.0, 1.0), 20.0, 0)


@pytest.mark.parametrize("snr_db", [float("nan"), float("-inf")])
def test_awgn_non_finite_snr_rejected(config_factory, snr_db):
    x = emitted_signal(config_factory(p=1), 1)
    with pytest.raises(ChannelError, match="finite"):
        add_awgn(x, snr_db, 0)


def test_mulhouse_record_length():
    record = simulate_acquisition(preset_config("mulhouse"), [TapProfile.identity(1), TapProfile.identity(2)])
    assert len(record) == 1020
    assert record.comb_modulus == 2


def test_single_identity_branch_is_bare_sounder(config_factory):
    config = config_factory(p=1)
    record = simulate_acquisition(config, [TapProfile.identity()])
    np.testing.assert_allclose(record.samples, emitted_signal(config, 1).samples, atol=1e-12)
    assert record.noise_seed is None


def test_silent_second_branch_leaves_first(config_factory, rng):
    config = config_factory(p=2)
    profile = random_profile(rng, config.period_s)
    record = simulate_acquisition(config, [profile, TapProfile.silent_profile(2)])
    np.testing.assert_allclose(record.samples, received_branch(config, 1, profile).samples, atol=1e-12)


def test_wrong_profile_count_rejected(config_factory):
    with pytest.raises(ChannelError, match="expected 2"):
        simulate_acquisition(config_factory(p=2), [TapProfile.identity()])


def test_composite_energy_is_sum_of_branches(config_factory, rng):
    config = config_factory(p=3)
    profiles = [random_profile(rng, config.period_s, label=n) for n in range(1, 4)]
    branches = [received_branch(config, n, pr) for n, pr in enumerate(profiles, start=1)]
    record = simulate_acquisition(config, profiles)
    total = np.sum(np.abs(record.samples) ** 2)
    assert total == pytest.approx(sum(np.sum(np.abs(b.samples) ** 2) for b in branches), rel=1e-10)


def test_noisy_record_carries_seed(config_factory):
    config = config_factory(p=2, snr_db=20.0)
    record = simulate_acquisition(config, [TapProfile.identity(1), TapProfile.identity(2)], seed=9)
    assert record.noise_seed == 9
    assert record.snr_db == 20.0
    assert record.fingerprint == config.estimator_fingerprint


def test_record_length_checked(config_factory):
    config = config_factory(p=2)
    with pytest.raises(ValueError):
        AcquisitionRecord(np.zeros(10), config.sample_rate, config.acquisition_span_s, 2)


def test_random_profile_bounds(rng):
    for _ in range(50):
        profile = random_profile(rng, 1e-5)
        assert 1 <= profile.n_taps <= 6
        assert profile.max_delay < 0.8e-5


def test_random_profile_on_grid(rng):
    step = 1e-5 / 62
    for _ in range(50):
        profile = random_profile(rng, 1e-5, grid_step_s=step)
        units = profile.delays / step
        np.testing.assert_allclose(units, np.round(units), atol=1e-9)
        assert len(np.unique(np.round(units))) == profile.n_taps
        assert profile.max_delay < 0.8e-5
