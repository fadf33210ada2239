import numpy as np
import pytest

from core.configs import preset_config, config_from_dict
from core.errors import EstimationError
from channel.acquisition import branch_comb, simulate_acquisition
from channel.ch_models import TapProfile
from channel.random_profiles import random_profile
from channel.taps import transfer_function, oracle_for_comb
from estimation.analysis import analyze, extract_lines, comb_bins
from estimation.correlation import correlate_estimate, correlation_lines
from estimation.e_models import CalibrationRecord, EstimationMethod
from estimation.inversion import wiener_invert, apply_calibration, measure_calibration
from estimation.pipeline import estimate_all, inversion_lines, channel_lines
from estimation.timedomain import to_time, correct_ramp, phase_ramp
from evaluation.metrics import nmse_db
from evaluation.save_results import dump_calibration, read_calibration
from waveform.dft import dft_direct
from waveform.synthesis import synthesize
from waveform.w_models import BasebandSignal, SpectralComb


def _profiles(rng, config):
    return [random_profile(rng, config.period_s, label=n) for n in range(1, config.p + 1)]


def _oracle(config, n, profile):
    return oracle_for_comb(profile, branch_comb(config, n))


def test_constant_signal_spectrum():
    spectrum = analyze(BasebandSignal(np.ones(8), 8.0, 1.0))
    assert spectrum.at(np.array([0]))[0] == pytest.approx(1.0)
    others = np.delete(spectrum.bins, -spectrum.first_index)
    assert np.max(np.abs(others)) <= 1e-12


def test_single_offset_line_lands_on_one_bin():
    half, period = 4, 1e-3
    lines = np.zeros(2 * half)
    lines[half + 2] = 1.0  # k = 2
    comb = SpectralComb(lines, period, offset_index=1, comb_modulus=2)
    signal = synthesize(comb, comb.band_hz, 2 * period)
    spectrum = analyze(signal)
    peak = np.argmax(np.abs(spectrum.bins)) + spectrum.first_index
    assert peak == 2 * 2 + 1
    assert np.sum(np.abs(spectrum.bins) > 1e-12) == 1


def test_mulhouse_odd_bins_carry_second_channel():
    config = preset_config("mulhouse")
    record = simulate_acquisition(config, [TapProfile.silent_profile(1), TapProfile.identity(2)])
    spectrum = analyze(record, config)
    np.testing.assert_allclose(
        spectrum.bins, np.fft.fftshift(dft_direct(record.samples)), atol=1e-12
    )
    even = extract_lines(spectrum, 1, config)
    odd = extract_lines(spectrum, 2, config)
    assert np.max(np.abs(even)) <= 1e-12 * np.max(np.abs(odd))
    np.testing.assert_allclose(odd, config.base_comb().lines, atol=1e-12)


def test_length_mismatch_rejected(config_factory):
    config = config_factory(p=2)
    with pytest.raises(EstimationError, match="does not match"):
        analyze(BasebandSignal(np.ones(62), config.sample_rate, config.period_s), config)


@pytest.mark.parametrize("p,n,residue", [(2, 1, 0), (2, 2, 1), (3, 2, 1), (4, 4, 3)])
def test_channel_bins(config_factory, p, n, residue):
    bins = comb_bins(n, config_factory(p=p))
    assert np.all(bins % p == residue)
    assert np.all(np.diff(bins) == p)


def test_channel_index_bounds(config_factory):
    with pytest.raises(EstimationError):
        comb_bins(3, config_factory(p=2))


def test_inversion_of_identity_and_gain(config_factory):
    s = config_factory(p=1).base_comb().lines
    np.testing.assert_allclose(wiener_invert(s, s, 1e-12), 1.0, rtol=1e-15)
    g = 0.2 + 0.9j
    np.testing.assert_allclose(wiener_invert(g * s, s, 1e-12), g, rtol=1e-14)


def test_inversion_recovers_two_tap_transfer_function(config_factory):
    config = config_factory(p=2)
    comb = branch_comb(config, 2)
    profile = TapProfile.from_taps([(0.0, 1.0), (0.21 * config.period_s, -0.4 + 0.2j)])
    h = transfer_function(profile, comb.frequencies_hz)
    np.testing.assert_allclose(wiener_invert(comb.lines * h, comb.lines, 1e-12), h, rtol=1e-12)


def test_weak_emitted_line_rejected_with_its_index():
    s = np.ones(8, dtype=complex)
    s[5] = 1e-14
    with pytest.raises(EstimationError, match=r"k=\[1\]"):
        wiener_invert(s, s, 1e-9)


def test_ridge_variant(config_factory):
    s = config_factory(p=1).base_comb().lines
    r = s * 0.5
    out = wiener_invert(r, s, 1e-12, ridge=1e-3)
    np.testing.assert_allclose(out, np.conj(s) * r / (np.abs(s) ** 2 + 1e-3))


def test_calibration_identity_and_self():
    h = np.linspace(1, 2, 6) * np.exp(1j * np.arange(6))
    np.testing.assert_allclose(apply_calibration(h, CalibrationRecord.flat(6, 1), 1), h)
    self_cal = CalibrationRecord({1: h})
    np.testing.assert_allclose(apply_calibration(h, self_cal, 1), np.abs(h).mean())


def test_weak_calibration_line_rejected():
    ref = np.ones(6, dtype=complex)
    ref[0] = 0.0
    with pytest.raises(EstimationError, match="calibration channel 1"):
        apply_calibration(np.ones(6), CalibrationRecord({1: ref}), 1)


def _filter_config(p):
    base = config_from_dict({"p": p, "sequence": {"kind": "mseq", "degree": 6}, "chip_rate_hz": 1.0e6})
    d = base.period_s / base.n_lines
    return base.updated(equipment_filter=[
        {"delay_s": 0.0, "gain_re": 0.15},
        {"delay_s": d, "gain_re": 1.0},
        {"delay_s": 2 * d, "gain_re": 0.15},
    ])


@pytest.mark.parametrize("p", [1, 2, 3])
def test_calibration_removes_equipment_filter(rng, p):
    config = _filter_config(p)
    cal = measure_calibration(config)
    profiles = _profiles(rng, config)
    estimates = estimate_all(simulate_acquisition(config, profiles), cal, config)
    for est, profile in zip(estimates, profiles):
        assert nmse_db(est.samples, _oracle(config, est.channel_index, profile)) <= -200


def test_calibration_ignores_receiver_noise_and_offset():
    config = _filter_config(2)
    noisy = config.updated(snr_db=5.0, timing_offset_s=config.period_s / 4)
    quiet = measure_calibration(config)
    cal = measure_calibration(noisy, seed=9)
    for n in (1, 2):
        np.testing.assert_array_equal(cal.for_channel(n), quiet.for_channel(n))


def test_uncalibrated_filter_is_visible(rng):
    config = _filter_config(2)
    profiles = _profiles(rng, config)
    est = estimate_all(simulate_acquisition(config, profiles), None, config)[0]
    assert nmse_db(est.samples, _oracle(config, 1, profiles[0])) > -20


def test_calibration_file_round_trip(tmp_path):
    config = _filter_config(2)
    cal = measure_calibration(config)
    path = dump_calibration(tmp_path / "calibration.iq", cal, config)
    back = read_calibration(path, config)
    for n in (1, 2):
        assert back.for_channel(n).tobytes() == cal.for_channel(n).tobytes()


def test_time_domain_of_identity(config_factory):
    config = config_factory(p=2)
    for n in (1, 2):
        est = to_time(np.ones(config.n_lines), n, config)
        assert not est.ramp_corrected
        assert est.samples[0] == pytest.approx(1.0)
        np.testing.assert_allclose(est.samples[1:], 0, atol=1e-15)


def test_time_domain_of_zero_lines(config_factory):
    config = config_factory(p=2)
    np.testing.assert_array_equal(to_time(np.zeros(config.n_lines), 2, config).samples, 0)


def test_time_domain_needs_all_lines(config_factory):
    config = config_factory(p=2)
    with pytest.raises(EstimationError):
        to_time(np.ones(config.n_lines - 2), 1, config)


def test_second_channel_carries_ramp(config_factory):
    config = config_factory(p=2)
    profile = TapProfile.from_taps([(0.3 * config.period_s / config.n_lines, 1.0)])
    record = simulate_acquisition(config, [TapProfile.silent_profile(1), profile])
    raw = to_time(inversion_lines(record, 2, config), 2, config)
    oracle = _oracle(config, 2, profile)
    i = np.arange(config.n_lines)
    np.testing.assert_allclose(raw.samples, oracle * np.exp(-1j * np.pi * i / config.n_lines), atol=1e-12)


def test_ramp_correction(config_factory):
    config = config_factory(p=2)
    first = to_time(np.ones(config.n_lines), 1, config)
    np.testing.assert_array_equal(correct_ramp(first, config).samples, first.samples)

    corrected = correct_ramp(to_time(np.ones(config.n_lines), 2, config), config)
    assert corrected.ramp_corrected
    assert np.max(np.abs(corrected.samples.imag)) <= 1e-12
    with pytest.raises(EstimationError, match="already ramp-corrected"):
        correct_ramp(corrected, config)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_ramp_law(config_factory, rng, p):
    config = config_factory(p=p)
    profiles = _profiles(rng, config)
    record = simulate_acquisition(config, profiles)
    for n in range(2, p + 1):
        raw = to_time(inversion_lines(record, n, config), n, config)
        corrected = correct_ramp(raw, config)
        oracle = _oracle(config, n, profiles[n - 1])
        mask = np.abs(oracle) > 1e-8 * np.abs(oracle).max()
        phase_error = np.angle(raw.samples[mask] / corrected.samples[mask] / phase_ramp(n, p, config.n_lines)[mask])
        assert np.max(np.abs(phase_error)) <= 1e-10


def test_half_exponent_ramp_does_not_round_trip(config_factory, rng):
    config = config_factory(p=2)
    profiles = _profiles(rng, config)
    raw = to_time(inversion_lines(simulate_acquisition(config, profiles), 2, config), 2, config)
    t_over_pt = np.arange(config.n_lines) / (2 * config.n_lines)
    half_exponent = raw.samples * np.exp(1j * np.pi * t_over_pt)
    assert nmse_db(half_exponent, _oracle(config, 2, profiles[1])) > -60


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_noiseless_round_trip(config_factory, p):
    config = config_factory(p=p)
    rng = np.random.default_rng(100 + p)
    for _ in range(50):
        profiles = _profiles(rng, config)
        estimates = estimate_all(simulate_acquisition(config, profiles), None, config)
        assert len(estimates) == p
        for est, profile in zip(estimates, profiles):
            oracle = _oracle(config, est.channel_index, profile)
            assert est.ramp_corrected
            assert nmse_db(est.samples, oracle) <= -200
            assert np.max(np.abs(est.samples - oracle)) <= 1e-10 * np.max(np.abs(oracle))


def test_four_tap_profile_on_second_comb(config_factory, rng):
    config = config_factory(p=2)
    profile = TapProfile.from_taps([
        (0.05 * config.period_s, 1.0), (0.11 * config.period_s, 0.5j),
        (0.42 * config.period_s, -0.3), (0.7 * config.period_s, 0.1 + 0.1j),
    ])
    est = estimate_all(simulate_acquisition(config, [profile, profile]), None, config)[1]
    oracle = _oracle(config, 2, profile)
    assert np.max(np.abs(est.samples - oracle)) <= 1e-10 * np.max(np.abs(oracle))


@pytest.mark.parametrize("p", [2, 3])
def test_crosstalk_floor(config_factory, rng, p):
    config = config_factory(p=p)
    active = random_profile(rng, config.period_s)
    profiles = [active] + [TapProfile.silent_profile(n) for n in range(2, p + 1)]
    estimates = estimate_all(simulate_acquisition(config, profiles), None, config)
    active_peak = np.max(np.abs(estimates[0].samples))
    for est in estimates[1:]:
        assert 20 * np.log10(np.max(np.abs(est.samples)) / active_peak + 1e-300) <= -200


def _colocated(config, profile):
    copies = [TapProfile(profile.delays, profile.gains, n) for n in range(1, config.p + 1)]
    return estimate_all(simulate_acquisition(config, copies), None, config)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_colocated_transmitters_agree_on_grid_delays(config_factory, rng, p):
    config = config_factory(p=p)
    step = config.period_s / config.n_lines
    for _ in range(10):
        estimates = _colocated(config, random_profile(rng, config.period_s, grid_step_s=step))
        reference = estimates[0].samples
        for est in estimates[1:]:
            assert np.max(np.abs(est.samples - reference)) <= 1e-10 * np.max(np.abs(reference))


def test_colocated_off_grid_delay_differs_per_comb(config_factory):
    config = config_factory(p=2)
    step = config.period_s / config.n_lines
    profile = TapProfile.from_taps([(10.5 * step, 1.0)])
    first, second = _colocated(config, profile)
    deviation = np.max(np.abs(second.samples - first.samples)) / np.max(np.abs(first.samples))
    assert deviation > 1e-2
    # each comb still matches the response seen on its own lines
    for est in (first, second):
        oracle = _oracle(config, est.channel_index, profile)
        assert nmse_db(est.samples, oracle) <= -200


def test_comb_isolation(config_factory, rng):
    config = config_factory(p=3)
    profiles = _profiles(rng, config)
    full = simulate_acquisition(config, profiles)
    alone = simulate_acquisition(config, [profiles[0]] + [TapProfile.silent_profile(n) for n in (2, 3)])
    with_all = inversion_lines(full, 1, config)
    only = inversion_lines(alone, 1, config)
    assert np.max(np.abs(with_all - only)) <= 1e-12 * np.max(np.abs(only))


@pytest.mark.parametrize("n", [1, 2])
def test_common_delay_shifts_estimate(config_factory, rng, n):
    config = config_factory(p=2)
    d = 5
    profile = random_profile(rng, config.period_s, max_spread=0.5)
    delayed = profile.delayed(d * config.period_s / config.n_lines)
    profiles = [TapProfile.silent_profile(m) for m in range(1, 3)]

    profiles[n - 1] = profile
    before = estimate_all(simulate_acquisition(config, profiles), None, config)[n - 1].samples
    profiles[n - 1] = delayed
    after = estimate_all(simulate_acquisition(config, profiles), None, config)[n - 1].samples

    expected = np.roll(before, d)
    expected[:d] *= np.exp(-2j * np.pi * (n - 1) / config.p)
    assert np.max(np.abs(after - expected)) <= 1e-10 * np.max(np.abs(before))


def test_scaling_one_branch_scales_only_its_estimate(config_factory, rng):
    config = config_factory(p=3)
    profiles = _profiles(rng, config)
    g = 0.4 - 1.1j
    before = estimate_all(simulate_acquisition(config, profiles), None, config)
    scaled = list(profiles)
    scaled[1] = profiles[1].scaled(g)
    after = estimate_all(simulate_acquisition(config, scaled), None, config)
    np.testing.assert_allclose(after[1].samples, g * before[1].samples, atol=1e-12)
    for m in (0, 2):
        np.testing.assert_allclose(after[m].samples, before[m].samples, atol=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_correlation_lines_are_weighted_inversion_lines(config_factory, rng, p):
    config = config_factory(p=p)
    record = simulate_acquisition(config, _profiles(rng, config))
    weight = np.abs(config.base_comb().lines) ** 2
    for n in range(1, p + 1):
        expected = inversion_lines(record, n, config) * weight
        got = correlation_lines(record, n, config)
        np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))


def test_flat_comb_methods_agree_up_to_scale(flat_sequence_file, rng):
    config = config_from_dict({
        "p": 2,
        "sequence": {"kind": "iq_file", "iq_path": str(flat_sequence_file)},
        "chip_rate_hz": 1.0e6,
    })
    record = simulate_acquisition(config, _profiles(rng, config))
    for n in (1, 2):
        inv = estimate_all(record, None, config, EstimationMethod.INVERSION)[n - 1].samples
        cor = correlate_estimate(record, n, config).samples
        scale = np.vdot(inv, cor).real / np.vdot(inv, inv).real
        assert scale > 0
        assert np.max(np.abs(cor / scale - inv)) <= 1e-10 * np.max(np.abs(inv))


def test_correlation_peak_at_tap(config_factory):
    config = config_factory(p=2)
    i0 = 17
    profile = TapProfile.from_taps([(i0 * config.period_s / config.n_lines, 1.0)])
    record = simulate_acquisition(config, [TapProfile.silent_profile(1), profile])
    est = correlate_estimate(record, 2, config)
    assert est.method is EstimationMethod.CORRELATION
    assert int(np.argmax(np.abs(est.samples))) == i0


def test_correlation_of_silent_channel(config_factory, rng):
    config = config_factory(p=2)
    record = simulate_acquisition(config, [random_profile(rng, config.period_s), TapProfile.silent_profile(2)])
    estimates = estimate_all(record, None, config, EstimationMethod.CORRELATION)
    assert np.max(np.abs(estimates[1].samples)) <= 1e-10 * np.max(np.abs(estimates[0].samples))


def test_channel_lines_with_calibration(config_factory, rng):
    config = config_factory(p=2)
    record = simulate_acquisition(config, _profiles(rng, config))
    flat = CalibrationRecord.flat(config.n_lines, config.p)
    np.testing.assert_allclose(
        channel_lines(record, 2, config, cal=flat), channel_lines(record, 2, config), rtol=1e-15
    )


def test_fingerprint_mismatch_rejected(config_factory):
    config = config_factory(p=2)
    record = simulate_acquisition(config, [TapProfile.identity(1), TapProfile.identity(2)])
    with pytest.raises(EstimationError, match="fingerprint"):
        estimate_all(record, None, config.updated(line_floor_rel=1e-8))


def test_noise_scaling(config_factory):
    profiles = [TapProfile.from_taps([(0.0, 1.0), (9e-6, 0.5j)], 1), TapProfile.from_taps([(3e-6, 0.8)], 2)]
    levels = []
    for snr_db in (10.0, 20.0, 30.0, 40.0):
        config = config_factory(p=2, snr_db=snr_db)
        oracles = [_oracle(config, n, pr) for n, pr in enumerate(profiles, start=1)]
        ratios = []
        for seed in range(100):
            estimates = estimate_all(simulate_acquisition(config, profiles, seed), None, config)
            ratios += [
                np.sum(np.abs(e.samples - o) ** 2) / np.sum(np.abs(o) ** 2) for e, o in zip(estimates, oracles)
            ]
        levels.append(10 * np.log10(np.mean(ratios)))
    steps = np.diff(levels)
    assert np.all(steps < 0)
    np.testing.assert_allclose(steps, -10.0, atol=2.0)
