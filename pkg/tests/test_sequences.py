import numpy as np
import pytest

from core.errors import SequenceError
from sequences.mseq import PRIMITIVE_TAPS, default_mseq_spec, generate_mseq
from sequences.s_models import MSequenceSpec, SymbolSequence
from sequences.spectrum import band_limit, largest_half_lines, sequence_lines
from sequences.symbols import to_symbols, oversample, circular_autocorrelation, load_symbols
from waveform.dft import dft_direct
from waveform.iq_files import IQMetadata, write_iq


def test_degree_8_has_255_chips():
    bits = generate_mseq(default_mseq_spec(8))
    assert bits.size == 255
    assert set(np.unique(bits)) <= {0, 1}
    # m-sequence balance: one more 1 than 0
    assert int(bits.sum()) == 128


def test_degree_2_hand_enumerated():
    spec = MSequenceSpec(degree=2, feedback_taps=(2, 1), initial_state=(0, 1))
    bits = generate_mseq(spec).tolist()
    assert bits == [1, 0, 1]
    assert any(np.roll(bits, s).tolist() == [1, 1, 0] for s in range(3))


def test_reducible_polynomial_rejected():
    spec = MSequenceSpec(degree=8, feedback_taps=(8, 4), initial_state=(1,) * 8)
    with pytest.raises(SequenceError, match="observed period"):
        generate_mseq(spec)


@pytest.mark.parametrize("degree", sorted(PRIMITIVE_TAPS))
def test_builtin_taps_are_primitive(degree):
    bits = generate_mseq(default_mseq_spec(degree))
    assert bits.size == 2 ** degree - 1


@pytest.mark.parametrize("bad", [
    {"degree": 3, "feedback_taps": (3, 2), "initial_state": (0, 0, 0)},
    {"degree": 3, "feedback_taps": (2, 1), "initial_state": (1, 0, 0)},
    {"degree": 3, "feedback_taps": (3, 4), "initial_state": (1, 0, 0)},
    {"degree": 3, "feedback_taps": (3, 2), "initial_state": (1, 0)},
    {"degree": 1, "feedback_taps": (1,), "initial_state": (1,)},
])
def test_invalid_register_specs(bad):
    with pytest.raises(ValueError):
        MSequenceSpec(**bad)


def test_taps_are_canonical():
    spec = MSequenceSpec(degree=5, feedback_taps=[3, 5, 3], initial_state=(1, 0, 0, 0, 0))
    assert spec.feedback_taps == (5, 3)


def test_antipodal_mapping():
    seq = to_symbols(np.array([1, 1, 0]), 1.0)
    np.testing.assert_array_equal(seq.symbols, [-1, -1, 1])


def test_all_zero_bits_map_to_ones():
    seq = to_symbols(np.zeros(4, dtype=int), 1.0)
    np.testing.assert_array_equal(seq.symbols, [1, 1, 1, 1])


def test_empty_bits_rejected():
    with pytest.raises(SequenceError):
        to_symbols(np.array([], dtype=int), 1.0)


def test_zero_symbols_rejected():
    with pytest.raises(SequenceError, match="identically zero"):
        SymbolSequence(np.zeros(5), 1.0)


def test_mulhouse_period():
    seq = to_symbols(generate_mseq(default_mseq_spec(8)), 12.5e6)
    assert seq.period_s == pytest.approx(20.4e-6, rel=1e-12)


@pytest.mark.parametrize("degree", [3, 5, 8])
def test_autocorrelation_is_two_valued(degree):
    seq = to_symbols(generate_mseq(default_mseq_spec(degree)), 1.0)
    corr = circular_autocorrelation(seq)
    length = 2 ** degree - 1
    assert corr[0].real == pytest.approx(length, abs=1e-9)
    np.testing.assert_allclose(corr[1:], -1.0, atol=1e-9)


def test_autocorrelation_matches_brute_force():
    seq = to_symbols(generate_mseq(default_mseq_spec(3)), 1.0)
    s = seq.symbols
    brute = [np.sum(np.roll(s, -lag) * np.conj(s)) for lag in range(s.size)]
    np.testing.assert_allclose(circular_autocorrelation(seq), brute, atol=1e-12)


def test_single_symbol_autocorrelation():
    np.testing.assert_allclose(circular_autocorrelation(SymbolSequence(np.array([1.0]), 1.0)), [1.0])


def test_flat_sequence_band_limit_rejected():
    seq = SymbolSequence(np.ones(4), 1.0)
    with pytest.raises(SequenceError, match="below floor"):
        band_limit(seq, 2)


def test_short_mseq_lines_match_direct_dft():
    seq = to_symbols(generate_mseq(default_mseq_spec(3)), 1.0)
    comb = band_limit(seq, 3)
    assert comb.lines.size == 6
    direct = dft_direct(seq.symbols)
    np.testing.assert_allclose(comb.lines, direct[np.arange(-3, 3) % 7], atol=1e-12)
    assert comb.band_hz == pytest.approx(6 / 7.0)


def test_band_wider_than_sequence_rejected():
    seq = to_symbols(generate_mseq(default_mseq_spec(3)), 1.0)
    with pytest.raises(SequenceError):
        sequence_lines(seq, 4)


def test_largest_band_of_mseq():
    seq = to_symbols(generate_mseq(default_mseq_spec(8)), 12.5e6)
    assert largest_half_lines(seq) == 127


def test_oversampling_keeps_period_and_repeats_lines():
    seq = to_symbols(generate_mseq(default_mseq_spec(6)), 1e6)
    stuffed = oversample(seq, 2)
    assert stuffed.period_chips == 126
    assert stuffed.period_s == pytest.approx(seq.period_s)
    np.testing.assert_array_equal(stuffed.symbols[1::2], 0)
    np.testing.assert_allclose(sequence_lines(stuffed, 31), sequence_lines(seq, 31) / 2, atol=1e-15)
    assert largest_half_lines(stuffed) == 63
    assert oversample(seq, 1) is seq


def test_symbols_from_iq_file(tmp_path):
    samples = np.exp(2j * np.pi * np.arange(7) / 7)
    path = write_iq(tmp_path / "seq.iq", samples, IQMetadata(role="sequence", n_samples=7))
    seq = load_symbols(path, 2e6)
    np.testing.assert_array_equal(seq.symbols, samples)
    assert seq.period_s == pytest.approx(3.5e-6)
