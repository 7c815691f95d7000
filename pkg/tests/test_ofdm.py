import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wnoma.channel import apply_channel, frequency_response
from wnoma.ofdm import OfdmConfig, dft, idft, ofdm_demodulate, ofdm_modulate, oversampled_modulate
from conftest import crandn


def naive_dft(x):
    n = len(x)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ x / np.sqrt(n)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_dft_matches_naive_sum(n, rng):
    x = crandn(rng, n)
    assert np.max(np.abs(dft(x) - naive_dft(x))) < 1e-10
    assert np.max(np.abs(idft(dft(x)) - x)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 9), st.integers(0, 2**32 - 1))
def test_dft_unitary(log_n, seed):
    x = crandn(np.random.default_rng(seed), 2 ** log_n)
    assert np.sum(np.abs(dft(x)) ** 2) == pytest.approx(np.sum(np.abs(x) ** 2), rel=1e-10)


def test_non_power_of_two_rejected():
    with pytest.raises(ValueError):
        dft(np.ones(12))
    with pytest.raises(ValueError):
        OfdmConfig(100, 20)


def test_cp_from_ratio():
    cfg = OfdmConfig.from_ratio(256, 0.2)
    assert cfg.cp_len == 64
    assert cfg.block_len == 320
    assert cfg.overhead == pytest.approx(0.2)


def test_prefix_copies_tail_and_roundtrip(rng):
    cfg = OfdmConfig(64, 16)
    s = crandn(rng, 64)
    x = np.asarray(ofdm_modulate(s, cfg))
    assert x.size == 80
    assert np.array_equal(x[:16], x[-16:])
    assert np.allclose(np.asarray(ofdm_demodulate(x, cfg)), s)


def test_unit_subcarrier_is_a_complex_exponential():
    cfg = OfdmConfig(16, 4)
    s = np.zeros(16, complex)
    s[3] = 1
    body = np.asarray(ofdm_modulate(s, cfg))[4:]
    assert np.allclose(body, np.exp(2j * np.pi * 3 * np.arange(16) / 16) / 4)


def test_cp_turns_multipath_into_one_tap_per_bin(rng):
    cfg = OfdmConfig(64, 8)
    taps = crandn(rng, 5)
    s = crandn(rng, 3, 64)
    x = np.asarray(ofdm_modulate(s, cfg))
    y = np.asarray(apply_channel(x, taps))
    # a previous block would leak in through the delay line; the CP absorbs it
    z = np.asarray(ofdm_demodulate(y, cfg))
    assert np.allclose(z, frequency_response(taps, 64) * s, atol=1e-10)


def test_oversampled_body_is_interpolation(rng):
    cfg = OfdmConfig(16, 4)
    s = crandn(rng, 16)
    x1 = np.asarray(ofdm_modulate(s, cfg))
    x4 = oversampled_modulate(s, cfg, 4)
    assert x4.shape[-1] == 4 * cfg.block_len
    # every fourth sample of the interpolated body equals the critical-rate body
    # up to the amplitude 1/sqrt(4) of the larger unitary IFFT and the (-1)^n
    # from moving symbol k to frequency k - Q/2
    sign = (-1.0) ** np.arange(16)
    assert np.allclose(x4[16::4] * 2 * sign, x1[4:])
