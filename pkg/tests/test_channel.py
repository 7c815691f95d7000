import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wnoma.channel import (ClusterTopology, SingularChannelError, apply_channel, convolve_block,
                           default_gains_db, effective_link, effective_links, equalize_ls, equalize_mmse,
                           frequency_response, gen_channel, power_delay_profile, unity_channel, zf_precoder)
from wnoma.noma import pair_users
from conftest import crandn


def test_topology_requires_enough_antennas():
    assert ClusterTopology().users == 8
    with pytest.raises(ValueError):
        ClusterTopology(2, 4)


def test_pdp():
    assert np.array_equal(power_delay_profile("flat"), [1.0])
    p = power_delay_profile("exp4")
    assert p.size == 4 and p.sum() == pytest.approx(1) and np.all(np.diff(p) < 0)
    with pytest.raises(ValueError):
        power_delay_profile("bogus")
    with pytest.raises(ValueError):
        gen_channel(ClusterTopology(4, 2), [0.5, 0.2], seed=1)


def test_gain_groups():
    g = default_gains_db(ClusterTopology(8, 2), -10, -5)
    assert list(g) == [-10, -10, -5, -5]


def test_channel_statistics_and_seeding():
    topo = ClusterTopology(16, 4)
    chans = [gen_channel(topo, "exp4", seed=s) for s in range(300)]
    taps = np.stack([c.taps for c in chans])
    power = np.mean(np.abs(taps) ** 2, axis=(0, 2))  # (users, taps)
    expect = 10 ** (default_gains_db(topo) / 10)[:, None] * power_delay_profile("exp4")[None, :]
    assert np.allclose(power, expect, rtol=0.1)
    assert np.array_equal(gen_channel(topo, seed=7).taps, gen_channel(topo, seed=7).taps)
    assert not np.array_equal(gen_channel(topo, seed=7).taps, gen_channel(topo, seed=8).taps)


def test_zf_nulls_other_clusters_at_near_users(rng):
    h = crandn(rng, 4, 16)
    V = zf_precoder(h)
    assert np.allclose(np.linalg.norm(V, axis=0), 1)
    G = h @ V
    assert np.allclose(G - np.diag(np.diag(G)), 0, atol=1e-12)
    assert np.all(np.abs(np.diag(G)) > 0)


def test_zf_rejects_singular_and_tall(rng):
    h = crandn(rng, 1, 8)
    with pytest.raises(SingularChannelError):
        zf_precoder(np.vstack([h, h]))
    with pytest.raises(ValueError):
        zf_precoder(crandn(rng, 5, 3))


def test_effective_links_match_loop(rng):
    topo = ClusterTopology(8, 2)
    chan = gen_channel(topo, "exp4", seed=3)
    V = zf_precoder(chan.taps[[0, 1], :, 0])
    heff = effective_links(chan, V)
    for u in range(topo.users):
        for n in range(topo.clusters):
            ref = np.array([np.sum(chan.taps[u, :, l] * V[:, n]) for l in range(4)])
            assert np.allclose(heff[u, n], ref)
            assert np.allclose(effective_link(chan, V, n, u), ref)
    with pytest.raises(IndexError):
        effective_link(chan, V, 5, 0)


def test_unity_channel_links():
    topo = ClusterTopology(4, 2)
    pairing = pair_users(default_gains_db(topo))
    chan = unity_channel(topo, pairing)
    V = zf_precoder(chan.taps[list(pairing.near_users), :, 0])
    heff = effective_links(chan, V)[:, :, 0]
    for n, (a, b) in enumerate(pairing.pairs):
        assert heff[a, n] == pytest.approx(1) and heff[b, n] == pytest.approx(1)
        assert np.allclose(np.delete(heff[a], n), 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(8, 40), st.integers(0, 2**32 - 1))
def test_convolution_is_truncated_linear(n_taps, n, seed):
    rng = np.random.default_rng(seed)
    x, h = crandn(rng, n), crandn(rng, n_taps)
    assert np.allclose(convolve_block(x, h), np.convolve(x, h)[:n])


def test_noise_variance(rng):
    y = np.asarray(apply_channel(np.zeros(200_000), [1.0], noise_var=0.25, seed=4))
    assert np.mean(np.abs(y) ** 2) == pytest.approx(0.25, rel=0.02)
    assert abs(np.mean(y.real * y.imag)) < 0.005
    assert np.array_equal(np.asarray(apply_channel(np.ones(8), [1, 0.5])), convolve_block(np.ones(8), [1, 0.5]))
    with pytest.raises(ValueError):
        apply_channel(np.ones(4), [1.0], noise_var=-1)


def test_frequency_response_naive(rng):
    h = crandn(rng, 3)
    k = np.arange(16)
    ref = sum(h[l] * np.exp(-2j * np.pi * k * l / 16) for l in range(3))
    assert np.allclose(frequency_response(h, 16), ref)


def test_equalizers(rng):
    h = crandn(rng, 32)
    s = crandn(rng, 32)
    z, erased = equalize_ls(h * s, h)
    assert erased == 0 and np.allclose(z, s)
    h[3] = 0
    z, erased = equalize_ls(h * s, h)
    assert erased == 1 and z[3] == 0
    assert np.allclose(equalize_mmse(h * s, h, 0.0)[h != 0], s[h != 0])
    # MMSE shrinks toward zero as noise grows
    live = h != 0
    assert np.all(np.abs(equalize_mmse(h * s, h, 10.0))[live] <= np.abs(s[live]) + 1e-12)


def test_mmse_mse_below_ls_in_flat_rayleigh(rng):
    from wnoma.modem import constellation
    n = 100_000
    pts = constellation(16).points
    s = pts[rng.integers(0, 16, n)]
    h = crandn(rng, n) / np.sqrt(2)
    nv = 0.1
    y = h * s + np.sqrt(nv / 2) * crandn(rng, n)
    mse_ls = np.mean(np.abs(equalize_ls(y, h)[0] - s) ** 2)
    mse_mmse = np.mean(np.abs(equalize_mmse(y, h, nv) - s) ** 2)
    assert mse_mmse <= mse_ls
    assert np.allclose(equalize_mmse(2 * s[:4], 2.0, 0.0), s[:4])
