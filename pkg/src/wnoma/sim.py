"""Monte Carlo drivers for the SER, PAPR, PSD and sum-rate experiments.

Every random draw comes from a generator seeded by
``derive_seed(master, trial, tag)``. Nothing else (SNR point, back-end,
beta, worker count) enters the seed, so all arms of a panel share data,
channel and noise realizations and results do not depend on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .channel import (cn, effective_links, frequency_response, gen_channel, unity_channel,
                      default_gains_db, equalize_ls, equalize_mmse, zf_precoder)
from .config import SimConfig, noise_var_from_snr
from .metrics import (MetricRecord, compute_papr, estimate_psd, papr_ccdf, spectral_efficiency_index,
                      sum_rate)
from .modem import constellation
from .noma import decode_far_indices, pair_users, sic_decode_near_indices
from .ofdm import dft, idft, ofdm_demodulate, ofdm_modulate, oversampled_modulate
from .wavelets import dwt_analyze, interpolate, pulse_peak, wavelet_modulate

MASK64 = (1 << 64) - 1
CHUNK_TRIALS = 8


class Stream(IntEnum):
    CHANNEL = 1
    NOISE = 2
    DATA = 3
    CSI = 4


@dataclass(frozen=True)
class TrialSeed:
    master: int
    trial: int
    tag: Stream


def _splitmix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(ts: TrialSeed | int, trial: int | None = None, tag: int | None = None) -> int:
    """64-bit seed ``splitmix(splitmix(splitmix(master) ^ tag) + trial)``.

    ``splitmix`` is the SplitMix64 finalizer, a bijection on 64-bit words, so
    for a fixed master and tag distinct trial indices never collide.
    """
    if not isinstance(ts, TrialSeed):
        ts = TrialSeed(ts, trial, tag)
    base = _splitmix(_splitmix(ts.master & MASK64) ^ int(ts.tag))
    return _splitmix((base + ts.trial) & MASK64)


def rng_for(master: int, trial: int, tag: Stream) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, trial, tag))


def worker_count(requested: int | None = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("WNOMA_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


# -- transmit / receive chains ------------------------------------------------------------

def tx_amplitude(cfg: SimConfig) -> float:
    """Per-sample amplitude that keeps the energy per data symbol at 1.

    The CP-OFDM block spends part of that energy on the prefix.
    """
    if cfg.backend == "fft":
        return float(np.sqrt(cfg.ofdm.subcarriers / cfg.ofdm.block_len))
    return 1.0


def modulate(cfg: SimConfig, symbols) -> np.ndarray:
    """Back-end modulation of ``(..., N)`` symbols, scaled by :func:`tx_amplitude`."""
    if cfg.backend == "fft":
        x = np.asarray(ofdm_modulate(symbols, cfg.ofdm))
    else:
        x = np.asarray(wavelet_modulate(symbols, cfg.wavelet, cfg.block_size))
    return tx_amplitude(cfg) * x


def block_len(cfg: SimConfig) -> int:
    return cfg.ofdm.block_len if cfg.backend == "fft" else cfg.block_size


def demodulate(cfg: SimConfig, rx, taps, noise_var: float) -> np.ndarray:
    """Equalize per frequency bin and demodulate to the symbol domain.

    ``taps`` is the own-cluster effective channel ``(..., L)``; the transmit
    amplitude is folded into the per-bin gain.
    """
    n = cfg.block_size
    h = tx_amplitude(cfg) * frequency_response(taps, n)
    body = rx[..., cfg.ofdm.cp_len:] if cfg.backend == "fft" else rx
    y = dft(body)
    if cfg.equalizer == "ls":
        y, _ = equalize_ls(y, h)
    else:
        y = equalize_mmse(y, h, noise_var)
    if cfg.backend == "fft":
        return y
    return dwt_analyze(idft(y), cfg.wavelet).flatten()


def transmit_link(cfg: SimConfig, near_idx, far_idx) -> np.ndarray:
    """Superpose and modulate one cluster's streams (the noiseless loopback path)."""
    pts = constellation(cfg.modem_order).points
    x = np.sqrt(cfg.alloc.alpha_near) * pts[near_idx] + np.sqrt(cfg.alloc.alpha_far) * pts[far_idx]
    return modulate(cfg, x)


def receive_near(cfg: SimConfig, rx, taps, noise_var, far_true_idx=None) -> np.ndarray:
    """SIC receiver of the near user: its own detected symbol indices."""
    y = demodulate(cfg, rx, taps, noise_var)
    far_true = None if far_true_idx is None else constellation(cfg.modem_order).points[far_true_idx]
    return sic_decode_near_indices(y, 1.0, cfg.alloc, cfg.modem_order, cfg.sic, far_true)


def receive_far(cfg: SimConfig, rx, taps, noise_var) -> np.ndarray:
    """Far-user receiver: detects its own stream, near stream treated as noise."""
    return decode_far_indices(demodulate(cfg, rx, taps, noise_var), cfg.alloc, cfg.modem_order)


# -- one trial -----------------------------------------------------------------------------

@dataclass(frozen=True)
class _Setup:
    pairing: object
    near: np.ndarray
    far: np.ndarray


def _setup(cfg: SimConfig) -> _Setup:
    gains = default_gains_db(cfg.topology, *cfg.gains_db)
    pairing = pair_users(gains)
    return _Setup(pairing, np.array(pairing.near_users), np.array(pairing.far_users))


def draw_channel(cfg: SimConfig, setup: _Setup, trial: int):
    """Channel realization, ZF precoder and effective links ``(users, clusters, taps)``."""
    if cfg.channel_model == "unity":
        chan = unity_channel(cfg.topology, setup.pairing)
    else:
        gains = default_gains_db(cfg.topology, *cfg.gains_db)
        chan = gen_channel(cfg.topology, cfg.pdp, derive_seed(cfg.seed, trial, Stream.CHANNEL), gains)
    h_near = chan.taps[setup.near, :, 0]
    if cfg.csi_error > 0:
        err = cn(rng_for(cfg.seed, trial, Stream.CSI), h_near.shape)
        h_near = h_near * (1 + cfg.csi_error * err)
    precoder = zf_precoder(h_near)
    return chan, precoder, effective_links(chan, precoder)


def _draw_data(cfg: SimConfig, trial: int, clusters: int):
    rng = rng_for(cfg.seed, trial, Stream.DATA)
    m = cfg.modem_order
    near = rng.integers(0, m, size=(clusters, cfg.block_size))
    far = rng.integers(0, m, size=(clusters, cfg.block_size))
    return near, far


def _received(heff, x) -> np.ndarray:
    """Noiseless signal at every user: sum over clusters of ``h_eff[u, n] * x_n``."""
    n_taps = heff.shape[-1]
    t = x.shape[-1]
    r = heff[:, :, 0] @ x
    for lag in range(1, n_taps):
        r[:, lag:] += heff[:, :, lag] @ x[:, :t - lag]
    return r


def ser_trial(cfg: SimConfig, setup: _Setup, trial: int, snr_db) -> np.ndarray:
    """Error and symbol counts ``[snr, (near, far), (errors, total)]`` for one trial."""
    clusters = cfg.topology.clusters
    near_idx, far_idx = _draw_data(cfg, trial, clusters)
    x = transmit_link(cfg, near_idx, far_idx)
    _, _, heff = draw_channel(cfg, setup, trial)
    clean = _received(heff, x)
    noise = cn(rng_for(cfg.seed, trial, Stream.NOISE), clean.shape)
    own = np.arange(clusters)
    taps_near = heff[setup.near, own, :]
    taps_far = heff[setup.far, own, :]
    clean_near, clean_far = clean[setup.near], clean[setup.far]
    noise_near, noise_far = noise[setup.near], noise[setup.far]

    out = np.zeros((len(snr_db), 2, 2), dtype=np.int64)
    out[:, :, 1] = near_idx.size
    for i, snr in enumerate(snr_db):
        nv = noise_var_from_snr(snr)
        sd = np.sqrt(nv)
        rx_near = clean_near + sd * noise_near if nv else clean_near
        rx_far = clean_far + sd * noise_far if nv else clean_far
        near_hat = receive_near(cfg, rx_near, taps_near, nv, far_idx)
        far_hat = receive_far(cfg, rx_far, taps_far, nv)
        out[i, 0, 0] = np.count_nonzero(near_hat != near_idx)
        out[i, 1, 0] = np.count_nonzero(far_hat != far_idx)
    return out


def _chunk(cfg, setup, start, stop, snr_db):
    acc = np.zeros((len(snr_db), 2, 2), dtype=np.int64)
    for t in range(start, stop):
        acc += ser_trial(cfg, setup, t, snr_db)
    return acc


def run_ser_sweep(cfg: SimConfig, workers: int | None = None) -> list[MetricRecord]:
    """Near/far SER per SNR point.

    Trials run in fixed chunks of ``CHUNK_TRIALS``. An SNR point stops
    accumulating after the first chunk at which both users have
    ``target_errors`` errors, or when ``trials`` is exhausted. Chunks are
    merged in index order, so the result is independent of ``workers``.
    """
    snr_db = np.asarray(cfg.snr_db, dtype=float)
    setup = _setup(cfg)
    n_workers = worker_count(workers)
    starts = list(range(0, cfg.trials, CHUNK_TRIALS))
    acc = np.zeros((snr_db.size, 2, 2), dtype=np.int64)
    trials_used = np.zeros(snr_db.size, dtype=np.int64)
    active = np.ones(snr_db.size, dtype=bool)

    def job(start):
        return _chunk(cfg, setup, start, min(start + CHUNK_TRIALS, cfg.trials), snr_db)

    pool = ThreadPoolExecutor(n_workers) if n_workers > 1 else None
    try:
        pos = 0
        while pos < len(starts) and active.any():
            wave = starts[pos:pos + n_workers]
            results = list(pool.map(job, wave)) if pool else [job(s) for s in wave]
            for start, res in zip(wave, results):
                if not active.any():
                    break
                acc[active] += res[active]
                trials_used[active] += min(start + CHUNK_TRIALS, cfg.trials) - start
                done = (acc[:, :, 0] >= cfg.target_errors).all(axis=1)
                active &= ~done
            pos += len(wave)
    finally:
        if pool:
            pool.shutdown()

    records = []
    for i, snr in enumerate(snr_db):
        for u, user in enumerate(("near", "far")):
            errors, total = int(acc[i, u, 0]), int(acc[i, u, 1])
            records.append(MetricRecord(
                "ser", float(snr), errors / total, cfg.backend, cfg.sic.mode, total,
                meta={"user": user, "errors": errors, "trials": int(trials_used[i]),
                      "equalizer": cfg.equalizer, "label": cfg.label}))
    return records


# -- PAPR ----------------------------------------------------------------------------------

def random_blocks(cfg: SimConfig, n_blocks: int) -> np.ndarray:
    """Superposed unit-energy NOMA symbol blocks, one seed per block."""
    pts = constellation(cfg.modem_order).points
    out = np.empty((n_blocks, cfg.block_size), dtype=complex)
    for b in range(n_blocks):
        near, far = _draw_data(cfg, b, 1)
        out[b] = np.sqrt(cfg.alloc.alpha_near) * pts[near[0]] + np.sqrt(cfg.alloc.alpha_far) * pts[far[0]]
    return out


def papr_values(cfg: SimConfig, n_blocks: int | None = None) -> np.ndarray:
    """Per-block PAPR (dB) of the transmitted waveform, CP included for CP-OFDM."""
    n_blocks = n_blocks or cfg.papr_blocks
    x = modulate(cfg, random_blocks(cfg, n_blocks))
    return np.atleast_1d(compute_papr(x))


def pulse_gamma(cfg: SimConfig) -> float:
    return 1.0 if cfg.backend == "fft" else pulse_peak(cfg.wavelet, cfg.block_size)


def run_papr_experiment(cfg: SimConfig, n_blocks: int | None = None) -> list[MetricRecord]:
    n_blocks = n_blocks or cfg.papr_blocks
    x = modulate(cfg, random_blocks(cfg, n_blocks))
    recs = papr_ccdf(x, cfg.papr_thresholds_db, cfg.backend, cfg.sic.mode)
    for r in recs:
        r.meta["label"] = cfg.label
    return recs


# -- PSD -----------------------------------------------------------------------------------

def band_edge(cfg: SimConfig) -> float:
    """Nominal edge of the occupied band in cycles per oversampled sample."""
    return 0.5 / cfg.psd_oversample


def transmit_stream(cfg: SimConfig, n_blocks: int | None = None) -> np.ndarray:
    """Concatenated transmit waveform at ``psd_oversample`` times the symbol rate.

    CP-OFDM is synthesized on an enlarged IFFT with the data bins centred;
    the wavelet stream is interpolated through extra zero-detail synthesis
    levels (linear, so consecutive blocks overlap).
    """
    n_blocks = n_blocks or cfg.psd_blocks
    sym = random_blocks(cfg, n_blocks)
    k = cfg.psd_oversample
    if cfg.backend == "fft":
        x = oversampled_modulate(sym, cfg.ofdm, k) * tx_amplitude(cfg)
        return x.ravel()
    base = np.asarray(wavelet_modulate(sym, cfg.wavelet, cfg.block_size)).ravel()
    stages = int(np.log2(k))
    return interpolate(base, cfg.wavelet, stages) / np.sqrt(k) if stages else base


def run_psd_experiment(cfg: SimConfig, n_blocks: int | None = None) -> list[MetricRecord]:
    n_blocks = n_blocks or cfg.psd_blocks
    if n_blocks < 1:
        raise ValueError("need at least one block")
    recs = estimate_psd(transmit_stream(cfg, n_blocks), cfg.psd_seg_len, cfg.psd_overlap,
                        cfg.psd_window, backend=cfg.backend, sic_mode=cfg.sic.mode)
    for r in recs:
        r.meta["label"] = cfg.label
    return recs


# -- sum-rate ------------------------------------------------------------------------------

def se_index(cfg: SimConfig) -> float:
    return spectral_efficiency_index(cfg.backend, cfg.ofdm.subcarriers, cfg.ofdm.cp_len)


def cluster_gains(cfg: SimConfig, setup: _Setup, trial: int):
    """Own-cluster wideband gains and other-cluster interference powers per cluster."""
    _, _, heff = draw_channel(cfg, setup, trial)
    power = np.sum(np.abs(heff) ** 2, axis=-1)  # (users, clusters)
    own = np.arange(cfg.topology.clusters)
    pn, pf = power[setup.near], power[setup.far]
    g_near, g_far = pn[own, own], pf[own, own]
    i_near = pn.sum(axis=1) - g_near
    i_far = pf.sum(axis=1) - g_far
    return np.sqrt(g_near), np.sqrt(g_far), i_near, i_far


def run_sumrate_sweep(cfg: SimConfig) -> list[MetricRecord]:
    """System sum-rate (all clusters) per SNR, averaged over ``trials`` realizations."""
    setup = _setup(cfg)
    snr_db = np.asarray(cfg.snr_db, dtype=float)
    eff = se_index(cfg)
    totals = np.zeros(snr_db.size)
    for t in range(cfg.trials):
        hn, hf, i_n, i_f = cluster_gains(cfg, setup, t)
        for i, snr in enumerate(snr_db):
            nv = noise_var_from_snr(snr)
            totals[i] += np.sum(sum_rate(hn, hf, cfg.alloc, nv, cfg.sic.beta, eff, i_n, i_f))
    recs = [MetricRecord("sumrate", float(s), float(v / cfg.trials), cfg.backend, cfg.sic.mode,
                         cfg.trials, meta={"label": cfg.label}) for s, v in zip(snr_db, totals)]
    recs.append(MetricRecord("se_index", 0.0, eff, cfg.backend, cfg.sic.mode, 1, meta={"label": cfg.label}))
    return recs
