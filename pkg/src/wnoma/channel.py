"""Clustered massive-MIMO downlink: Rayleigh taps, ZF precoding, AWGN, one-tap equalizers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import SignalBlock


class SingularChannelError(ValueError):
    """The near-user channel matrix is (numerically) rank deficient."""


@dataclass(frozen=True)
class ClusterTopology:
    tx_antennas: int = 16
    clusters: int = 4

    def __post_init__(self):
        if self.clusters < 1:
            raise ValueError("need at least one cluster")
        if self.tx_antennas < self.clusters:
            raise ValueError(
                f"ZF needs tx_antennas >= clusters, got {self.tx_antennas} < {self.clusters}")

    @property
    def users(self) -> int:
        return 2 * self.clusters


def power_delay_profile(name="flat") -> np.ndarray:
    """``"flat"`` (one tap), ``"exp4"`` (four taps, e^-l decay) or explicit tap powers."""
    if isinstance(name, str):
        if name == "flat":
            return np.array([1.0])
        if name == "exp4":
            p = np.exp(-np.arange(4.0))
            return p / p.sum()
        raise ValueError(f"unknown power-delay profile {name!r}")
    p = np.asarray(name, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0):
        raise ValueError("power-delay profile must be a non-empty list of non-negative powers")
    return p


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """``taps[u, m, l]``: user ``u``, antenna ``m``, delay ``l``; large-scale gain included."""

    taps: np.ndarray
    gains: np.ndarray
    noise_var: float = 0.0

    @property
    def flat(self) -> np.ndarray:
        return self.taps[..., 0]


def default_gains_db(topology: ClusterTopology, group1_db=-10.0, group2_db=-5.0) -> np.ndarray:
    """Users ``0..N-1`` get ``group1_db``, users ``N..2N-1`` get ``group2_db``."""
    n = topology.clusters
    return np.r_[np.full(n, float(group1_db)), np.full(n, float(group2_db))]


def cn(rng: np.random.Generator, size, var=1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with variance ``var``."""
    return np.sqrt(var / 2) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def gen_channel(topology: ClusterTopology, pdp="flat", seed=None, gains_db=None,
                noise_var: float = 0.0) -> ChannelRealization:
    pdp = power_delay_profile(pdp)
    if abs(pdp.sum() - 1) > 1e-9:
        raise ValueError(f"power-delay profile must sum to 1, got {pdp.sum()}")
    if gains_db is None:
        gains_db = default_gains_db(topology)
    gains = 10 ** (np.asarray(gains_db, dtype=float) / 10)
    if gains.shape != (topology.users,):
        raise ValueError(f"need {topology.users} user gains, got {gains.shape}")
    rng = np.random.default_rng(seed)
    taps = cn(rng, (topology.users, topology.tx_antennas, pdp.size)) * np.sqrt(pdp)
    taps *= np.sqrt(gains)[:, None, None]
    return ChannelRealization(taps, gains, noise_var)


def unity_channel(topology: ClusterTopology, pairing) -> ChannelRealization:
    """Both users of cluster ``n`` see antenna ``n`` only, with unit gain."""
    taps = np.zeros((topology.users, topology.tx_antennas, 1), dtype=complex)
    for n, (near, far) in enumerate(pairing.pairs):
        taps[near, n, 0] = taps[far, n, 0] = 1.0
    return ChannelRealization(taps, np.ones(topology.users))


def zf_precoder(h_near, max_cond: float = 1e12) -> np.ndarray:
    """Column-normalized pseudo-inverse of the ``clusters x tx_antennas`` near-user matrix."""
    h = np.asarray(h_near, dtype=complex)
    if h.ndim != 2 or h.shape[0] > h.shape[1]:
        raise ValueError(f"need a wide or square matrix, got shape {h.shape}")
    cond = np.linalg.cond(h)
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularChannelError(f"near-user channel condition number {cond:.3g} exceeds {max_cond:.0e}")
    v = h.conj().T @ np.linalg.inv(h @ h.conj().T)
    return v / np.linalg.norm(v, axis=0, keepdims=True)


def effective_links(chan: ChannelRealization, precoder) -> np.ndarray:
    """``h_eff[u, n, l] = taps[u, :, l] . v_n`` for every user and cluster."""
    return np.einsum("uml,mn->unl", chan.taps, np.asarray(precoder))


def effective_link(chan: ChannelRealization, precoder, cluster_id: int, user_id: int) -> np.ndarray:
    v = np.asarray(precoder)
    if not 0 <= cluster_id < v.shape[1]:
        raise IndexError(f"cluster {cluster_id} out of range")
    if not 0 <= user_id < chan.taps.shape[0]:
        raise IndexError(f"user {user_id} out of range")
    return chan.taps[user_id].T @ v[:, cluster_id]


def convolve_block(x, taps) -> np.ndarray:
    """Linear convolution along the last axis, truncated to the input length."""
    x = np.asarray(x, dtype=complex)
    taps = np.atleast_1d(np.asarray(taps, dtype=complex))
    out = taps[0] * x
    for lag in range(1, taps.size):
        out[..., lag:] += taps[lag] * x[..., :-lag]
    return out


def apply_channel(x, taps, noise_var: float = 0.0, seed=None) -> SignalBlock:
    """Pass a block through a tapped-delay line and add CN(0, noise_var) noise.

    Samples spilling past the block end belong to the next block and are
    dropped, so a cyclic prefix at least as long as the channel memory makes
    the body a circular convolution.
    """
    if noise_var < 0:
        raise ValueError("noise variance must be non-negative")
    y = convolve_block(x, taps)
    if noise_var > 0:
        y = y + cn(np.random.default_rng(seed), y.shape, noise_var)
    return SignalBlock(y)


def frequency_response(taps, n: int) -> np.ndarray:
    """Per-bin channel gain ``H[k] = sum_l taps[l] exp(-2j pi k l / n)``."""
    taps = np.asarray(taps, dtype=complex)
    return np.fft.fft(taps, n=n, axis=-1)


def equalize_ls(y, h, tol: float = 1e-12):
    """Zero-forcing per-bin equalizer; returns ``(symbols, erasures)``.

    Bins with ``|H| < tol`` are erased (set to 0) and counted.
    """
    y = np.asarray(y, dtype=complex)
    h = np.broadcast_to(np.asarray(h, dtype=complex), y.shape)
    dead = np.abs(h) < tol
    out = np.zeros_like(y)
    np.divide(y, h, out=out, where=~dead)
    return out, int(np.count_nonzero(dead))


def equalize_mmse(y, h, noise_var: float) -> np.ndarray:
    if noise_var < 0:
        raise ValueError("noise variance must be non-negative")
    y = np.asarray(y, dtype=complex)
    h = np.asarray(h, dtype=complex)
    den = np.broadcast_to(np.abs(h) ** 2 + noise_var, y.shape)
    out = np.zeros(np.broadcast_shapes(y.shape, h.shape), dtype=complex)
    # a dead bin with no noise carries nothing; return 0 like the LS erasure
    np.divide(np.conj(h) * y, den, out=out, where=den > 0)
    return out
