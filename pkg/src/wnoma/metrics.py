"""SER, PAPR/CCDF, Welch PSD, spectral-efficiency index and NOMA sum-rate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import signal as sp_signal

KINDS = ("ser", "papr_ccdf", "psd", "sumrate", "se_index")


@dataclass(frozen=True)
class MetricRecord:
    kind: str
    x: float
    y: float
    backend: str = ""
    sic_mode: str = ""
    n_samples: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown record kind {self.kind!r}")
        if self.kind in ("ser", "papr_ccdf") and not 0 <= self.y <= 1:
            raise ValueError(f"{self.kind} value {self.y} outside [0, 1]")


class SerCount(NamedTuple):
    errors: int
    total: int
    rate: float


def compute_ser(tx, rx) -> SerCount:
    """Symbol error count between transmitted and detected symbols (or indices)."""
    tx = np.asarray(tx)
    rx = np.asarray(rx)
    if tx.shape != rx.shape:
        raise ValueError(f"length mismatch: {tx.shape} vs {rx.shape}")
    if tx.size == 0:
        raise ValueError("empty symbol streams")
    errors = int(np.count_nonzero(tx != rx))
    return SerCount(errors, tx.size, errors / tx.size)


def compute_papr(block) -> float | np.ndarray:
    """``10 log10(max|s|^2 / mean|s|^2)`` along the last axis."""
    p = np.abs(np.asarray(block, dtype=complex)) ** 2
    if p.shape[-1] == 0:
        raise ValueError("empty block")
    mean = p.mean(axis=-1)
    if np.any(mean == 0):
        raise ValueError("PAPR of an all-zero block is undefined")
    out = 10 * np.log10(p.max(axis=-1) / mean)
    return float(out) if np.ndim(out) == 0 else out


def ccdf(values, thresholds) -> np.ndarray:
    """Fraction of ``values`` strictly above each threshold."""
    values = np.sort(np.asarray(values, dtype=float).ravel())
    if values.size == 0:
        raise ValueError("no values")
    thresholds = np.asarray(thresholds, dtype=float)
    return 1 - np.searchsorted(values, thresholds, side="right") / values.size


def papr_ccdf(blocks, thresholds, backend: str = "", sic_mode: str = "") -> list[MetricRecord]:
    """CCDF of per-block PAPR; ``blocks`` is a 2-D array or a sequence of blocks."""
    if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
        paprs = np.atleast_1d(compute_papr(blocks)) if blocks.size else np.empty(0)
    else:
        paprs = np.array([compute_papr(b) for b in blocks])
    if paprs.size == 0:
        raise ValueError("no blocks")
    probs = ccdf(paprs, thresholds)
    return [MetricRecord("papr_ccdf", float(t), float(p), backend, sic_mode, paprs.size)
            for t, p in zip(np.asarray(thresholds, dtype=float), probs)]


def papr_bound(q: int, gamma_max: float) -> float:
    if q < 1 or gamma_max <= 0:
        raise ValueError("need Q >= 1 and gamma_max > 0")
    return 10 * np.log10(q * gamma_max ** 2)


def welch_psd(samples, seg_len: int = 256, overlap_fraction: float = 0.5,
              window: str = "hann", sample_rate: float = 1.0):
    """Two-sided Welch density, frequencies ascending from ``-fs/2``.

    Returns ``(freqs, density, n_segments)``; ``density`` integrates to the
    mean sample power.
    """
    x = np.asarray(samples, dtype=complex)
    if x.size < 2 * seg_len:
        raise ValueError(f"signal of {x.size} samples is shorter than two segments of {seg_len}")
    noverlap = int(round(seg_len * overlap_fraction))
    f, p = sp_signal.welch(x, fs=sample_rate, window=window, nperseg=seg_len, noverlap=noverlap,
                           detrend=False, return_onesided=False, scaling="density")
    step = seg_len - noverlap
    n_seg = (x.size - noverlap) // step
    return np.fft.fftshift(f), np.fft.fftshift(p), n_seg


def estimate_psd(samples, seg_len: int = 256, overlap_fraction: float = 0.5, window: str = "hann",
                 sample_rate: float = 1.0, backend: str = "", sic_mode: str = "") -> list[MetricRecord]:
    """Welch PSD in dB relative to the peak bin."""
    f, p, n_seg = welch_psd(samples, seg_len, overlap_fraction, window, sample_rate)
    db = 10 * np.log10(np.maximum(p, np.finfo(float).tiny) / p.max())
    return [MetricRecord("psd", float(fi), float(di), backend, sic_mode, n_seg) for fi, di in zip(f, db)]


def psd_level(records, freq: float) -> float:
    """Level (dB) at the bins nearest to ``+freq`` and ``-freq``, averaged in power."""
    f = np.array([r.x for r in records])
    y = np.array([r.y for r in records])
    lv = [y[np.argmin(np.abs(f - s * freq))] for s in (1, -1)]
    return float(10 * np.log10(np.mean(10 ** (np.array(lv) / 10))))


def spectral_efficiency_index(backend: str, t_body: float = 1.0, t_cp: float = 0.0) -> float:
    """``T / (T + T_cp)`` for CP-OFDM; 1 for the CP-free wavelet modem."""
    if t_body <= 0 or t_cp < 0:
        raise ValueError("need T_body > 0 and T_cp >= 0")
    if backend == "wavelet":
        return 1.0
    if backend == "fft":
        return t_body / (t_body + t_cp)
    raise ValueError(f"unknown backend {backend!r}")


def sum_rate(h_near, h_far, alloc, noise_var, beta: float = 0.0, se_index: float = 1.0,
             interference_near=0.0, interference_far=0.0):
    """Achievable two-user NOMA rate in bit/s/Hz.

    ``interference_*`` is extra received interference power (other clusters)
    added to the noise of the respective user.
    """
    gn = np.abs(np.asarray(h_near)) ** 2
    gf = np.abs(np.asarray(h_far)) ** 2
    sinr_far = alloc.alpha_far * gf / (alloc.alpha_near * gf + noise_var + interference_far)
    sinr_near = alloc.alpha_near * gn / (beta * alloc.alpha_far * gn + noise_var + interference_near)
    return se_index * (np.log2(1 + sinr_near) + np.log2(1 + sinr_far))
