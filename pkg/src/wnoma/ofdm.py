"""Cyclic-prefix OFDM with unitary transforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import SignalBlock, SymbolStream


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _check_pow2(n):
    if not _is_pow2(n):
        raise ValueError(f"transform length {n} is not a power of two")


def dft(block) -> np.ndarray:
    """Unitary DFT along the last axis."""
    x = np.asarray(block, dtype=complex)
    _check_pow2(x.shape[-1])
    return np.fft.fft(x, norm="ortho")


def idft(block) -> np.ndarray:
    x = np.asarray(block, dtype=complex)
    _check_pow2(x.shape[-1])
    return np.fft.ifft(x, norm="ortho")


@dataclass(frozen=True)
class OfdmConfig:
    subcarriers: int = 256
    cp_len: int = 64

    def __post_init__(self):
        if not _is_pow2(self.subcarriers):
            raise ValueError(f"subcarrier count {self.subcarriers} must be a power of two")
        if self.cp_len < 0 or (self.cp_len >= self.subcarriers and self.cp_len > 0):
            raise ValueError(f"cp_len {self.cp_len} must satisfy 0 <= cp_len < Q")

    @classmethod
    def from_ratio(cls, subcarriers: int = 256, cp_ratio: float = 0.2) -> "OfdmConfig":
        """Build from the CP share of the whole block, ``T_cp / (T + T_cp)``."""
        if not 0 <= cp_ratio < 1:
            raise ValueError(f"cp_ratio {cp_ratio} outside [0, 1)")
        cp = subcarriers * cp_ratio / (1 - cp_ratio)
        if abs(cp - round(cp)) > 1e-9:
            raise ValueError(f"cp_ratio {cp_ratio} gives a fractional CP length {cp} for Q={subcarriers}")
        return cls(subcarriers, int(round(cp)))

    @property
    def block_len(self) -> int:
        return self.subcarriers + self.cp_len

    @property
    def overhead(self) -> float:
        return self.cp_len / self.block_len


def ofdm_modulate(stream, cfg: OfdmConfig) -> SignalBlock:
    s = np.asarray(stream, dtype=complex)
    if s.shape[-1] != cfg.subcarriers:
        raise ValueError(f"expected {cfg.subcarriers} symbols, got {s.shape[-1]}")
    body = idft(s)
    if cfg.cp_len:
        body = np.concatenate([body[..., -cfg.cp_len:], body], axis=-1)
    return SignalBlock(body)


def ofdm_demodulate(block, cfg: OfdmConfig) -> SymbolStream:
    x = np.asarray(block, dtype=complex)
    if x.shape[-1] != cfg.block_len:
        raise ValueError(f"expected block of {cfg.block_len} samples, got {x.shape[-1]}")
    return SymbolStream(dft(x[..., cfg.cp_len:]))


def oversampled_modulate(stream, cfg: OfdmConfig, factor: int) -> np.ndarray:
    """CP-OFDM on a ``factor * Q`` point IFFT with the Q data bins centred on DC.

    Used for out-of-band studies; average sample power stays 1/factor times
    the critically sampled power, which only shifts a peak-normalized PSD.
    """
    s = np.asarray(stream, dtype=complex)
    q = cfg.subcarriers
    if s.shape[-1] != q:
        raise ValueError(f"expected {q} symbols, got {s.shape[-1]}")
    n = factor * q
    bins = np.zeros(s.shape[:-1] + (n,), dtype=complex)
    half = q // 2
    bins[..., :q - half] = s[..., half:]
    if half:
        bins[..., -half:] = s[..., :half]
    body = idft(bins)
    cp = factor * cfg.cp_len
    if cp:
        body = np.concatenate([body[..., -cp:], body], axis=-1)
    return body
