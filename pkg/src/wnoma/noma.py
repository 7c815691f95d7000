"""Two-user power-domain superposition and successive interference cancellation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import SymbolStream
from .modem import constellation, detect_indices


@dataclass(frozen=True)
class PowerAllocation:
    alpha_near: float = 0.05
    alpha_far: float = 0.95

    def __post_init__(self):
        if abs(self.alpha_near + self.alpha_far - 1) > 1e-12:
            raise ValueError(f"power split must sum to 1, got {self.alpha_near} + {self.alpha_far}")
        if not 0 < self.alpha_near < self.alpha_far < 1:
            raise ValueError(
                f"need 0 < alpha_near < alpha_far < 1, got ({self.alpha_near}, {self.alpha_far})")

    @classmethod
    def from_near(cls, alpha_near: float) -> "PowerAllocation":
        return cls(alpha_near, 1.0 - alpha_near)


@dataclass(frozen=True)
class SicConfig:
    """``beta`` is the share of the far user's power left over after cancellation.

    ``mode="imperfect"`` with ``beta=0`` is allowed and must reproduce the
    perfect path exactly.
    """

    mode: str = "perfect"
    beta: float = 0.0

    def __post_init__(self):
        if self.mode not in ("perfect", "imperfect"):
            raise ValueError(f"unknown SIC mode {self.mode!r}")
        if not 0 <= self.beta <= 1:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.mode == "perfect" and self.beta != 0:
            raise ValueError("perfect SIC requires beta = 0")


@dataclass(frozen=True)
class ClusterPairing:
    pairs: tuple  # ((near_id, far_id), ...)
    gains: tuple  # ((near_gain, far_gain), ...)

    @property
    def near_users(self):
        return tuple(p[0] for p in self.pairs)

    @property
    def far_users(self):
        return tuple(p[1] for p in self.pairs)


def pair_users(gains) -> ClusterPairing:
    """Pair the k-th strongest user with the k-th weakest.

    The stronger user of each pair is the SIC-performing "near" user. Sorting
    is stable on user id, so ties pair as (0, N-1), (1, N-2), ...
    """
    gains = np.asarray(gains, dtype=float)
    n = gains.size
    if n == 0 or n % 2:
        raise ValueError(f"need an even, non-zero number of users, got {n}")
    order = sorted(range(n), key=lambda u: (-gains[u], u))
    pairs = tuple((order[k], order[n - 1 - k]) for k in range(n // 2))
    return ClusterPairing(pairs, tuple((float(gains[a]), float(gains[b])) for a, b in pairs))


def superpose(near, far, alloc: PowerAllocation) -> SymbolStream:
    near = np.asarray(near, dtype=complex)
    far = np.asarray(far, dtype=complex)
    if near.shape != far.shape:
        raise ValueError(f"stream shapes differ: {near.shape} vs {far.shape}")
    return SymbolStream(np.sqrt(alloc.alpha_near) * near + np.sqrt(alloc.alpha_far) * far)


def decode_far_indices(y, alloc: PowerAllocation, M: int) -> np.ndarray:
    return detect_indices(y, M, scale=np.sqrt(alloc.alpha_far))


def decode_far(y, alloc: PowerAllocation, M: int = 16) -> SymbolStream:
    """Detect the high-power stream, treating the low-power one as noise."""
    idx = decode_far_indices(y, alloc, M)
    return SymbolStream(constellation(M).points[idx])


def sic_cancel(y, h_eff, alloc: PowerAllocation, M: int, sic: SicConfig, far_true=None):
    """Detect and subtract the far stream; return ``(remainder, far_indices)``.

    ``y`` is ``h_eff * x + noise`` in the symbol domain (pass ``h_eff=1`` for an
    already equalized stream). Under imperfect SIC the un-cancelled share
    ``sqrt(beta * alpha_far) * h_eff * s_far`` of the true far signal is left in.
    """
    if not isinstance(sic, SicConfig):
        raise TypeError("sic must be a SicConfig")
    y = np.asarray(y, dtype=complex)
    far_idx = decode_far_indices(y / h_eff, alloc, M)
    pts = constellation(M).points
    rem = y - h_eff * np.sqrt(alloc.alpha_far) * pts[far_idx]
    if sic.beta > 0:
        if far_true is None:
            raise ValueError("imperfect SIC needs the transmitted far symbols")
        rem = rem + h_eff * np.sqrt(sic.beta * alloc.alpha_far) * np.asarray(far_true)
    return rem, far_idx


def sic_decode_near_indices(y, h_eff, alloc, M, sic, far_true=None) -> np.ndarray:
    rem, _ = sic_cancel(y, h_eff, alloc, M, sic, far_true)
    return detect_indices(rem / h_eff, M, scale=np.sqrt(alloc.alpha_near))


def sic_decode_near(y, h_eff, alloc: PowerAllocation, M: int = 16,
                    sic: SicConfig = SicConfig(), far_true=None) -> SymbolStream:
    """SIC receiver of the near user; returns its detected own symbols."""
    idx = sic_decode_near_indices(y, h_eff, alloc, M, sic, far_true)
    return SymbolStream(constellation(M).points[idx])
