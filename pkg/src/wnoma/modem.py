"""Square-QAM mapping with per-axis reflected-binary Gray labels.

Points are indexed by the integer value of their bit label, so a label and a
point index are the same number. The first half of a label's bits selects the
in-phase level and the second half the quadrature level; level ``i`` along an
axis sits at amplitude ``L - 1 - 2 i`` and carries the Gray word ``i ^ (i >> 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .blocks import SymbolStream

SUPPORTED_ORDERS = (4, 16, 64)


@dataclass(frozen=True, eq=False)
class QamConstellation:
    order: int
    points: np.ndarray
    gray_map: dict

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))


def _check_order(M):
    if M not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {M}; expected one of {SUPPORTED_ORDERS}")


@lru_cache(maxsize=None)
def constellation(M: int = 16) -> QamConstellation:
    """Unit-average-energy Gray-labelled square QAM of order ``M``."""
    _check_order(M)
    side = int(round(np.sqrt(M)))
    half = int(np.log2(side))
    levels = side - 1 - 2 * np.arange(side)
    gray = np.arange(side) ^ (np.arange(side) >> 1)
    # axis value indexed by Gray word
    amp = np.empty(side)
    amp[gray] = levels
    labels = np.arange(M)
    i_word = labels >> half
    q_word = labels & (side - 1)
    points = amp[i_word] + 1j * amp[q_word]
    points = points / np.sqrt(2 * (M - 1) / 3)
    points.setflags(write=False)
    k = 2 * half
    gray_map = {tuple(int(b) for b in np.binary_repr(lab, k)): int(lab) for lab in labels}
    return QamConstellation(M, points, gray_map)


def bits_to_indices(bits, M: int = 16) -> np.ndarray:
    _check_order(M)
    bits = np.asarray(bits, dtype=np.int64).ravel()
    k = int(np.log2(M))
    if bits.size % k:
        raise ValueError(f"bit count {bits.size} is not divisible by log2(M) = {k}")
    weights = 1 << np.arange(k - 1, -1, -1)
    return bits.reshape(-1, k) @ weights


def indices_to_bits(indices, M: int = 16) -> np.ndarray:
    _check_order(M)
    k = int(np.log2(M))
    indices = np.asarray(indices, dtype=np.int64).ravel()
    return ((indices[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.int8).ravel()


def qam_modulate(bits, M: int = 16) -> SymbolStream:
    """Map bits to Gray-coded QAM symbols of unit average energy."""
    bits = np.asarray(bits, dtype=np.int8).ravel()
    idx = bits_to_indices(bits, M)
    return SymbolStream(constellation(M).points[idx], source_bits=bits)


def detect_indices(symbols, M: int = 16, scale: float = 1.0, chunk: int = 1 << 16) -> np.ndarray:
    """Minimum-distance point indices against ``scale`` times the constellation.

    Ties resolve to the lowest point index (``argmin`` semantics).
    """
    pts = constellation(M).points * scale
    y = np.asarray(symbols, dtype=complex)
    shape = y.shape
    y = y.ravel()
    out = np.empty(y.size, dtype=np.int64)
    for start in range(0, y.size, chunk):
        seg = y[start:start + chunk]
        out[start:start + chunk] = np.argmin(np.abs(seg[:, None] - pts[None, :]), axis=1)
    return out.reshape(shape)


def qam_demodulate(stream, M: int = 16) -> np.ndarray:
    """Hard-decision demapping to bits."""
    return indices_to_bits(detect_indices(np.asarray(stream), M), M)


def random_indices(rng: np.random.Generator, M: int, size) -> np.ndarray:
    return rng.integers(0, M, size=size)


def qam_ser_awgn(es_n0, M: int = 16) -> np.ndarray:
    """Exact symbol error rate of square M-QAM on AWGN at linear Es/N0."""
    from scipy.special import erfc

    es_n0 = np.asarray(es_n0, dtype=float)
    side = np.sqrt(M)
    q = 0.5 * erfc(np.sqrt(3 * es_n0 / (M - 1)) / np.sqrt(2))
    p_axis = 2 * (1 - 1 / side) * q
    return 1 - (1 - p_axis) ** 2
