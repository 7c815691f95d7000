"""Orthonormal two-channel filter banks and wavelet-OFDM modulation.

Filters follow the synthesis convention: ``g`` is the scaling (low-pass)
filter with ``sum(g) == sqrt(2)`` and ``h[n] = (-1)**n * g[L-1-n]``. All
transforms are periodic, so a length-``N`` block maps to exactly ``N``
coefficients and the transform matrix is orthogonal.

Analysis at one level::

    a[k] = sum_n g[n] x[(2k + n) mod N]
    d[k] = sum_n h[n] x[(2k + n) mod N]

and synthesis is its transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .blocks import SignalBlock, SymbolStream

FAMILIES = ("haar", "db2", "db6", "db8", "db10", "sym4", "coif2")

# Standard scaling-filter tables (reconstruction low-pass, sum = sqrt(2)).
_SYM4 = np.array([
    0.0322231006040427, -0.012603967262037833, -0.09921954357684722,
    0.29785779560527736, 0.8037387518059161, 0.49761866763201545,
    -0.02963552764599851, -0.07576571478927333,
])
_COIF2 = np.array([
    0.01638733646320364, -0.04146493678687178, -0.0673725547237256,
    0.3861100668227629, 0.8127236354494135, 0.4170051844232391,
    -0.07648859907828076, -0.05943441864643109, 0.02368017194684777,
    0.005611434819368834, -0.0018232088709110323, -0.000720549445520347,
])


def daubechies(p: int) -> np.ndarray:
    """Minimum-phase Daubechies scaling filter with ``p`` vanishing moments.

    Spectral factorization of the half-band product filter: the roots of
    ``P(y) = sum_k C(p-1+k, k) y**k`` (``y = sin^2(w/2)``) are mapped to
    ``z`` and the root inside the unit circle of each reciprocal pair is kept.
    """
    if p < 1:
        raise ValueError("need at least one vanishing moment")
    poly = np.array([1.0 + 0j])
    for _ in range(p):
        poly = np.convolve(poly, [1.0, 1.0])
    if p > 1:
        y_roots = np.roots([comb(p - 1 + k, k) for k in range(p)][::-1])
        for y in y_roots:
            pair = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
            poly = np.convolve(poly, [1.0, -pair[np.argmin(np.abs(pair))]])
    g = poly.real
    return g * np.sqrt(2) / g.sum()


def quadrature_mirror(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    return (-1.0) ** np.arange(len(g)) * g[::-1]


@lru_cache(maxsize=None)
def _filters(family: str):
    if family == "haar":
        g = np.full(2, 1 / np.sqrt(2))
    elif family.startswith("db") and family[2:].isdigit():
        g = daubechies(int(family[2:]))
    elif family == "sym4":
        g = _SYM4.copy()
    elif family == "coif2":
        g = _COIF2.copy()
    else:
        raise ValueError(f"unknown wavelet family {family!r}")
    h = quadrature_mirror(g)
    g.setflags(write=False)
    h.setflags(write=False)
    return g, h


def wavelet_filters(family: str):
    """Return the ``(g, h)`` synthesis filter pair for a supported family."""
    if family not in FAMILIES:
        raise ValueError(f"unknown wavelet family {family!r}; supported: {FAMILIES}")
    return _filters(family)


@dataclass(frozen=True)
class WaveletSpec:
    family: str = "haar"
    levels: int = 2
    g: np.ndarray = field(init=False, repr=False, compare=False)
    h: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 1:
            raise ValueError(f"levels must be a positive integer, got {self.levels}")
        g, h = wavelet_filters(self.family)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)

    @property
    def length(self) -> int:
        return len(self.g)


@dataclass(frozen=True, eq=False)
class CoefficientPyramid:
    """Approximation at the coarsest level plus details ordered coarse to fine."""

    approx: np.ndarray
    details: tuple

    @property
    def levels(self) -> int:
        return len(self.details)

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.approx, *self.details], axis=-1)

    @classmethod
    def unflatten(cls, coeffs, levels: int) -> "CoefficientPyramid":
        coeffs = np.asarray(coeffs, dtype=complex)
        n = coeffs.shape[-1]
        _check_length(n, levels)
        sizes = [n >> levels] + [n >> j for j in range(levels, 0, -1)]
        parts = np.split(coeffs, np.cumsum(sizes)[:-1], axis=-1)
        return cls(parts[0], tuple(parts[1:]))

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.flatten()) ** 2))


def _check_length(n, levels):
    if n % (1 << levels):
        raise ValueError(f"block length {n} is not divisible by 2**{levels}")


def _analysis_step(x, g, h):
    n = x.shape[-1]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(g))[None, :]) % n
    frames = x[..., idx]
    return frames @ g, frames @ h


def _synthesis_step(a, d, g, h):
    half = a.shape[-1]
    n = 2 * half
    out = np.zeros(a.shape[:-1] + (n,), dtype=np.result_type(a, d, g))
    base = 2 * np.arange(half)
    for tap in range(len(g)):
        # positions are distinct within one tap, so fancy-index += is safe
        out[..., (base + tap) % n] += g[tap] * a + h[tap] * d
    return out


def dwt_analyze(block, spec: WaveletSpec) -> CoefficientPyramid:
    """Periodic Mallat analysis to ``spec.levels`` levels.

    Works along the last axis, so a stack of blocks is analysed at once.
    """
    x = np.asarray(block, dtype=complex)
    _check_length(x.shape[-1], spec.levels)
    details = []
    a = x
    for _ in range(spec.levels):
        a, d = _analysis_step(a, spec.g, spec.h)
        details.append(d)
    return CoefficientPyramid(a, tuple(reversed(details)))


def idwt_synthesize(pyramid: CoefficientPyramid, spec: WaveletSpec) -> SignalBlock:
    """Invert :func:`dwt_analyze`."""
    if pyramid.levels != spec.levels:
        raise ValueError(f"pyramid has {pyramid.levels} detail levels, spec expects {spec.levels}")
    a = np.asarray(pyramid.approx, dtype=complex)
    for d in pyramid.details:
        d = np.asarray(d, dtype=complex)
        if d.shape != a.shape:
            raise ValueError(f"detail shape {d.shape} does not match approximation {a.shape}")
        a = _synthesis_step(a, d, spec.g, spec.h)
    return SignalBlock(a)


def wavelet_modulate(stream, spec: WaveletSpec, block_size: int | None = None) -> SignalBlock:
    """Lay symbols into the pyramid (approximation, then details coarse to fine) and synthesize.

    No cyclic prefix: the output has exactly as many samples as symbols.
    """
    s = np.asarray(stream, dtype=complex)
    if block_size is not None and s.shape[-1] != block_size:
        raise ValueError(f"expected {block_size} symbols, got {s.shape[-1]}")
    return idwt_synthesize(CoefficientPyramid.unflatten(s, spec.levels), spec)


def wavelet_demodulate(block, spec: WaveletSpec) -> SymbolStream:
    return SymbolStream(dwt_analyze(block, spec).flatten())


def synthesis_matrix(spec: WaveletSpec, n: int) -> np.ndarray:
    """Columns are the synthesized waveforms of each coefficient slot."""
    return np.asarray(idwt_synthesize(CoefficientPyramid.unflatten(np.eye(n), spec.levels), spec)).T


def pulse_peak(spec: WaveletSpec, n: int) -> float:
    """Peak synthesis-basis magnitude normalized so the unitary DFT scores 1."""
    return float(np.sqrt(n) * np.max(np.abs(synthesis_matrix(spec, n))))


def interpolate(samples, spec: WaveletSpec, stages: int) -> np.ndarray:
    """Streaming upsample-by-two and low-pass through ``g`` for ``stages`` levels.

    This is linear (non-periodic) synthesis with all detail bands set to zero,
    so neighbouring blocks overlap in time. Power is preserved on average.
    """
    from scipy.signal import upfirdn

    y = np.asarray(samples, dtype=complex)
    for _ in range(stages):
        y = upfirdn(spec.g, y, up=2)
    return y
