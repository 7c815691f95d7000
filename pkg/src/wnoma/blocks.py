"""Lightweight containers passed between the modem, filter-bank and channel stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SymbolStream:
    """Complex symbols, optionally with the bits they were mapped from."""

    symbols: np.ndarray
    source_bits: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", np.asarray(self.symbols, dtype=complex))

    def __array__(self, dtype=None, copy=None):
        return self.symbols if dtype is None else self.symbols.astype(dtype)

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True, eq=False)
class SignalBlock:
    """Complex baseband samples tagged with their sample rate."""

    samples: np.ndarray
    sample_rate: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))

    def __array__(self, dtype=None, copy=None):
        return self.samples if dtype is None else self.samples.astype(dtype)

    def __len__(self):
        return len(self.samples)

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))
