"""
Wavelet filter banks as a multicarrier modem
============================================

A two-level periodic DWT maps 256 samples onto 256 coefficients, so the
synthesis bank can carry one QAM symbol per coefficient, exactly as an
IDFT carries one symbol per subcarrier.
"""

import numpy as np

from wnoma.modem import constellation
from wnoma.ofdm import OfdmConfig, ofdm_demodulate, ofdm_modulate
from wnoma.wavelets import FAMILIES, WaveletSpec, pulse_peak, wavelet_demodulate, wavelet_filters, wavelet_modulate

rng = np.random.default_rng(0)
pts = constellation(16).points
symbols = pts[rng.integers(0, 16, 256)]

# Every family is orthonormal, so the round trip is exact to rounding.
print(f"{'family':>7} {'taps':>4} {'roundtrip err':>14} {'sqrt(N) max|basis|':>20}")
for fam in FAMILIES:
    spec = WaveletSpec(fam, levels=2)
    back = np.asarray(wavelet_demodulate(wavelet_modulate(symbols, spec), spec))
    err = np.max(np.abs(back - symbols))
    print(f"{fam:>7} {len(wavelet_filters(fam)[0]):>4} {err:14.2e} {pulse_peak(spec, 256):20.3f}")

# %%
# The FFT modem needs a cyclic prefix: 64 extra samples for 256 symbols.
cfg = OfdmConfig.from_ratio(256, 0.2)
x = np.asarray(ofdm_modulate(symbols, cfg))
print(f"\nCP-OFDM block: {x.size} samples for 256 symbols (cp {cfg.cp_len})")
print("roundtrip err", np.max(np.abs(np.asarray(ofdm_demodulate(x, cfg)) - symbols)))
