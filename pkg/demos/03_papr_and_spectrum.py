"""
Peak power and out-of-band emission
===================================

PAPR is taken over each transmitted block of superposed NOMA symbols.
For the spectrum both modems run at four times the symbol rate: CP-OFDM
on a 1024-point IFFT with the 256 data bins centred, and the wavelet
modem through two further synthesis stages with zero details.
"""

import numpy as np

from wnoma.config import from_flat
from wnoma.metrics import papr_bound, psd_level
from wnoma.sim import band_edge, papr_values, pulse_gamma, run_psd_experiment

print(f"{'modem':>13} {'PAPR@1e-2 dB':>13} {'bound dB':>9} {'PSD@1.5 edge dB':>16}")
for kw in [{"backend": "fft"}] + [{"backend": "wavelet", "wavelet.family": f}
                                  for f in ("haar", "sym4", "coif2", "db6", "db10")]:
    cfg = from_flat(kw)
    p99 = np.quantile(papr_values(cfg, 4000), 0.99)
    bound = papr_bound(cfg.block_size, pulse_gamma(cfg))
    oob = psd_level(run_psd_experiment(cfg), 1.5 * band_edge(cfg))
    print(f"{cfg.label:>13} {p99:13.2f} {bound:9.1f} {oob:16.1f}")
