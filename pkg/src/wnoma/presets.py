"""Desk-scale scenarios, one per figure panel.

Channel gains are given per user group : group 1
(users ``0..N-1``) at -10 dB and group 2 (users ``N..2N-1``) at -5 dB.
Pairing makes the stronger user of each pair the SIC-performing near user,
so the -5 dB users perform SIC. Swap the two group gains to read the
labels literally; the pairing, and therefore the results, are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import SimConfig, from_flat

PAPR_FAMILIES = ("haar", "db6", "db8", "db10", "sym4", "coif2")
# fig3e second channel set; not reported, chosen as a milder gain spread.
CHANNEL_SET_B = (-6.0, 0.0)


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str  # ser | papr | psd | sumrate
    arms: tuple  # ((arm name, SimConfig), ...)
    description: str = ""

    def configs(self):
        return [cfg for _, cfg in self.arms]


def _arm(**flat) -> SimConfig:
    return from_flat(flat)


def _fig3a(base):
    arms = []
    for backend in ("fft", "wavelet"):
        for eq in ("ls", "mmse"):
            arms.append((f"{backend}_{eq}", _arm(**base, backend=backend, **{"sim.equalizer": eq})))
    return Scenario("fig3a", "ser", tuple(arms), "SER, LS vs MMSE equalization, perfect SIC")


def _fig3b(base):
    arms = []
    for backend in ("fft", "wavelet"):
        for mode in ("perfect", "imperfect"):
            arms.append((f"{backend}_{mode}", _arm(**base, backend=backend, **{"sic.mode": mode})))
    return Scenario("fig3b", "ser", tuple(arms), "SER, perfect vs imperfect (beta=0.05) SIC")


def _fig3c(base):
    arms = [("fft", _arm(**base, backend="fft"))]
    arms += [(f"wavelet_{f}", _arm(**base, backend="wavelet", **{"wavelet.family": f}))
             for f in PAPR_FAMILIES]
    return Scenario("fig3c", "papr", tuple(arms), "PAPR CCDF, FFT-OFDM vs wavelet families")


def _fig3d(base):
    sc = _fig3c(base)
    return Scenario("fig3d", "psd", sc.arms, "Transmit PSD per filter bank")


def _fig3e(base):
    arms = []
    for set_name, gains in (("A", (-10.0, -5.0)), ("B", CHANNEL_SET_B)):
        for backend in ("fft", "wavelet"):
            for mode in ("perfect", "imperfect"):
                arms.append((f"{backend}_{mode}_set{set_name}", _arm(
                    **base, backend=backend, **{"sic.mode": mode, "channel.gain_group1_db": gains[0],
                                                "channel.gain_group2_db": gains[1]})))
    return Scenario("fig3e", "sumrate", tuple(arms), "Sum-rate, two channel sets, perfect/imperfect SIC")


def _fig3f(base):
    arms = (("fft", _arm(**base, backend="fft")),
            ("wavelet_db10", _arm(**base, backend="wavelet", **{"wavelet.family": "db10"})))
    return Scenario("fig3f", "psd", arms, "PSD of FFT-NOMA vs WNOMA (db10)")


PRESETS = {"fig3a": _fig3a, "fig3b": _fig3b, "fig3c": _fig3c, "fig3d": _fig3d,
           "fig3e": _fig3e, "fig3f": _fig3f}


def preset(name: str, **overrides) -> Scenario:
    """Scenario for a panel; ``overrides`` are flat config keys applied to every arm."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name](dict(overrides))
