"""Simulation configuration and its flat dotted-key form.

The same flat mapping is read from TOML files (``[sic]`` tables or
``sic.beta = 0.05`` keys both work), from CLI overrides, and from the
``config`` entry of a run manifest.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import ClusterTopology, power_delay_profile
from .modem import SUPPORTED_ORDERS
from .noma import PowerAllocation, SicConfig
from .ofdm import OfdmConfig
from .wavelets import WaveletSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_BETA = 0.05
DEFAULT_SNR_DB = tuple(float(s) for s in range(0, 31, 2))


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SimConfig:
    backend: str = "wavelet"
    wavelet: WaveletSpec = field(default_factory=WaveletSpec)
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    modem_order: int = 16
    topology: ClusterTopology = field(default_factory=ClusterTopology)
    channel_model: str = "rayleigh"
    gains_db: tuple = (-10.0, -5.0)
    pdp: object = "flat"
    csi_error: float = 0.0
    alloc: PowerAllocation = field(default_factory=PowerAllocation)
    sic: SicConfig = field(default_factory=SicConfig)
    snr_db: tuple = DEFAULT_SNR_DB
    equalizer: str = "ls"
    trials: int = 200
    target_errors: int = 200
    seed: int = 1
    papr_blocks: int = 2000
    papr_thresholds_db: tuple = tuple(np.round(np.arange(0, 14.01, 0.1), 2).tolist())
    psd_blocks: int = 200
    psd_oversample: int = 4
    psd_seg_len: int = 256
    psd_overlap: float = 0.5
    psd_window: str = "hann"

    def __post_init__(self):
        check = _validate_field
        check("backend", self.backend in ("fft", "wavelet"), "must be 'fft' or 'wavelet'")
        check("modem.order", self.modem_order in SUPPORTED_ORDERS, f"must be one of {SUPPORTED_ORDERS}")
        check("channel.model", self.channel_model in ("rayleigh", "unity"), "must be 'rayleigh' or 'unity'")
        check("sim.equalizer", self.equalizer in ("ls", "mmse"), "must be 'ls' or 'mmse'")
        check("snr.grid_db", len(self.snr_db) > 0, "must not be empty")
        check("snr.grid_db", all(b > a for a, b in zip(self.snr_db, self.snr_db[1:])), "must be ascending")
        check("sim.trials", self.trials >= 1, "must be >= 1")
        check("sim.target_errors", self.target_errors >= 1, "must be >= 1")
        check("channel.csi_error", self.csi_error >= 0, "must be >= 0")
        pow2 = self.ofdm.subcarriers
        check("wavelet.levels", self.backend != "wavelet" or pow2 % (1 << self.wavelet.levels) == 0,
              f"2**levels must divide the block size {pow2}")
        check("psd.oversample", self.psd_oversample >= 1 and
              (self.psd_oversample & (self.psd_oversample - 1)) == 0, "must be a power of two")
        check("psd.overlap", 0 <= self.psd_overlap < 1, "must lie in [0, 1)")
        check("papr.n_blocks", self.papr_blocks >= 1, "must be >= 1")
        check("psd.n_blocks", self.psd_blocks >= 1, "must be >= 1")
        try:
            power_delay_profile(self.pdp)
        except ValueError as exc:
            raise ConfigError("channel.pdp", str(exc)) from None

    @property
    def block_size(self) -> int:
        """Data symbols per block (equal for both back-ends)."""
        return self.ofdm.subcarriers

    @property
    def label(self) -> str:
        return self.backend if self.backend == "fft" else f"wavelet-{self.wavelet.family}"

    def with_(self, **flat) -> "SimConfig":
        return from_flat({**to_flat(self), **flat})


def _validate_field(key, ok, message):
    if not ok:
        raise ConfigError(key, message)


# flat key -> (parser, getter)
def _as_int(v):
    if isinstance(v, bool) or not float(v).is_integer():
        raise ValueError(f"expected an integer, got {v!r}")
    return int(v)


def _as_float(v):
    if isinstance(v, bool):
        raise ValueError(f"expected a number, got {v!r}")
    return float(v)


def _as_str(v):
    if not isinstance(v, str):
        raise ValueError(f"expected a string, got {v!r}")
    return v


def _as_floats(v):
    if isinstance(v, (int, float)):
        v = [v]
    return tuple(_as_float(x) for x in v)


def _as_pdp(v):
    return v if isinstance(v, str) else [_as_float(x) for x in v]


KEYS = {
    "backend": (_as_str, lambda c: c.backend),
    "wavelet.family": (_as_str, lambda c: c.wavelet.family),
    "wavelet.levels": (_as_int, lambda c: c.wavelet.levels),
    "ofdm.subcarriers": (_as_int, lambda c: c.ofdm.subcarriers),
    "ofdm.cp_ratio": (_as_float, lambda c: c.ofdm.cp_len / c.ofdm.block_len),
    "modem.order": (_as_int, lambda c: c.modem_order),
    "topology.tx_antennas": (_as_int, lambda c: c.topology.tx_antennas),
    "topology.clusters": (_as_int, lambda c: c.topology.clusters),
    "channel.model": (_as_str, lambda c: c.channel_model),
    "channel.gain_group1_db": (_as_float, lambda c: c.gains_db[0]),
    "channel.gain_group2_db": (_as_float, lambda c: c.gains_db[1]),
    "channel.pdp": (_as_pdp, lambda c: c.pdp if isinstance(c.pdp, str) else list(c.pdp)),
    "channel.csi_error": (_as_float, lambda c: c.csi_error),
    "alloc.alpha_near": (_as_float, lambda c: c.alloc.alpha_near),
    "sic.mode": (_as_str, lambda c: c.sic.mode),
    "sic.beta": (_as_float, lambda c: c.sic.beta),
    "snr.grid_db": (_as_floats, lambda c: list(c.snr_db)),
    "sim.equalizer": (_as_str, lambda c: c.equalizer),
    "sim.trials": (_as_int, lambda c: c.trials),
    "sim.target_errors": (_as_int, lambda c: c.target_errors),
    "sim.seed": (_as_int, lambda c: c.seed),
    "papr.n_blocks": (_as_int, lambda c: c.papr_blocks),
    "papr.thresholds_db": (_as_floats, lambda c: list(c.papr_thresholds_db)),
    "psd.n_blocks": (_as_int, lambda c: c.psd_blocks),
    "psd.oversample": (_as_int, lambda c: c.psd_oversample),
    "psd.seg_len": (_as_int, lambda c: c.psd_seg_len),
    "psd.overlap": (_as_float, lambda c: c.psd_overlap),
    "psd.window": (_as_str, lambda c: c.psd_window),
}


def to_flat(cfg: SimConfig) -> dict:
    return {k: get(cfg) for k, (_, get) in KEYS.items()}


def flatten(tree: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        else:
            out[key] = v
    return out


def from_flat(flat: dict) -> SimConfig:
    """Build a validated :class:`SimConfig`; unset keys keep their defaults."""
    vals = {}
    for key, raw in flat.items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        try:
            vals[key] = KEYS[key][0](raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, str(exc)) from None

    base = SimConfig()
    kw = {}

    def build(keys, fn):
        try:
            return fn()
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(keys, str(exc)) from None

    get = vals.get
    kw["wavelet"] = build("wavelet.family", lambda: WaveletSpec(
        get("wavelet.family", base.wavelet.family), get("wavelet.levels", base.wavelet.levels)))
    kw["ofdm"] = build("ofdm.cp_ratio", lambda: OfdmConfig.from_ratio(
        get("ofdm.subcarriers", base.ofdm.subcarriers),
        get("ofdm.cp_ratio", base.ofdm.cp_len / base.ofdm.block_len)))
    kw["topology"] = build("topology.tx_antennas", lambda: ClusterTopology(
        get("topology.tx_antennas", base.topology.tx_antennas),
        get("topology.clusters", base.topology.clusters)))
    kw["alloc"] = build("alloc.alpha_near", lambda: PowerAllocation.from_near(
        get("alloc.alpha_near", base.alloc.alpha_near)))
    mode = get("sic.mode", base.sic.mode)
    beta = get("sic.beta", DEFAULT_BETA if mode == "imperfect" else 0.0)
    kw["sic"] = build("sic.beta", lambda: SicConfig(mode, beta))
    kw["gains_db"] = (get("channel.gain_group1_db", base.gains_db[0]),
                      get("channel.gain_group2_db", base.gains_db[1]))
    if "channel.pdp" in vals:
        pdp = vals["channel.pdp"]
        kw["pdp"] = pdp if isinstance(pdp, str) else tuple(pdp)

    simple = {
        "backend": "backend", "modem.order": "modem_order", "channel.model": "channel_model",
        "channel.csi_error": "csi_error", "snr.grid_db": "snr_db", "sim.equalizer": "equalizer",
        "sim.trials": "trials", "sim.target_errors": "target_errors", "sim.seed": "seed",
        "papr.n_blocks": "papr_blocks", "papr.thresholds_db": "papr_thresholds_db",
        "psd.n_blocks": "psd_blocks", "psd.oversample": "psd_oversample",
        "psd.seg_len": "psd_seg_len", "psd.overlap": "psd_overlap", "psd.window": "psd_window",
    }
    for key, attr in simple.items():
        if key in vals:
            kw[attr] = vals[key]
    if "sim.seed" in vals and not 0 <= vals["sim.seed"] < 2 ** 64:
        raise ConfigError("sim.seed", "must be an unsigned 64-bit integer")
    return replace(base, **kw)


def load_flat(path) -> dict:
    """Read a TOML config, or the arm config of a single-arm JSON manifest, as flat keys."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror or exc}") from None
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from None
        if "arms" in data:
            if len(data["arms"]) != 1:
                raise ConfigError("arms", "manifest holds several arms; pick one arm's config")
            data = data["arms"][0]
        return flatten(data.get("config", data))
    try:
        return flatten(tomllib.loads(text))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"invalid TOML: {exc}") from None


def parse_config(path=None, overrides: dict | None = None) -> SimConfig:
    """Defaults, then the file at ``path`` (if any), then ``overrides``."""
    flat = load_flat(path) if path is not None else {}
    flat.update(overrides or {})
    return from_flat(flat)


def noise_var_from_snr(snr_db) -> float:
    """Noise variance for unit symbol energy; ``inf`` dB gives a noiseless link."""
    return 0.0 if math.isinf(snr_db) and snr_db > 0 else 10 ** (-snr_db / 10)
