import json

import pytest

from wnoma.config import ConfigError, SimConfig, from_flat, parse_config, to_flat, noise_var_from_snr


def test_empty_config_gives_defaults():
    cfg = parse_config()
    assert cfg == SimConfig()
    assert cfg.backend == "wavelet" and cfg.wavelet.family == "haar" and cfg.wavelet.levels == 2
    assert cfg.ofdm.subcarriers == 256 and cfg.ofdm.cp_len == 64
    assert cfg.modem_order == 16 and cfg.gains_db == (-10.0, -5.0)
    assert cfg.alloc.alpha_near == 0.05 and cfg.sic.mode == "perfect"


def test_imperfect_defaults_beta():
    assert from_flat({"sic.mode": "imperfect"}).sic.beta == 0.05
    assert from_flat({"sic.mode": "imperfect", "sic.beta": 0.2}).sic.beta == 0.2


@pytest.mark.parametrize("flat,key", [
    ({"alloc.alpha_near": 0.6}, "alloc.alpha_near"),
    ({"nope": 1}, "nope"),
    ({"backend": "dct"}, "backend"),
    ({"modem.order": 8}, "modem.order"),
    ({"snr.grid_db": [10, 5]}, "snr.grid_db"),
    ({"sim.trials": 0}, "sim.trials"),
    ({"sim.trials": "many"}, "sim.trials"),
    ({"wavelet.family": "db7"}, "wavelet.family"),
    ({"sic.mode": "perfect", "sic.beta": 0.1}, "sic.beta"),
    ({"topology.tx_antennas": 2}, "topology.tx_antennas"),
])
def test_invalid_values_name_the_key(flat, key):
    with pytest.raises(ConfigError) as exc:
        from_flat(flat)
    assert exc.value.key == key


def test_toml_tables_and_dotted_keys(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('backend = "fft"\n"sic.mode" = "imperfect"\n[ofdm]\nsubcarriers = 128\ncp_ratio = 0.2\n')
    cfg = parse_config(p, {"sim.seed": 9})
    assert cfg.backend == "fft" and cfg.sic.beta == 0.05
    assert cfg.ofdm.cp_len == 32 and cfg.seed == 9
    p.write_text("backend = [")
    with pytest.raises(ConfigError):
        parse_config(p)


def test_flat_roundtrip_and_manifest_arm(tmp_path):
    cfg = from_flat({"backend": "fft", "channel.pdp": "exp4", "sic.mode": "imperfect", "sim.equalizer": "mmse"})
    assert from_flat(to_flat(cfg)) == cfg
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"command": "ser", "arms": [{"name": "a", "config": to_flat(cfg)}]}))
    assert parse_config(p) == cfg
    assert cfg.with_(**{"sim.seed": 4}).seed == 4


def test_noise_var():
    assert noise_var_from_snr(10.0) == pytest.approx(0.1)
    assert noise_var_from_snr(float("inf")) == 0.0
