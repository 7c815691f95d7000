"""Command-line front end: ``wnoma {ser,papr,psd,sumrate,filters,preset}``.

Exit codes: 0 success, 2 configuration error, 3 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, from_flat, load_flat, to_flat, tomllib
from .io import emit_csv, emit_filters, write_manifest
from .presets import PRESETS, preset
from .sim import run_papr_experiment, run_psd_experiment, run_ser_sweep, run_sumrate_sweep
from .wavelets import FAMILIES

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3
KINDS = ("ser", "papr", "psd", "sumrate")
# count-like knob that --trials maps onto for each experiment
TRIALS_KEY = {"ser": "sim.trials", "sumrate": "sim.trials", "papr": "papr.n_blocks", "psd": "psd.n_blocks"}


def run_arm(kind: str, cfg, workers=None) -> dict:
    """Records of one arm keyed by output-file suffix."""
    if kind == "ser":
        recs = run_ser_sweep(cfg, workers)
        return {user: [r for r in recs if r.meta["user"] == user] for user in ("near", "far")}
    if kind == "papr":
        return {"": run_papr_experiment(cfg)}
    if kind == "psd":
        return {"": run_psd_experiment(cfg)}
    if kind == "sumrate":
        return {"": run_sumrate_sweep(cfg)}
    raise ValueError(f"unknown experiment {kind!r}")


def execute(kind: str, arms, out_dir, run_name: str, workers=None) -> Path:
    """Run every ``(name, cfg)`` arm, write one CSV per output and a manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, cfg in arms:
        outputs = []
        for suffix, recs in run_arm(kind, cfg, workers).items():
            stem = "_".join(p for p in (run_name, name, suffix) if p)
            outputs.append(emit_csv(recs, out_dir / f"{stem}.csv").name)
        entries.append({"name": name, "config": to_flat(cfg), "outputs": outputs})
    seed = arms[0][1].seed if arms else 0
    return write_manifest(out_dir / f"{run_name}_manifest.json", kind, seed, entries,
                          __version__)


def _value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _overrides(args, kind) -> dict:
    flat = {}
    for item in args.set or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(item, "override must look like key=value")
        flat[key.strip()] = _value(val.strip())
    if args.seed is not None:
        flat["sim.seed"] = args.seed
    if args.trials is not None:
        flat[TRIALS_KEY[kind]] = args.trials
    return flat


def _arms_from_file(path, kind, overrides):
    """A manifest reproduces all its arms; a TOML file gives one arm."""
    if Path(path).suffix == ".json":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(str(path), f"cannot read manifest: {exc}") from None
        if isinstance(doc, dict) and "arms" in doc:
            if doc["command"] != kind:
                raise ConfigError("command", f"manifest was written by {doc['command']!r}, not {kind!r}")
            return [(a["name"], from_flat({**a["config"], **overrides})) for a in doc["arms"]]
    return [("", from_flat({**load_flat(path), **overrides}))]


def _cmd_experiment(args):
    kind = args.command
    flat = _overrides(args, kind)
    if args.backend:
        flat["backend"] = args.backend
    if args.config:
        arms = _arms_from_file(args.config, kind, flat)
    else:
        arms = [("", from_flat(flat))]
    return execute(kind, arms, args.out, kind, args.workers)


def _cmd_preset(args):
    if args.name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {args.name!r}; choose from {sorted(PRESETS)}")
    scen = preset(args.name)
    flat = _overrides(args, scen.kind)
    arms = [(n, from_flat({**to_flat(c), **flat})) for n, c in scen.arms]
    if args.backend:
        arms = [(n, c) for n, c in arms if c.backend == args.backend]
    return execute(scen.kind, arms, args.out, scen.name, args.workers)


def _cmd_filters(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return emit_filters(out / "filters.csv", args.family or FAMILIES)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wnoma", description="Wavelet vs FFT multicarrier NOMA simulator")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, backend=True):
        sp.add_argument("--config", help="TOML config or a run manifest to reproduce")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--out", default="results", help="output directory")
        if backend:
            sp.add_argument("--backend", choices=("fft", "wavelet"))
        sp.add_argument("--trials", type=int, help="trials (SER/sum-rate) or blocks (PAPR/PSD)")
        sp.add_argument("--workers", type=int, help="worker threads (capped by WNOMA_THREADS)")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="flat config override")

    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        common(sp)
        sp.set_defaults(func=_cmd_experiment)
    sp = sub.add_parser("preset", help="run a named figure scenario")
    sp.add_argument("name", help=", ".join(sorted(PRESETS)))
    common(sp)
    sp.set_defaults(func=_cmd_preset)
    sp = sub.add_parser("filters", help="dump wavelet filter coefficients")
    sp.add_argument("--out", default="results")
    sp.add_argument("--family", action="append", choices=FAMILIES)
    sp.set_defaults(func=_cmd_filters)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(path)
    return EXIT_OK
