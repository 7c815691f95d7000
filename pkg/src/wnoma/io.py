"""CSV emission, coefficient-table dumps and run manifests."""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path

from .wavelets import FAMILIES, wavelet_filters

CSV_HEADER = ("kind", "backend", "sic_mode", "x", "y", "n_samples")
MANIFEST_VERSION = 1


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def emit_csv(records, path) -> Path:
    """Write records ordered by (kind, backend, x); floats carry 9 significant digits."""
    path = Path(path)
    rows = sorted(records, key=lambda r: (r.kind, r.backend, r.x))
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow((r.kind, r.backend, r.sic_mode, _fmt(r.x), _fmt(r.y), int(r.n_samples)))
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def emit_filters(path, families=FAMILIES) -> Path:
    """Dump ``g`` and ``h`` for each family, one row per tap."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("family", "n", "g", "h"))
        for fam in families:
            g, h = wavelet_filters(fam)
            for n, (gn, hn) in enumerate(zip(g, h)):
                w.writerow((fam, n, f"{gn:.17g}", f"{hn:.17g}"))
    return path


def write_manifest(path, command: str, seed: int, arms, version: str) -> Path:
    """``arms`` is a list of ``{"name", "config" (flat keys), "outputs"}`` dicts."""
    path = Path(path)
    doc = {
        "manifest_version": MANIFEST_VERSION,
        "artifact_version": version,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "seed": seed,
        "arms": arms,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    return path


def read_manifest(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if "arms" not in doc or "command" not in doc:
        raise ValueError(f"{path} is not a run manifest")
    return doc
