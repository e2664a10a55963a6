"""Bit-stable report emission: CSV with provenance comment rows and canonical JSON.

All floating-point output goes through a fixed 12-significant-digit format so
that identical configurations produce byte-identical files.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__


def fmt(value) -> str:
    """Canonical scalar formatting: 12 significant digits for floats."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def provenance_lines(provenance: dict) -> list:
    lines = [f"# disclab {__version__}"]
    for key in sorted(provenance):
        lines.append(f"# {key} = {fmt(provenance[key])}")
    return lines


def write_csv(path, header, rows, provenance: dict) -> None:
    """CSV with `# key = value` provenance comments, then header, then rows."""
    out = provenance_lines(provenance)
    out.append(",".join(header))
    for row in rows:
        out.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(out) + "\n")


def _canonical(obj):
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if f != f or f in (float("inf"), float("-inf")):
            return None
        return float(f"{f:.12g}")
    return obj


def write_json(path, payload: dict, provenance: dict | None = None) -> None:
    doc = {"disclab_version": __version__}
    if provenance:
        doc["provenance"] = _canonical(provenance)
    doc.update(_canonical(payload))
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def json_text(payload: dict, provenance: dict | None = None) -> str:
    doc = {"disclab_version": __version__}
    if provenance:
        doc["provenance"] = _canonical(provenance)
    doc.update(_canonical(payload))
    return json.dumps(doc, sort_keys=True, indent=2)
