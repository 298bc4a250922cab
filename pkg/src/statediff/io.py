"""Deterministic CSV and manifest emission.

CSV layout: '#'-prefixed metadata lines, a header row, LF endings, and
round-trip float formatting, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import os


def format_value(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(float(v))
    if hasattr(v, "item"):  # numpy scalars
        return format_value(v.item())
    return str(v)


def write_csv(path, header, rows, meta=None):
    """Write one CSV with optional metadata comment lines."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        for k, v in (meta or {}).items():
            f.write(f"# {k} = {format_value(v)}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(format_value(v) for v in row) + "\n")


def write_manifest(path, experiment, seed, config_sections, outputs, version):
    """JSON manifest echoing the fully resolved configuration."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    doc = {
        "experiment": experiment,
        "seed": seed,
        "tool_version": version,
        "config": config_sections,
        "outputs": sorted(outputs),
    }
    with open(path, "w", newline="\n") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
