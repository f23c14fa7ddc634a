"""Deterministic CSV/JSON writers shared by the CLI.

Every CSV gets a `#` comment line carrying the full run configuration and a
header row; floats use fixed `%.6e` scientific formatting so identical
configurations produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


def resolve_out(path: str | os.PathLike, out_dir: str | None = None) -> Path:
    """Apply the QPI_OUT_DIR override (or explicit out_dir) to a relative path."""
    p = Path(path)
    if p.is_absolute():
        return p
    base = out_dir or os.environ.get("QPI_OUT_DIR", ".")
    out = Path(base) / p
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def fmt(value) -> str:
    if isinstance(value, complex):
        return f"{value.real:.6e},{value.imag:.6e}"
    if isinstance(value, float):
        return f"{value:.6e}"
    return str(value)


def write_csv(path, columns: list[str], rows, config: dict, out_dir: str | None = None) -> Path:
    """Write rows of scalars; complex cells must be pre-split into two columns."""
    p = resolve_out(path, out_dir)
    lines = ["# config: " + json.dumps(config, sort_keys=True, default=str)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    p.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return p


def write_json(path, payload: dict, out_dir: str | None = None) -> Path:
    p = resolve_out(path, out_dir)
    p.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8", newline="\n")
    return p
