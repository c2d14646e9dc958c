"""CSV and JSON sidecar output.

One dialect everywhere: comma separators, '.' decimal point, LF endings,
floats via repr (shortest round-trip).  Nothing here depends on locale or
wall-clock, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Sequence

CSV_HEADER = (
    "experiment",
    "N",
    "tau",
    "delta",
    "kappa",
    "param",
    "value",
    "stderr",
    "n",
    "seed0",
)

Row = tuple

CENSORED = "censored"


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if "," in text or "\n" in text or '"' in text:
        raise ValueError(f"cell needs quoting, which this dialect forbids: {text!r}")
    return text


def write_csv(path: str | Path, rows: Sequence[Row], header: Sequence[str] = CSV_HEADER) -> None:
    lines = [",".join(header)]
    width = len(header)
    for row in rows:
        if len(row) != width:
            raise ValueError(f"row width {len(row)} != header width {width}: {row!r}")
        lines.append(",".join(format_cell(c) for c in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def sidecar_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    if p.suffix == ".csv":
        return p.with_suffix(".json")
    return p.with_name(p.name + ".json")


def write_sidecar(csv_path: str | Path, config: dict) -> Path:
    """Echo the full resolved config next to the CSV it produced."""
    target = sidecar_path(csv_path)
    target.write_text(
        json.dumps(config, sort_keys=True, indent=2) + "\n",
        encoding="ascii",
        newline="\n",
    )
    return target


def data_dir() -> Path:
    """Default output root: $LPP_DATA_DIR if set, else the working directory."""
    root = os.environ.get("LPP_DATA_DIR")
    return Path(root) if root else Path.cwd()
