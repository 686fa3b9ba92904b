"""Deterministic CSV/JSON writers for every emitted table and summary."""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return x


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if x == "":
        return None
    return x


def write_table(out_dir, stem: str, header, rows, fmt: str = "csv") -> Path:
    """Write ``stem.csv`` (header row first) or ``stem.json`` (list of records)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out_dir / f"{stem}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows([_cell(x) for x in row] for row in rows)
    elif fmt == "json":
        path = out_dir / f"{stem}.json"
        records = [{k: _json_value(v) for k, v in zip(header, row)} for row in rows]
        with open(path, "w") as fh:
            json.dump(records, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def write_json(out_dir, name: str, obj) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_schema(name: str) -> dict:
    """Published JSON schema ``schemas/<name>.schema.json`` shipped with the package."""
    text = resources.files("diracwalk").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
