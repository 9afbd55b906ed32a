"""Record serialization: summary.json, trials.csv, config.snapshot.

Outputs are byte-deterministic for a given record: floats go out in full
precision scientific notation, JSON keys are sorted, and no timestamps or
environment data are written.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .config import RunConfig, emit_snapshot
from .experiments.base import ExperimentRecord

__all__ = ["write_record", "record_paths"]


def _csv_cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    return format(f, ".17e")


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return None if math.isnan(f) else f
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def record_paths(out_dir: str) -> dict[str, str]:
    return {
        "summary": os.path.join(out_dir, "summary.json"),
        "trials": os.path.join(out_dir, "trials.csv"),
        "snapshot": os.path.join(out_dir, "config.snapshot"),
    }


def write_record(record: ExperimentRecord, out_dir: str, config: RunConfig | None = None) -> dict[str, str]:
    """Emit the three record files; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = record_paths(out_dir)

    payload = {
        "experiment": record.kind,
        "master_seed": record.master_seed,
        "trials": record.trials,
        "summary": _jsonable(record.summary),
        "series": _jsonable(record.series),
        "notes": list(record.notes),
        "warnings": list(record.warnings),
    }
    with open(paths["summary"], "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")

    columns = list(record.table)
    n_rows = len(record.table[columns[0]]) if columns else 0
    with open(paths["trials"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for i in range(n_rows):
            fh.write(",".join(_csv_cell(record.table[c][i]) for c in columns) + "\n")

    if config is not None:
        with open(paths["snapshot"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(emit_snapshot(config))
    return paths
