"""Sample files, curve CSVs and run manifests."""

from __future__ import annotations

import json
import math

import numpy as np

from .engine import OutcomeBatch

SAMPLES_SCHEMA = "altfpt-samples/1"
MANIFEST_SCHEMA = "altfpt.manifest/1"


class InputFormatError(ValueError):
    """A sample file or config document could not be parsed."""


def fmt(x):
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))


def write_samples(path, batch: OutcomeBatch):
    lines = [f"# {SAMPLES_SCHEMA} t_max={fmt(batch.t_max)}", "outcome,time"]
    t_max = fmt(batch.t_max)
    lines.extend(f"censored,{t_max}" if math.isnan(t) else f"crossed,{t!r}" for t in batch.times.tolist())
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_samples(path) -> OutcomeBatch:
    with open(path) as fh:
        header = fh.readline().strip()
        columns = fh.readline().strip()
        body = fh.read().split()
    prefix = f"# {SAMPLES_SCHEMA} t_max="
    if not header.startswith(prefix):
        raise InputFormatError(f"{path}: first line must start with {prefix!r}")
    if columns != "outcome,time":
        raise InputFormatError(f"{path}: second line must be 'outcome,time'")
    try:
        t_max = float(header[len(prefix):])
    except ValueError:
        raise InputFormatError(f"{path}: bad t_max in header {header!r}") from None
    times = np.empty(len(body))
    for i, row in enumerate(body):
        tag, _, value = row.partition(",")
        try:
            if tag == "crossed":
                times[i] = float(value)
                if not 0.0 < times[i] <= t_max:
                    raise ValueError
            elif tag == "censored":
                times[i] = np.nan
            else:
                raise ValueError
        except ValueError:
            raise InputFormatError(f"{path}: malformed row {i + 3}: {row!r}") from None
    if times.size == 0:
        raise InputFormatError(f"{path}: no sample rows")
    return OutcomeBatch(times, t_max)


def write_csv(path, columns):
    """Write named equal-length columns with round-trip float formatting."""
    names = list(columns)
    rows = zip(*(np.asarray(columns[c], dtype=float).tolist() for c in names))
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv(path):
    with open(path) as fh:
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(names)}


def write_manifest(path, manifest):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
