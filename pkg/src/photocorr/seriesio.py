"""Shot-record file formats.

A series is stored as a CSV file with header ``shot,m1,m2`` (counts) or
``shot,v1,v2`` (volts), one row per laser shot, plus a JSON sidecar with the
same stem carrying the calibration metadata (conversion coefficients,
instrument-noise variances, unit) and any extra provenance the writer adds.
Counts round-trip exactly; voltages are written with 12 significant digits.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .montecarlo import ShotSeries


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_series(series: ShotSeries, csv_path, extra_meta=None) -> Path:
    csv_path = Path(csv_path)
    counts_mode = series.unit == "counts"
    names = ("m1", "m2") if counts_mode else ("v1", "v2")
    with open(csv_path, "w") as fh:
        fh.write(f"shot,{names[0]},{names[1]}\n")
        if counts_mode:
            for i, (a, b) in enumerate(zip(series.ch1, series.ch2)):
                fh.write(f"{i},{int(a)},{int(b)}\n")
        else:
            for i, (a, b) in enumerate(zip(series.ch1, series.ch2)):
                fh.write(f"{i},{a:.12g},{b:.12g}\n")
    meta = {
        "unit": series.unit,
        "alpha1": series.conv[0],
        "alpha2": series.conv[1],
        "noise_var1": series.instrument_noise_var[0],
        "noise_var2": series.instrument_noise_var[1],
        "pump_truncations": series.pump_truncations,
    }
    if extra_meta:
        meta.update(extra_meta)
    with open(sidecar_path(csv_path), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def read_series(csv_path) -> tuple[ShotSeries, dict]:
    """Load a CSV shot record and its sidecar; returns (series, metadata)."""
    csv_path = Path(csv_path)
    side = sidecar_path(csv_path)
    if not csv_path.exists():
        raise DataError(f"{csv_path}: no such file")
    meta = {}
    if side.exists():
        with open(side) as fh:
            meta = json.load(fh)
    unit = meta.get("unit", "counts")
    counts_mode = unit == "counts"
    ch1, ch2 = [], []
    with open(csv_path) as fh:
        header = fh.readline().strip()
        expected = "shot,m1,m2" if counts_mode else "shot,v1,v2"
        if header != expected:
            raise DataError(f"{csv_path}: line 1: expected header {expected!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise DataError(f"{csv_path}: line {lineno}: expected 3 fields, got {len(parts)}")
            try:
                if counts_mode:
                    ch1.append(int(parts[1]))
                    ch2.append(int(parts[2]))
                else:
                    ch1.append(float(parts[1]))
                    ch2.append(float(parts[2]))
            except ValueError as exc:
                raise DataError(f"{csv_path}: line {lineno}: {exc}") from exc
    if not ch1:
        raise DataError(f"{csv_path}: no data rows")
    dtype = np.int64 if counts_mode else float
    series = ShotSeries(
        np.asarray(ch1, dtype=dtype),
        np.asarray(ch2, dtype=dtype),
        unit,
        (meta.get("alpha1", 1.0), meta.get("alpha2", 1.0)),
        (meta.get("noise_var1", 0.0), meta.get("noise_var2", 0.0)),
        meta.get("pump_truncations", 0),
    )
    return series, meta


def write_table(path, header, rows, fmt="tsv") -> Path:
    """Tabular output with values in 12-significant-digit scientific form.

    fmt selects the container: "tsv" (default), "csv", or "json" (a list of
    row objects keyed by the header names); the path suffix is adjusted to
    match.
    """
    path = Path(path).with_suffix(f".{fmt}")
    if fmt == "json":
        payload = [{k: _jsonval(v) for k, v in zip(header, row)} for row in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        return path
    sep = {"tsv": "\t", "csv": ","}[fmt]
    with open(path, "w") as fh:
        fh.write(sep.join(header) + "\n")
        for row in rows:
            fh.write(sep.join(_fmt(v) for v in row) + "\n")
    return path


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.12e}"


def _jsonval(v):
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)
