"""CSV tables, hashes and the run manifest.

Bytes are the contract here: floats are written with ``repr`` so they
round-trip exactly, rows keep their given order, and nothing
non-deterministic (timestamps, absolute paths, dict iteration of unsorted
inputs) leaks into the files.  Reruns with the same config must hash
identically.
"""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path

import numpy as np


def format_cell(value) -> str:
    # bool first: it is an int subclass, and we want 0/1 columns
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def read_csv(path):
    """Read back a table as ``(header, columns)`` with string cells."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                columns[name].append(cell)
    return header, columns


def floats(columns, name) -> np.ndarray:
    return np.array([float(c) for c in columns[name]], dtype=float)


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def flatten_config(mapping, prefix="") -> list:
    """Nested dict -> sorted ``key.subkey = value`` lines for the manifest."""
    lines = []
    for key in sorted(mapping):
        value = mapping[key]
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            lines.extend(flatten_config(value, prefix=f"{dotted}."))
        else:
            lines.append(f"{dotted} = {format_cell(value)}")
    return lines


def write_manifest(path, *, scenario, version, config_lines, diagnostics,
                   aborted_replicates, artifacts) -> None:
    """Plain-text run metadata; every artifact appears with its sha256."""
    lines = [
        "hiermap run manifest",
        f"version: {version}",
        f"scenario: {scenario}",
        "",
        "[config]",
        *config_lines,
        "",
        "[diagnostics]",
        f"aborted_replicates: {int(aborted_replicates)}",
        *diagnostics,
        "",
        "[artifacts]",
    ]
    for name in sorted(artifacts):
        lines.append(f"sha256:{artifacts[name]}  {name}")
    Path(path).write_text("\n".join(lines) + "\n")
