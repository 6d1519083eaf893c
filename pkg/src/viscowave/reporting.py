"""Artifact writers: versioned CSV, JSON summaries, run manifests, figures.

Determinism contract: identical inputs produce byte-identical file
bodies.  Floats are routed through one fixed format, dict keys are
sorted on the JSON side, and no writer embeds a timestamp or hostname.
The manifest records the resolved parameters and the package version so
a result directory is self-describing.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__

__all__ = [
    "SCHEMA_VERSION",
    "format_value",
    "write_csv",
    "read_csv",
    "write_json",
    "write_manifest",
    "render_curves",
]

SCHEMA_VERSION = 1

_FLOAT_FMT = "%.12g"


def format_value(value) -> str:
    """One canonical text form per value; floats via a fixed %g width."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _FLOAT_FMT % float(value)
    return str(value)


def write_csv(path, schema: str, fieldnames: Sequence[str], rows: Sequence[Mapping]) -> Path:
    """Rows to CSV with a version comment line ahead of the header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema: viscowave.{schema} v{SCHEMA_VERSION}\n")
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format_value(row.get(k)) for k in fieldnames})
    return path


def read_csv(path) -> list[dict[str, str]]:
    """Read back a CSV written by :func:`write_csv`, skipping comment lines."""
    with open(path, newline="") as fh:
        body = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(body))


def _jsonable(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def write_manifest(outdir, name: str, kind: str, parameters: Mapping) -> Path:
    """Echo the fully resolved configuration next to the data it produced."""
    manifest = {
        "name": name,
        "kind": kind,
        "version": __version__,
        "parameters": dict(parameters),
    }
    return write_json(Path(outdir) / "manifest.json", manifest)


def render_curves(
    path,
    curves: Sequence[tuple],
    *,
    xlabel: str,
    ylabel: str,
    title: str | None = None,
    xscale: str = "linear",
    yscale: str = "linear",
    guides: Sequence[tuple] = (),
) -> Path:
    """Line plot of (x, y, label) curves; ``guides`` are dashed references.

    matplotlib is imported lazily with the Agg backend so that library
    use and figure-free runs never touch a display stack.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for x, y, label in curves:
        ax.plot(x, y, marker="o", markersize=3, linewidth=1.2, label=label)
    for x, y, label in guides:
        ax.plot(x, y, linestyle="--", color="0.4", linewidth=1.0, label=label)
    ax.set_xscale(xscale)
    ax.set_yscale(yscale)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if curves or guides:
        ax.legend(fontsize=8, framealpha=0.6)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
