"""File formats: state JSON, CSV tables and reproducibility manifests."""

from __future__ import annotations

import csv
import datetime as _dt
import json
import os
from pathlib import Path

import numpy as np

from .tomography import QuadratureDataset, phase_grid

STATE_FORMAT = "fockbench-state-v1"
DATASET_FORMAT = "fockbench-quadratures-v1"
SWEEP_FORMAT = "fockbench-sweep-v1"
MANIFEST_FORMAT = "fockbench-manifest-v1"

SWEEP_HEADER = ["alpha", "r", "gamma", "xi", "eta", "delta_nats", "nu", "click_weight"]


class FormatError(ValueError):
    """A file does not match the expected format or version."""


def state_to_json(rho: np.ndarray) -> str:
    rho = np.asarray(rho, dtype=complex)
    doc = {
        "version": STATE_FORMAT,
        "dim": int(rho.shape[0]),
        "re": rho.real.tolist(),
        "im": rho.imag.tolist(),
    }
    # json writes floats with repr(), the shortest string that round-trips exactly
    return json.dumps(doc, indent=1) + "\n"


def state_from_json(text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"state file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("version") != STATE_FORMAT:
        raise FormatError(f"expected version {STATE_FORMAT!r}, "
                          f"got {doc.get('version') if isinstance(doc, dict) else None!r}")
    try:
        dim = int(doc["dim"])
        rho = np.array(doc["re"], dtype=float) + 1j * np.array(doc["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed state file: {exc}") from None
    if rho.shape != (dim, dim):
        raise FormatError(f"state matrix has shape {rho.shape}, expected ({dim}, {dim})")
    return rho


def save_state(path, rho: np.ndarray) -> None:
    Path(path).write_text(state_to_json(rho))


def load_state(path) -> np.ndarray:
    return state_from_json(Path(path).read_text())


def timestamp() -> str:
    """ISO-8601 UTC time, pinned by ``SOURCE_DATE_EPOCH`` when it is set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        moment = _dt.datetime.now(tz=_dt.timezone.utc).replace(microsecond=0)
    return moment.isoformat()


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".manifest.json")


def write_manifest(path, command: str, params: dict, seed: int | None = None,
                   formats: dict | None = None) -> Path:
    from . import __version__

    doc = {
        "format": MANIFEST_FORMAT,
        "command": command,
        "params": params,
        "seed": seed,
        "versions": {"package": __version__, **(formats or {})},
        "timestamp": timestamp(),
    }
    out = manifest_path(path)
    out.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return out


def read_manifest(path) -> dict | None:
    side = manifest_path(path)
    if not side.exists():
        return None
    return json.loads(side.read_text())


def write_sweep_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row.as_tuple()])


def read_sweep_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SWEEP_HEADER:
            raise FormatError(f"unexpected sweep header {reader.fieldnames}")
        return [{k: float(v) for k, v in rec.items()} for rec in reader]


def write_wigner_csv(path, grid) -> None:
    """Rows ``x,p,w`` ordered by ``x`` first, then ``p``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "p", "w"])
        for i, x in enumerate(grid.xs):
            for j, p in enumerate(grid.ps):
                writer.writerow([repr(float(x)), repr(float(p)), repr(float(grid.values[i, j]))])


def write_dataset_csv(path, data: QuadratureDataset) -> None:
    phases = data.phases
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin", "phase_rad", "x"])
        for b, x in zip(data.bins.tolist(), data.x.tolist()):
            writer.writerow([b, repr(float(phases[b])), repr(x)])


def read_dataset_csv(path, n_bins: int | None = None) -> QuadratureDataset:
    """Load a dataset; the bin count comes from the argument, the sidecar or the phases."""
    bins, xs, phase_of = [], [], {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["bin", "phase_rad", "x"]:
            raise FormatError(f"unexpected dataset header {header}")
        for line_no, rec in enumerate(reader, start=2):
            try:
                b, phase, x = int(rec[0]), float(rec[1]), float(rec[2])
            except (IndexError, ValueError):
                raise FormatError(f"{path}:{line_no}: malformed row {rec}") from None
            bins.append(b)
            xs.append(x)
            phase_of[b] = phase
    if not bins:
        raise FormatError(f"{path} contains no samples")
    if n_bins is None:
        manifest = read_manifest(path)
        if manifest and "bins" in manifest.get("params", {}):
            n_bins = int(manifest["params"]["bins"])
        else:
            n_bins = _infer_bins(phase_of)
    try:
        data = QuadratureDataset(np.array(bins), np.array(xs), n_bins)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    expected = phase_grid(n_bins)
    for b, phase in phase_of.items():
        if not np.isclose(expected[b], phase, atol=1e-9):
            raise FormatError(f"bin {b} has phase {phase}, expected {expected[b]}")
    return data


def _infer_bins(phase_of: dict) -> int:
    for b, phase in phase_of.items():
        if b > 0 and phase > 0:
            return int(round(np.pi * b / phase))
    return max(phase_of) + 1
