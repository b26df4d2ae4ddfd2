"""File writers: trajectory/map/NOT-curve CSV, map PGM images and truth-table JSON.

Every artifact carries the configuration that produced it: CSV files get a
``<name>.config.json`` sidecar, PGM images a header comment and JSON files a
``config`` entry.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .logic import NotCurve, OperationMap, TruthTableResult
from .simulator import Trajectory


def _num(x) -> str:
    # repr gives the shortest string that round-trips to the same double
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".config.json")


def _write_sidecar(path, config):
    if config is None:
        return None
    side = sidecar_path(path)
    side.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    return side


def write_trajectory_csv(traj: Trajectory, path, config: dict | None = None) -> Path:
    """Columns ``tau, y1, v1, ..., betaC1, ...``, one row per recorded sample."""
    path = Path(path)
    n_dev = traj.states.shape[1]
    header = ["tau"]
    for d in range(n_dev):
        header += [f"y{d + 1}", f"v{d + 1}"]
    header += [f"betaC{d + 1}" for d in range(n_dev)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, tau in enumerate(traj.times):
            row = [_num(tau)]
            for d in range(n_dev):
                row += [_num(traj.states[k, d, 0]), _num(traj.states[k, d, 1])]
            row += [_num(v) for v in traj.device_voltages[k]]
            w.writerow(row)
    _write_sidecar(path, config)
    return path


def write_map_csv(omap: OperationMap, path, config: dict | None = None) -> Path:
    """Row-major grid dump; code columns of absent devices are left empty."""
    path = Path(path)
    n_dev = omap.codes.shape[0]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta1", "beta2", "code_c1", "code_c2", "code_c3", "sensitive"])
        for i, b1 in enumerate(omap.beta1_axis):
            for j, b2 in enumerate(omap.beta2_axis):
                codes = [str(int(omap.codes[d, i, j])) if d < n_dev else "" for d in range(3)]
                w.writerow([_num(b1), _num(b2), *codes, int(omap.sensitivity[i, j])])
    _write_sidecar(path, config if config is not None else omap.meta)
    return path


def write_map_pgm(omap: OperationMap, device: int, path, config: dict | None = None) -> Path:
    """Plain (P2) greyscale image of one device's codes, levels 0..16.

    beta1 runs left to right and beta2 bottom to top, like a plot with the
    origin in the lower-left corner.
    """
    path = Path(path)
    grid = np.asarray(omap.codes[device], dtype=int)
    image = grid.T[::-1]
    meta = config if config is not None else omap.meta
    lines = ["P2", "# config " + json.dumps(meta, sort_keys=True),
             f"{image.shape[1]} {image.shape[0]}", "16"]
    lines += [" ".join(str(v) for v in row) for row in image]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_pgm(path) -> tuple[np.ndarray, dict | None]:
    """Parse a P2 image written by :func:`write_map_pgm`; returns (pixels, config)."""
    config = None
    tokens = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# config "):
            config = json.loads(line[len("# config "):])
            continue
        tokens += line.split("#", 1)[0].split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    width, height = int(tokens[1]), int(tokens[2])
    pixels = np.array([int(t) for t in tokens[4:]], dtype=int).reshape(height, width)
    return pixels, config


def write_truth_table_json(result: TruthTableResult, path, config: dict | None = None) -> Path:
    path = Path(path)
    doc = result.to_dict()
    if config is not None:
        doc["config"] = config
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def write_not_curve_csv(curve: NotCurve, path, config: dict | None = None) -> Path:
    """Columns ``T, y1_minus_y2``; failed samples are left empty."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["T", "y1_minus_y2"])
        for T, diff in zip(curve.widths, curve.y_diff):
            w.writerow([_num(T), _num(diff)])
    _write_sidecar(path, config)
    return path
