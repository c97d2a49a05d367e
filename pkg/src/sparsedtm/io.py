"""Reading and writing points, matrices, measures, diagrams and JSON records."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .dtm import DiscreteMeasure
from .filtration import format_short
from .persistence import PersistenceDiagram


def _rows(path) -> list:
    text = Path(path).read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_points(path) -> np.ndarray:
    """Point CSV: one point per line, comma-separated coordinates, no header."""
    rows = [[float(v) for v in ln.split(",")] for ln in _rows(path)]
    if not rows:
        raise ValueError(f"{path}: no points")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: rows have different lengths {sorted(widths)}")
    return np.array(rows, dtype=float)


def read_matrix(path) -> np.ndarray:
    """Matrix CSV: ``n`` lines of ``n`` comma-separated entries."""
    mat = read_points(path)
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{path}: matrix is {mat.shape[0]}x{mat.shape[1]}, not square")
    return mat


def write_points(path, X: np.ndarray) -> None:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    lines = [",".join(format_short(v) for v in row) for row in X]
    Path(path).write_text("\n".join(lines) + "\n")


write_matrix = write_points


def read_measure(path) -> DiscreteMeasure:
    """Measure CSV: lines ``point_id,mass``."""
    ids, masses = [], []
    for ln in _rows(path):
        i, m = ln.split(",")
        ids.append(int(i))
        masses.append(float(m))
    return DiscreteMeasure(np.array(ids), np.array(masses))


def write_measure(path, mu: DiscreteMeasure) -> None:
    lines = [f"{i},{format_short(m)}" for i, m in zip(mu.ids.tolist(), mu.masses.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def read_diagram(path) -> PersistenceDiagram:
    return PersistenceDiagram.from_csv(Path(path).read_text())


def write_diagram(path, D: PersistenceDiagram) -> None:
    Path(path).write_text(D.to_csv())


def write_named_matrix(path, names: Sequence[str], mat: np.ndarray) -> None:
    """Square table with a header row and a name column; ``nan`` marks undefined entries."""
    lines = ["," + ",".join(names)]
    for name, row in zip(names, mat):
        lines.append(name + "," + ",".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _cell(v: float) -> str:
    return "nan" if math.isnan(v) else format_short(float(v))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return format_short(obj) if not math.isnan(obj) else None
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
