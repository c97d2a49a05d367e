"""Persistence diagrams by boundary matrix reduction over the two-element field."""
from __future__ import annotations

import io
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .filtration import Filtration, FiltrationError, format_short


class PersistenceDiagram:
    """Multiset of ``(dim, birth, death)`` triples; ``death`` may be ``inf``."""

    def __init__(self, points: Iterable[Tuple[int, float, float]] = ()):
        pts = sorted((int(d), float(b), float(e)) for d, b, e in points)
        for d, b, e in pts:
            if e < b:
                raise ValueError(f"death {e} before birth {b}")
        self.points: List[Tuple[int, float, float]] = pts

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other):
        return isinstance(other, PersistenceDiagram) and self.points == other.points

    def __repr__(self):
        return f"PersistenceDiagram({self.points!r})"

    @property
    def dims(self) -> List[int]:
        return sorted({d for d, _, _ in self.points})

    def in_dim(self, dim: int) -> np.ndarray:
        """``(k, 2)`` array of (birth, death) pairs in one dimension."""
        arr = np.array([(b, e) for d, b, e in self.points if d == dim], dtype=float)
        return arr.reshape(-1, 2)

    def lifespans(self, dim: int) -> np.ndarray:
        a = self.in_dim(dim)
        return a[:, 1] - a[:, 0]

    def scaled(self, c: float) -> "PersistenceDiagram":
        return PersistenceDiagram((d, c * b, c * e) for d, b, e in self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("dim,birth,death\n")
        for d, b, e in self.points:
            buf.write(f"{d},{format_short(b)},{format_short(e)}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PersistenceDiagram":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].replace(" ", "") != "dim,birth,death":
            raise ValueError("diagram CSV must start with the header 'dim,birth,death'")
        pts = []
        for ln in lines[1:]:
            d, b, e = ln.split(",")
            pts.append((int(d), float(b), float(e)))
        return cls(pts)


def boundary_indices(F: Filtration) -> List[List[int]]:
    """Boundary of every simplex as indices of its facets in ``F``."""
    position = {s: i for i, s in enumerate(F.simplices)}
    cols = []
    for i, s in enumerate(F.simplices):
        if len(s) == 1:
            cols.append([])
            continue
        col = []
        for j in range(len(s)):
            pos = position.get(s[:j] + s[j + 1:])
            if pos is None:
                raise FiltrationError(f"face {s[:j] + s[j + 1:]} of {s} is not listed")
            if pos > i:
                raise FiltrationError(f"face of {s} listed after it")
            col.append(pos)
        cols.append(col)
    return cols


def persistence_pairs(F: Filtration, max_dim: Optional[int] = None):
    """Persistence pairs ``(birth_index, death_index)`` and essential indices.

    Columns are reduced from the top dimension down so that columns of
    simplices already known to be paired as creators are skipped.
    """
    top = F.dimension
    if max_dim is None:
        max_dim = top
    cols = boundary_indices(F)
    dims = [len(s) - 1 for s in F.simplices]
    pivot_of = {}  # low row -> column that owns it
    reduced = {}
    cleared = set()
    for d in range(min(top, max_dim + 1), 0, -1):
        for j in (i for i in range(len(F)) if dims[i] == d):
            if j in cleared:
                continue
            col = set(cols[j])
            while col:
                low = max(col)
                owner = pivot_of.get(low)
                if owner is None:
                    pivot_of[low] = j
                    reduced[j] = col
                    cleared.add(low)
                    break
                col ^= reduced[owner]
    pairs = sorted((low, j) for low, j in pivot_of.items())
    paired = set(pivot_of) | set(pivot_of.values())
    essential = [i for i in range(len(F)) if dims[i] <= max_dim and i not in paired and i not in reduced]
    return pairs, essential


def reduce(F: Filtration, max_dim: Optional[int] = None, keep_zero: bool = False) -> PersistenceDiagram:
    """Persistence diagram of ``F`` in dimensions ``0..max_dim``.

    Zero-length pairs are dropped unless ``keep_zero`` is set.
    """
    if max_dim is None:
        max_dim = F.dimension
    pairs, essential = persistence_pairs(F, max_dim)
    v = F.values
    pts = []
    for b, e in pairs:
        d = len(F.simplices[b]) - 1
        if d > max_dim:
            continue
        if keep_zero or v[e] > v[b]:
            pts.append((d, v[b], v[e]))
    for b in essential:
        pts.append((len(F.simplices[b]) - 1, v[b], math.inf))
    return PersistenceDiagram(pts)


def betti_at(D: PersistenceDiagram, dim: int, alpha: float) -> int:
    """Number of classes alive at ``alpha`` (``birth <= alpha < death``)."""
    return sum(1 for d, b, e in D if d == dim and b <= alpha < e)
