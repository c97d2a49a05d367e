"""Bottleneck distances and signal-to-noise ratios of persistence diagrams."""
from __future__ import annotations

import math
from typing import Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .persistence import PersistenceDiagram

DiagramLike = Union[PersistenceDiagram, np.ndarray]


class ScaleError(ValueError):
    """Raised when a diagram cannot be moved to log scale."""


def _pairs(D: DiagramLike, dim: int) -> np.ndarray:
    if isinstance(D, PersistenceDiagram):
        return D.in_dim(dim)
    arr = np.asarray(D, dtype=float)
    return arr.reshape(-1, 2)


def _split(A: np.ndarray):
    inf = np.isinf(A[:, 1])
    return A[~inf], np.sort(A[inf, 0])


def _perfect_matching_exists(A, B, r, cross, half_a, half_b) -> bool:
    n, m = len(A), len(B)
    rows, cols = [], []
    # left: A then diagonal copies of B; right: B then diagonal copies of A
    ai, bj = np.nonzero(cross <= r)
    rows.append(ai)
    cols.append(bj)
    ok_a = np.nonzero(half_a <= r)[0]
    rows.append(ok_a)
    cols.append(m + ok_a)
    ok_b = np.nonzero(half_b <= r)[0]
    rows.append(n + ok_b)
    cols.append(ok_b)
    dl, dr = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
    rows.append(n + dl.ravel())
    cols.append(m + dr.ravel())
    r_idx = np.concatenate(rows)
    c_idx = np.concatenate(cols)
    size = n + m
    G = csr_matrix((np.ones(len(r_idx), dtype=np.int8), (r_idx, c_idx)), shape=(size, size))
    match = maximum_bipartite_matching(G, perm_type="column")
    return bool(np.all(match >= 0))


def finite_bottleneck(A: np.ndarray, B: np.ndarray) -> float:
    """Bottleneck distance between two diagrams with finite deaths only."""
    n, m = len(A), len(B)
    if n == 0 and m == 0:
        return 0.0
    half_a = (A[:, 1] - A[:, 0]) / 2.0
    half_b = (B[:, 1] - B[:, 0]) / 2.0
    if n == 0:
        return float(half_b.max())
    if m == 0:
        return float(half_a.max())
    cross = np.maximum(
        np.abs(A[:, None, 0] - B[None, :, 0]), np.abs(A[:, None, 1] - B[None, :, 1])
    )
    cand = np.unique(np.concatenate([cross.ravel(), half_a, half_b, [0.0]]))
    # the answer is max(half-lifespans) at worst: every point to the diagonal
    upper = max(half_a.max(), half_b.max())
    cand = cand[cand <= upper]
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching_exists(A, B, cand[mid], cross, half_a, half_b):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def _bottleneck_arrays(A: np.ndarray, B: np.ndarray) -> float:
    Af, Ainf = _split(A)
    Bf, Binf = _split(B)
    if len(Ainf) != len(Binf):
        return math.inf
    # sorted order is optimal for matching points on a line
    inf_part = float(np.max(np.abs(Ainf - Binf))) if len(Ainf) else 0.0
    return max(inf_part, finite_bottleneck(Af, Bf))


def bottleneck(D: DiagramLike, E: DiagramLike, dim: int = 0) -> float:
    """Exact bottleneck distance between the ``dim``-dimensional parts of two diagrams.

    Points with infinite death are matched only among themselves, by birth;
    unequal numbers of them give an infinite distance.
    """
    return _bottleneck_arrays(_pairs(D, dim), _pairs(E, dim))


def to_log(A: np.ndarray) -> np.ndarray:
    if len(A) and (np.any(A[:, 0] <= 0) or np.any(A[:, 1] <= 0)):
        raise ScaleError("log scale needs strictly positive births and deaths")
    with np.errstate(divide="ignore"):
        return np.log(A)


def log_bottleneck(D: DiagramLike, E: DiagramLike, dim: int = 0) -> float:
    """Bottleneck distance after the change of coordinates ``(b, d) -> (ln b, ln d)``."""
    return _bottleneck_arrays(to_log(_pairs(D, dim)), to_log(_pairs(E, dim)))


def snr(D: DiagramLike, dim: int, j: int) -> float:
    """Ratio of the ``j``-th largest lifespan to the next one.

    ``inf`` when the diagram has at most ``j`` points or the ``(j+1)``-th
    lifespan is zero.
    """
    if j < 1:
        raise ValueError("expected feature count j must be >= 1")
    A = _pairs(D, dim)
    life = np.sort(A[:, 1] - A[:, 0])[::-1]
    if len(life) < j + 1 or life[j] == 0:
        return math.inf
    signal, noise = life[j - 1], life[j]
    if math.isinf(noise):
        return 1.0
    return float(signal / noise)


def distance_matrix(diagrams: dict, dim: int, log: bool = False) -> np.ndarray:
    """Pairwise (log-)bottleneck distances between named diagrams, in dict order."""
    names = list(diagrams)
    f = log_bottleneck if log else bottleneck
    out = np.zeros((len(names), len(names)))
    for i in range(len(names)):
        for k in range(i + 1, len(names)):
            out[i, k] = out[k, i] = f(diagrams[names[i]], diagrams[names[k]], dim)
    return out
