"""Sublevel-set persistence of functions sampled on a regular grid.

The box is triangulated with the Freudenthal (Kuhn) subdivision and the
function is extended piecewise linearly, so each simplex enters at the
largest value on its vertices.  For distance-like functions of a point
cloud, restricting to a box containing the cloud does not change the
homotopy type of the sublevel sets, since projecting onto the box brings
every point closer to the cloud.
"""
from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .filtration import Filtration


def grid_axes(lower: Sequence[float], upper: Sequence[float], spacing: float):
    axes = []
    for lo, hi in zip(lower, upper):
        count = int(np.ceil((hi - lo) / spacing - 1e-9)) + 1
        axes.append(lo + spacing * np.arange(count))
    return axes


def _chains(dim: int):
    """Chains of nested nonempty coordinate subsets, as 0/1 offset vectors."""
    perms = list(itertools.permutations(range(dim)))
    out = {}
    for p in perms:
        steps = []
        cur = np.zeros(dim, dtype=int)
        for axis in p:
            cur = cur.copy()
            cur[axis] = 1
            steps.append(cur)
        # every sub-chain of a maximal chain is a chain
        for r in range(1, dim + 1):
            for sub in itertools.combinations(range(dim), r):
                key = tuple(tuple(steps[i]) for i in sub)
                out[key] = [steps[i] for i in sub]
    return list(out.values())


def freudenthal_filtration(values: np.ndarray, max_dim: int | None = None) -> Filtration:
    """Lower-star filtration of the Freudenthal triangulation of a grid of values."""
    values = np.asarray(values, dtype=float)
    shape = values.shape
    dim = values.ndim
    if max_dim is None:
        max_dim = dim
    flat = values.ravel()
    strides = np.array([int(np.prod(shape[i + 1:])) for i in range(dim)])
    base = np.stack(np.meshgrid(*[np.arange(s) for s in shape], indexing="ij"), axis=-1).reshape(-1, dim)
    simplices = [[(int(i),) for i in range(flat.size)]]
    vals = [flat.tolist()]
    for chain in _chains(dim):
        if len(chain) > max_dim:
            continue
        top = chain[-1]
        ok = np.all(base + top < np.array(shape), axis=1)
        v0 = base[ok] @ strides
        verts = [v0] + [v0 + int(step @ strides) for step in chain]
        V = np.stack(verts, axis=1)
        simplices.append([tuple(row) for row in V.tolist()])
        vals.append(flat[V].max(axis=1).tolist())
    S = [s for part in simplices for s in part]
    X = [x for part in vals for x in part]
    return Filtration(S, X)


def sample_on_grid(f: Callable[[np.ndarray], np.ndarray], axes) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return f(pts).reshape(mesh[0].shape)


def bounding_box(points: np.ndarray, margin: float):
    return points.min(axis=0) - margin, points.max(axis=0) + margin


def _chunked(fn, queries: np.ndarray, chunk: int = 4096) -> np.ndarray:
    return np.concatenate([fn(queries[i:i + chunk]) for i in range(0, len(queries), chunk)])


def distance_function(points: np.ndarray):
    """Vectorised Euclidean distance to a point cloud."""
    return lambda Q: _chunked(lambda q: cdist(q, points).min(axis=1), Q)


def power_distance_function(points: np.ndarray, weights: np.ndarray):
    w2 = np.asarray(weights, dtype=float) ** 2
    return lambda Q: _chunked(lambda q: np.sqrt((cdist(q, points) ** 2 + w2).min(axis=1)), Q)


def dtm_function(points: np.ndarray, k: float):
    """Vectorised distance to the empirical measure (fractional ``k`` allowed)."""
    kf = int(np.floor(k))
    kc = int(np.ceil(k))

    def one(q):
        d2 = np.sort(np.partition(cdist(q, points) ** 2, kc - 1, axis=1)[:, :kc], axis=1)
        s = d2[:, :kf].sum(axis=1)
        if kc > kf:
            s = s + (k - kf) * d2[:, kf]
        return np.sqrt(s / k)

    return lambda Q: _chunked(one, Q)


def grid_sublevel_filtration(f, points: np.ndarray, spacing: float, margin: float | None = None, max_dim=None):
    """Filtration of the sublevel sets of ``f`` on a grid over the cloud's bounding box."""
    if margin is None:
        margin = spacing
    lo, hi = bounding_box(np.asarray(points, dtype=float), margin)
    axes = grid_axes(lo, hi, spacing)
    return freudenthal_filtration(sample_on_grid(f, axes), max_dim)
