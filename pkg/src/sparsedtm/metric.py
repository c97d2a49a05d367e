"""Point clouds, distance oracles and nearest-neighbour queries."""
from __future__ import annotations

from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

METRICS = ("l2", "l1", "matrix")

PointLike = Union[int, np.integer, Sequence[float], np.ndarray]


class MetricError(ValueError):
    pass


class MetricSpace:
    """A finite point cloud with a distance oracle.

    Either ``points`` (coordinates, metric ``"l2"`` or ``"l1"``) or ``matrix``
    (metric ``"matrix"``) is given, never both. Point ids are row indices.
    In coordinate mode a query may be an id or a coordinate vector; in matrix
    mode queries are ids only.
    """

    def __init__(
        self,
        points: Optional[np.ndarray] = None,
        metric: str = "l2",
        matrix: Optional[np.ndarray] = None,
        check_triangle: bool = False,
    ):
        if (points is None) == (matrix is None):
            raise MetricError("give exactly one of points or matrix")
        if matrix is not None:
            metric = "matrix"
        if metric not in METRICS:
            raise MetricError(f"unknown metric {metric!r}")
        self.metric = metric
        self.points = None
        self.matrix = None
        self._pairwise = None
        if matrix is not None:
            mat = np.array(matrix, dtype=float)
            _validate_matrix(mat, check_triangle)
            mat.setflags(write=False)
            self.matrix = mat
            self._pairwise = mat
        else:
            if metric == "matrix":
                raise MetricError("matrix metric needs a matrix")
            pts = np.array(points, dtype=float)
            if pts.ndim == 1:
                pts = pts[:, None]
            if pts.ndim != 2:
                raise MetricError("points must be a 2D array")
            if not np.all(np.isfinite(pts)):
                raise MetricError("non-finite coordinates")
            pts.setflags(write=False)
            self.points = pts

    @classmethod
    def from_matrix(cls, matrix, check_triangle: bool = False) -> "MetricSpace":
        return cls(matrix=matrix, check_triangle=check_triangle)

    def __len__(self) -> int:
        return len(self.matrix) if self.matrix is not None else len(self.points)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def is_euclidean(self) -> bool:
        return self.metric == "l2"

    @property
    def dim(self) -> Optional[int]:
        return None if self.points is None else self.points.shape[1]

    def subset(self, ids: Iterable[int]) -> "MetricSpace":
        ids = np.asarray(list(ids), dtype=int)
        if self.matrix is not None:
            return MetricSpace(matrix=self.matrix[np.ix_(ids, ids)])
        return MetricSpace(points=self.points[ids], metric=self.metric)

    # -- queries ---------------------------------------------------------

    def _check_id(self, i) -> int:
        i = int(i)
        if not 0 <= i < len(self):
            raise MetricError(f"point id {i} out of range [0, {len(self)})")
        return i

    def coords(self, x: PointLike) -> np.ndarray:
        """Coordinates of an id or a raw point (coordinate mode only)."""
        if self.points is None:
            raise MetricError("matrix-mode spaces have no coordinates")
        if _is_id(x):
            return self.points[self._check_id(x)]
        v = np.asarray(x, dtype=float).reshape(-1)
        if v.shape[0] != self.points.shape[1]:
            raise MetricError(
                f"dimension mismatch: point has {v.shape[0]} coordinates, "
                f"space has {self.points.shape[1]}"
            )
        return v

    def _norm(self, diff: np.ndarray) -> np.ndarray:
        if self.metric == "l1":
            return np.abs(diff).sum(axis=-1)
        return np.sqrt(np.einsum("...i,...i->...", diff, diff))

    def distance(self, x: PointLike, y: PointLike) -> float:
        if self.matrix is not None:
            if not (_is_id(x) and _is_id(y)):
                raise MetricError("matrix mode only accepts point ids")
            return float(self.matrix[self._check_id(x), self._check_id(y)])
        return float(self._norm(self.coords(x) - self.coords(y)))

    def distances_to(self, x: PointLike, ids: Optional[Sequence[int]] = None) -> np.ndarray:
        """Distances from ``x`` to every point of ``ids`` (default: all points)."""
        idx = np.arange(len(self)) if ids is None else np.asarray(ids, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= len(self)):
            raise MetricError("point id out of range")
        if self.matrix is not None:
            if not _is_id(x):
                raise MetricError("matrix mode only accepts point ids")
            return self.matrix[self._check_id(x), idx]
        if _is_id(x) and self._pairwise is not None:
            return self._pairwise[self._check_id(x), idx]
        return self._norm(self.points[idx] - self.coords(x))

    def pairwise(self, ids: Optional[Sequence[int]] = None) -> np.ndarray:
        """Full distance matrix, cached for the whole space."""
        if self._pairwise is None:
            kind = "cityblock" if self.metric == "l1" else "euclidean"
            mat = squareform(pdist(self.points, kind))
            np.fill_diagonal(mat, 0.0)
            mat = np.maximum(mat, mat.T)
            mat.setflags(write=False)
            self._pairwise = mat
        if ids is None:
            return self._pairwise
        ids = np.asarray(ids, dtype=int)
        return self._pairwise[np.ix_(ids, ids)]

    def knn(self, ids: Sequence[int], x: PointLike, j: int) -> "NeighborList":
        """The ``j`` nearest points of ``ids`` to ``x``, ties broken by lowest id."""
        ids = np.asarray(ids, dtype=int)
        if not 1 <= j <= len(ids):
            raise MetricError(f"j={j} outside [1, {len(ids)}]")
        d = self.distances_to(x, ids)
        order = np.lexsort((ids, d))[:j]
        return NeighborList(ids[order], d[order])

    def hausdorff(self, P: Sequence[int], Q: Sequence[int]) -> float:
        P = np.asarray(P, dtype=int)
        Q = np.asarray(Q, dtype=int)
        if P.size == 0 or Q.size == 0:
            raise MetricError("hausdorff distance of an empty set")
        if self.matrix is not None or self._pairwise is not None:
            D = self.pairwise()[np.ix_(P, Q)]
        else:
            kind = "cityblock" if self.metric == "l1" else "euclidean"
            D = cdist(self.points[P], self.points[Q], kind)
        return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


class NeighborList:
    """Point ids sorted by nondecreasing distance to a query."""

    __slots__ = ("ids", "distances")

    def __init__(self, ids: np.ndarray, distances: np.ndarray):
        self.ids = ids
        self.distances = distances

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(zip(self.ids.tolist(), self.distances.tolist()))

    def __repr__(self):
        return f"NeighborList(ids={self.ids.tolist()}, distances={self.distances.tolist()})"


def _is_id(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def _validate_matrix(mat: np.ndarray, check_triangle: bool, tol: float = 1e-12) -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise MetricError("distance matrix must be square")
    if not np.all(np.isfinite(mat)):
        raise MetricError("distance matrix has non-finite entries")
    if np.any(mat < 0):
        raise MetricError("distance matrix has negative entries")
    if np.any(np.diag(mat) != 0):
        raise MetricError("distance matrix has a nonzero diagonal")
    scale = tol * max(1.0, float(mat.max(initial=0.0)))
    if np.any(np.abs(mat - mat.T) > scale):
        raise MetricError("distance matrix is not symmetric")
    if check_triangle:
        n = len(mat)
        if n > 500:
            raise MetricError("triangle inequality check limited to n <= 500")
        for k in range(n):
            # d(i, j) <= d(i, k) + d(k, j) for all i, j
            if np.any(mat > mat[:, k][:, None] + mat[k][None, :] + scale):
                raise MetricError("distance matrix violates the triangle inequality")


def hausdorff(M: MetricSpace, P, Q) -> float:
    return M.hausdorff(P, Q)


def knn(M: MetricSpace, P, x, j: int) -> NeighborList:
    return M.knn(P, x, j)


def distance(M: MetricSpace, x, y) -> float:
    return M.distance(x, y)
