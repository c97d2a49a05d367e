"""Distance to an empirical measure and its power-distance approximations.

All functions take a :class:`~sparsedtm.metric.MetricSpace`, a set of point
ids ``P`` carrying the uniform (empirical) measure and a query ``x`` that is
either a point id or, in coordinate mode, a coordinate vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .metric import MetricError, MetricSpace


class MassError(ValueError):
    pass


@dataclass(frozen=True)
class Mass:
    """Mass parameter given either as a fraction ``m`` or a neighbour count ``k``.

    ``k`` may be fractional; ``k = m * n`` for an ``n``-point sample.
    """

    m: Optional[float] = None
    k: Optional[float] = None

    def __post_init__(self):
        if (self.m is None) == (self.k is None):
            raise MassError("give exactly one of m or k")
        if self.m is not None and not 0 < self.m <= 1:
            raise MassError(f"mass fraction m={self.m} outside (0, 1]")
        if self.k is not None and not self.k > 0:
            raise MassError(f"k={self.k} must be positive")

    def count(self, n: int) -> float:
        if n <= 0:
            raise MassError("empty point set")
        k = self.m * n if self.m is not None else float(self.k)
        if self.m is not None and abs(k - round(k)) <= 1e-9 * max(1.0, k):
            # m * n round-off (0.2 * 15 = 3.0000000000000004) must not make k fractional
            k = float(round(k))
        if k > n:
            raise MassError(f"k={k} exceeds the number of points {n}")
        return k


def as_mass(mass) -> Mass:
    if isinstance(mass, Mass):
        return mass
    if isinstance(mass, (int, float)) and not isinstance(mass, bool):
        return Mass(k=mass)
    raise MassError(f"cannot interpret {mass!r} as a mass parameter")


@dataclass
class WeightedPointSet:
    """Point ids with nonnegative weights and the Lipschitz constant of the weights."""

    ids: np.ndarray
    weights: np.ndarray
    lipschitz: Optional[float] = 1.0

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=int)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.ids.shape != self.weights.shape:
            raise ValueError("ids and weights differ in length")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise ValueError("weights must be finite and nonnegative")

    def __len__(self):
        return len(self.ids)

    def check_lipschitz(self, M: MetricSpace, tol: float = 1e-9) -> bool:
        if self.lipschitz is None:
            return True
        D = M.pairwise(self.ids)
        dw = np.abs(self.weights[:, None] - self.weights[None, :])
        return bool(np.all(dw <= self.lipschitz * D + tol))


@dataclass
class DiscreteMeasure:
    """Finitely supported measure on points of a metric space."""

    ids: np.ndarray
    masses: np.ndarray
    total: Optional[float] = field(default=None)

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=int)
        self.masses = np.asarray(self.masses, dtype=float)
        if self.ids.shape != self.masses.shape:
            raise ValueError("ids and masses differ in length")
        if len(self.ids) == 0:
            raise ValueError("empty support")
        if np.any(self.masses < 0) or not np.all(np.isfinite(self.masses)):
            raise ValueError("masses must be finite and nonnegative")
        s = float(self.masses.sum())
        if self.total is None:
            self.total = s
        elif abs(self.total - s) > 1e-12 * max(1.0, abs(s)):
            raise ValueError(f"declared total mass {self.total} != sum of masses {s}")

    @classmethod
    def empirical(cls, ids: Sequence[int]) -> "DiscreteMeasure":
        ids = np.asarray(ids, dtype=int)
        return cls(ids, np.full(len(ids), 1.0 / len(ids)))


# -- distance to measure ---------------------------------------------------


def _neighbor_distances(M: MetricSpace, P, x) -> np.ndarray:
    P = np.asarray(P, dtype=int)
    if P.size == 0:
        raise MassError("empty point set")
    return np.sort(M.distances_to(x, P))


def _dtm_sq_from_sorted(d: np.ndarray, k: float) -> float:
    kf = math.floor(k)
    head = d[:kf]
    s = float(np.dot(head, head))
    frac = k - kf
    if frac > 0:
        s += frac * float(d[kf]) ** 2
    return s / k


def dtm_eval(M: MetricSpace, P, mass, x) -> float:
    """Distance from ``x`` to the empirical measure on ``P``.

    The root mean square distance to the ``k`` nearest neighbours; for
    fractional ``k`` the ``ceil(k)``-th neighbour enters with weight
    ``k - floor(k)``.
    """
    k = as_mass(mass).count(len(P))
    return math.sqrt(_dtm_sq_from_sorted(_neighbor_distances(M, P, x), k))


def dtm_measure(M: MetricSpace, mu: DiscreteMeasure, m: float, x) -> float:
    """Distance to a general discrete measure with mass parameter ``m``.

    ``m`` is a fraction of the total mass of ``mu``.
    """
    if not 0 < m <= 1:
        raise MassError(f"mass fraction m={m} outside (0, 1]")
    d = M.distances_to(x, mu.ids)
    w = mu.masses / mu.total
    order = np.lexsort((mu.ids, d))
    d, w = d[order], w[order]
    cum = np.cumsum(w)
    before = np.concatenate(([0.0], cum[:-1]))
    take = np.clip(m - before, 0.0, w)
    return math.sqrt(float(np.dot(take, d * d)) / m)


def dtm_weights(M: MetricSpace, P, mass) -> WeightedPointSet:
    """DTM value at every point of ``P``; the weights are 1-Lipschitz."""
    P = np.asarray(P, dtype=int)
    k = as_mass(mass).count(len(P))
    D = M.pairwise()[np.ix_(P, P)]
    D = np.sort(D, axis=1)
    kf = math.floor(k)
    sq = np.einsum("ij,ij->i", D[:, :kf], D[:, :kf])
    if k > kf:
        sq = sq + (k - kf) * D[:, kf] ** 2
    return WeightedPointSet(P, np.sqrt(sq / k), lipschitz=1.0)


def power_distance_eval(M: MetricSpace, W: WeightedPointSet, x) -> float:
    """``sqrt(min_p d(p, x)^2 + w_p^2)``."""
    if len(W) == 0:
        raise ValueError("empty weighted point set")
    d = M.distances_to(x, W.ids)
    return math.sqrt(float(np.min(d * d + W.weights * W.weights)))


def dP_eval(M: MetricSpace, P, mass, x, weights: Optional[WeightedPointSet] = None) -> float:
    """Power distance to ``P`` weighted by the DTM of each sample point.

    Precomputed ``weights`` may be passed to avoid recomputing them per query.
    """
    W = weights if weights is not None else dtm_weights(M, P, mass)
    return power_distance_eval(M, W, x)


# -- Euclidean barycentric forms -------------------------------------------


def _require_euclidean(M: MetricSpace) -> None:
    if not M.is_euclidean:
        raise MetricError("barycenters need the Euclidean (l2) metric")


def _integer_k(mass, n: int) -> int:
    k = as_mass(mass).count(n)
    if k != int(k):
        raise MassError(f"barycenters need an integer k, got {k}")
    return int(k)


def barycenter_and_energy(M: MetricSpace, P, mass, x):
    """Barycenter of the k nearest neighbours of ``x`` and its cell energy.

    Returns ``(barycenter, energy)`` where the energy is the mean squared
    distance of the neighbours to their barycenter, so that
    ``dtm(x)**2 == energy + |barycenter - x|**2``.
    """
    _require_euclidean(M)
    P = np.asarray(P, dtype=int)
    k = _integer_k(mass, len(P))
    nn = M.knn(P, x, k)
    pts = M.points[nn.ids]
    bary = pts.mean(axis=0)
    energy = float(np.mean(np.sum((pts - bary) ** 2, axis=1)))
    return bary, energy


def witness_barycenters(M: MetricSpace, P, mass):
    """Barycenters and cell energies witnessed by every point of ``P``."""
    _require_euclidean(M)
    P = np.sort(np.asarray(P, dtype=int))
    k = _integer_k(mass, len(P))
    D = M.pairwise()[np.ix_(P, P)]
    # stable sort on rows ordered by id gives the lowest-id tie rule
    order = np.argsort(D, axis=1, kind="stable")[:, :k]
    pts = M.points[P][order]  # (n, k, dim)
    bary = pts.mean(axis=1)
    energy = np.mean(np.sum((pts - bary[:, None, :]) ** 2, axis=2), axis=1)
    return bary, energy


def witnessed_kdistance_eval(M: MetricSpace, P, mass, x, witnesses=None) -> float:
    """Euclidean power distance to the witnessed barycenters, weighted by cell energy."""
    bary, energy = witnesses if witnesses is not None else witness_barycenters(M, P, mass)
    xv = M.coords(x)
    sq = energy + np.sum((bary - xv) ** 2, axis=1)
    return math.sqrt(float(sq.min()))


# -- log-scale bounds ------------------------------------------------------

SQRT2 = math.sqrt(2.0)
GENERAL_UPPER = math.sqrt(5.0)
EUCLIDEAN_UPPER = math.sqrt(3.0)
WITNESSED_UPPER = math.sqrt(6.0)


def power_distance_stability_bound(t: float, hausdorff_distance: float) -> float:
    """Sup-norm bound between power distances of two samples with t-Lipschitz weights."""
    return math.sqrt(1.0 + t * t) * hausdorff_distance
