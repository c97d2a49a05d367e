"""Greedy permutations, sparse Rips and sparse weighted Rips filtrations.

The sparse complex at scale ``alpha`` keeps the points whose insertion
radius is at least ``eps (1 - eps) alpha`` and joins two of them when the
perturbed distance ``d(p, q) + s_p(alpha) + s_q(alpha)`` is at most
``2 alpha``.  The filtration is the union of these complexes over scales.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dtm import WeightedPointSet
from .filtration import Filtration, flag_filtration, flag_levels, level_sizes
from .metric import MetricSpace
from .weighted_rips import _relabel, _sorted_weights, edge_births


@dataclass
class GreedyPermutation:
    """Furthest-point order of point ids with insertion radii (first is ``inf``)."""

    order: np.ndarray
    radii: np.ndarray

    def radius_of(self) -> dict:
        return dict(zip(self.order.tolist(), self.radii.tolist()))

    def radii_for(self, ids) -> np.ndarray:
        lut = self.radius_of()
        return np.array([lut[int(i)] for i in ids], dtype=float)


@dataclass(frozen=True)
class SparseParams:
    epsilon: float
    lipschitz: float = 1.0

    def __post_init__(self):
        check_epsilon(self.epsilon)
        if self.lipschitz < 0:
            raise ValueError("lipschitz constant must be nonnegative")

    @property
    def kappa(self) -> float:
        return interleaving_constant(self.epsilon, self.lipschitz)


def check_epsilon(eps: float) -> None:
    if not 0 < eps < 1:
        raise ValueError(f"epsilon={eps} outside (0, 1)")


def interleaving_constant(eps: float, t: float = 1.0) -> float:
    """Multiplicative distance between sparse weighted and full weighted Rips diagrams."""
    check_epsilon(eps)
    return (1.0 + math.sqrt(1.0 + t * t) * eps) / (1.0 - eps)


def greedy_permutation(M: MetricSpace, P=None, seed_id: Optional[int] = None) -> GreedyPermutation:
    """Furthest-point sampling starting at ``seed_id`` (default: smallest id).

    Each step picks the point furthest from those already chosen, the lowest
    id winning ties; its insertion radius is that distance.
    """
    P = np.arange(len(M)) if P is None else np.unique(np.asarray(P, dtype=int))
    if P.size == 0:
        raise ValueError("empty point set")
    if seed_id is None:
        seed_id = int(P[0])
    hits = np.nonzero(P == seed_id)[0]
    if hits.size == 0:
        raise ValueError(f"seed {seed_id} is not in the point set")
    n = len(P)
    order = np.empty(n, dtype=int)
    radii = np.empty(n, dtype=float)
    chosen = np.zeros(n, dtype=bool)
    cur = int(hits[0])
    order[0], radii[0] = cur, math.inf
    chosen[cur] = True
    dist = M.distances_to(int(P[cur]), P).astype(float).copy()
    dist[cur] = -1.0
    for i in range(1, n):
        cur = int(np.argmax(dist))
        order[i], radii[i] = cur, dist[cur]
        chosen[cur] = True
        np.minimum(dist, M.distances_to(int(P[cur]), P), out=dist)
        dist[chosen] = -1.0
    return GreedyPermutation(P[order], radii)


def perturbation_s(lam: float, eps: float, alpha: float) -> float:
    """Scale-dependent inflation of distances at a point with insertion radius ``lam``."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return float(_s(np.asarray(lam, dtype=float), eps, np.asarray(alpha, dtype=float)))


def _s(lam, eps, alpha):
    with np.errstate(invalid="ignore"):
        lo = lam / eps
        hi = lam / (eps * (1.0 - eps))
        mid = alpha - lo
        out = np.where(alpha >= hi, eps * alpha, np.where(alpha > lo, mid, 0.0))
    return np.where(np.isinf(lam), 0.0, out)


def _s_slope(lam, eps, alpha):
    # right derivative in alpha
    lo = lam / eps
    hi = lam / (eps * (1.0 - eps))
    out = np.where(alpha >= hi, eps, np.where(alpha >= lo, 1.0, 0.0))
    return np.where(np.isinf(lam), 0.0, out)


def vertex_cap(lam, eps):
    """Last scale at which a point belongs to the vertex net of the sparse complex."""
    return np.asarray(lam, dtype=float) / (eps * (1.0 - eps))


def sparse_edge_births(d, lp, lq, eps: float):
    """Vectorised :func:`sparse_edge_birth`; returns ``(births, present)``."""
    check_epsilon(eps)
    d = np.atleast_1d(np.asarray(d, dtype=float))
    lp = np.broadcast_to(np.asarray(lp, dtype=float), d.shape)
    lq = np.broadcast_to(np.asarray(lq, dtype=float), d.shape)
    c = eps * (1.0 - eps)
    with np.errstate(invalid="ignore"):
        T = np.stack(
            [np.zeros_like(d), lp / eps, lp / c, lq / eps, lq / c, np.full_like(d, np.inf)],
            axis=1,
        )
    T = np.where(np.isnan(T), np.inf, T)
    T.sort(axis=1)

    def g(alpha):
        return d[:, None] + _s(lp[:, None], eps, alpha) + _s(lq[:, None], eps, alpha) - 2.0 * alpha

    finite = np.isfinite(T)
    G = np.where(finite, g(np.where(finite, T, 0.0)), -np.inf)
    # g is nonincreasing and tends to -inf: find the first breakpoint at or below 0
    crossed = G[:, 1:] <= 0.0
    seg = np.argmax(crossed, axis=1)
    rows = np.arange(len(d))
    t0 = T[rows, seg]
    g0 = G[rows, seg]
    slope = _s_slope(lp, eps, t0) + _s_slope(lq, eps, t0) - 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        births = t0 + g0 / -slope
    births = np.where(d <= 0.0, 0.0, births)
    cap = vertex_cap(np.minimum(lp, lq), eps)
    return births, births <= cap


def sparse_edge_birth(d: float, lp: float, lq: float, eps: float):
    """Birth scale of the sparse edge ``(p, q)`` and whether it ever appears.

    The birth is the least ``alpha`` with ``d + s_p(alpha) + s_q(alpha) <= 2 alpha``;
    the edge is present when that happens while both endpoints are still in
    the vertex net, i.e. no later than ``min(lp, lq) / (eps (1 - eps))``.
    """
    if d < 0 or lp < 0 or lq < 0:
        raise ValueError("negative input")
    b, present = sparse_edge_births(np.array([d]), np.array([lp]), np.array([lq]), eps)
    return float(b[0]), bool(present[0])


def _sparse_graph(M: MetricSpace, ids: np.ndarray, eps: float, seed_id=None):
    perm = greedy_permutation(M, ids, seed_id)
    lam = perm.radii_for(ids)
    caps = vertex_cap(lam, eps)
    D = M.pairwise(ids) if len(ids) < len(M) else M.pairwise()
    iu, ju = np.triu_indices(len(ids), k=1)
    d = D[iu, ju]
    # births are at least d / 2, so longer pairs can never fit under the cap
    cand = d <= 2.0 * np.minimum(caps[iu], caps[ju])
    iu, ju, d = iu[cand], ju[cand], d[cand]
    births, present = sparse_edge_births(d, lam[iu], lam[ju], eps)
    return perm, lam, caps, iu[present], ju[present], d[present], births[present]


def build_sparse_rips(M: MetricSpace, P=None, eps: float = 0.5, max_dim: int = 2, seed_id=None) -> Filtration:
    """Sparse Rips filtration; every vertex enters at 0."""
    check_epsilon(eps)
    ids = np.arange(len(M)) if P is None else np.unique(np.asarray(P, dtype=int))
    _, _, caps, iu, ju, _, births = _sparse_graph(M, ids, eps, seed_id)
    F = flag_filtration(
        np.zeros(len(ids)),
        np.column_stack([iu, ju]),
        births,
        max_dim,
        edge_births=births,
        vertex_caps=caps,
    )
    return _relabel(F, ids)


def sparse_rips_sizes(M: MetricSpace, P=None, eps: float = 0.5, max_dim: int = 2, seed_id=None):
    """Simplex counts per dimension of the sparse Rips filtration, without storing the top level."""
    check_epsilon(eps)
    ids = np.arange(len(M)) if P is None else np.unique(np.asarray(P, dtype=int))
    _, _, caps, iu, ju, _, births = _sparse_graph(M, ids, eps, seed_id)
    levels = flag_levels(
        np.zeros(len(ids)),
        np.column_stack([iu, ju]),
        births,
        max_dim,
        edge_births=births,
        vertex_caps=caps,
        keep_top=False,
    )
    return level_sizes(levels)


def build_sparse_weighted_rips(
    M: MetricSpace, W: WeightedPointSet, eps: float = 0.5, max_dim: int = 2, seed_id=None
) -> Filtration:
    """Intersection of the sparse Rips and the weighted Rips filtrations.

    The simplices are those of the sparse complex, which depends on the metric
    only; each enters at the larger of its sparse and weighted Rips values.
    """
    check_epsilon(eps)
    ids, w = _sorted_weights(W)
    _, _, caps, iu, ju, d, births = _sparse_graph(M, ids, eps, seed_id)
    rvals = edge_births(d, w[iu], w[ju])
    F = flag_filtration(
        w,
        np.column_stack([iu, ju]),
        np.maximum(births, rvals),
        max_dim,
        edge_births=births,
        vertex_caps=caps,
    )
    return _relabel(F, ids)


def filtration_stats(F: Filtration, mode: str, eps: Optional[float], n: int, build_ms: float) -> dict:
    return {
        "mode": mode,
        "epsilon": eps,
        "n": int(n),
        "simplices_per_dim": F.size_by_dim(),
        "build_ms": round(float(build_ms), 3),
    }
